#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace cli {

// Error with a machine-parsable category; the CLI prints
// "error[<category>]: <message>" and maps categories to exit codes.
class CliError : public std::exception {
 public:
  CliError(std::string category, std::string message)
      : category_(std::move(category)), message_(std::move(message)) {}
  const char* what() const noexcept override { return message_.c_str(); }
  const std::string& category() const { return category_; }

 private:
  std::string category_, message_;
};

// Fully resolved run settings: flags > config file > preset defaults.
struct RunConfig {
  std::string preset = "desk";
  std::uint64_t seed = 1234;
  std::filesystem::path out = "runs/desk";
  std::filesystem::path corpus_dir;   // defaults to <out>/corpus
  std::filesystem::path checkpoint;   // defaults to <out>/checkpoint.json

  // corpus generation
  double sample_rate_hz = 0.1;
  double duration_s = 2100.0;
  double onset_s = 100.0;
  double noise_scale = 1.0;
  double grid_start_cm = 0.1;
  double grid_step_cm = 0.2;
  double grid_end_cm = 35.5;
  int grid_stride = 10;
  double train_frac = 0.8;

  // data schema
  std::string target = "cntrlvar_2";
  double prune_threshold = 0.95;
  std::size_t k = 20;
  std::size_t tau_max = 190;
  double t_start_s = 200.0;  // recorded time; 100 s after the break lead-in

  // model
  std::size_t d_model = 16;
  std::size_t num_heads = 2;
  std::size_t lstm_layers = 1;
  bool full_attention = false;
  std::vector<double> quantiles{0.1, 0.5, 0.9};

  // training
  std::size_t epochs = 200;
  std::size_t batch_size = 8;
  double learning_rate = 1.0e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1.0e-8;
  double weight_decay = 4.0e-3;
  std::string decay_mode = "weights";  // weights | gradients

  // hyperparameter search
  std::size_t tune_iterations = 10;
  std::size_t tune_init = 5;
  std::size_t tune_epochs = 20;
  double hpo_size_min_cm = 6.5;
  double hpo_size_max_cm = 10.5;
  std::size_t hpo_case_budget = 10;

  // noise sweep
  std::vector<double> snr_list{40.0, 30.0, 25.0, 20.0, 15.0};

  // comparison harness
  std::vector<std::string> compare_models{"tft",      "lstm", "block_lstm",
                                          "gru",      "block_gru",
                                          "rnn",      "block_rnn"};
  std::size_t compare_epochs = 60;
  std::size_t baseline_hidden = 16;
};

using KeyValues = std::map<std::string, std::string>;

// Applies preset defaults, then config-file pairs, then flag pairs.
// Unknown keys and malformed values raise CliError("config", ...).
RunConfig resolve_config(const KeyValues& file_values,
                         const KeyValues& flag_values);

KeyValues parse_config_file(const std::filesystem::path& path);

// Serializes every key in sorted order; this is the echoed artifact.
std::string render_config(const RunConfig& config);

// Commands. Each writes its artifacts plus the resolved-config echo under
// config.out and returns normally or throws CliError.
void cmd_generate(const RunConfig& config);
void cmd_train(const RunConfig& config);
void cmd_evaluate(const RunConfig& config);
void cmd_tune(const RunConfig& config);
void cmd_noise_sweep(const RunConfig& config);
void cmd_ablate_static(const RunConfig& config);
void cmd_compare_baselines(const RunConfig& config);

}  // namespace cli
