#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "data/transient.hpp"

namespace data {

// Minimal dense row-major matrix for plain (non-differentiated) data.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}
  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

// Per-signal z-score statistics, computed on training cases only.
struct NormStats {
  struct Moments {
    double mean = 0.0;
    double std = 1.0;
  };
  std::map<std::string, Moments> by_signal;

  const Moments& of(const std::string& signal) const;
  double normalize(const std::string& signal, double x) const;
  double denormalize(const std::string& signal, double z) const;
};

// Pooled mean/std over the full series of the given cases. Signals with zero
// variance are omitted and reported in `dropped`.
NormStats compute_norm_stats(const std::vector<TransientCase>& train_cases,
                             std::vector<std::string>* dropped = nullptr);

struct PruneResult {
  std::vector<std::string> labels;            // row/column order of `matrix`
  Matrix matrix;                              // Pearson r, symmetric, unit diag
  std::vector<std::string> retained_covariates;  // surviving direct signals
  std::vector<std::string> dropped;              // pruned or degenerate
  std::vector<std::string> warnings;
};

// Pairwise Pearson correlation over the concatenation of `cases`, then a
// greedy prune of direct signals in canonical generator order: a signal is
// dropped when |r| against any already-retained signal (targets included)
// exceeds `threshold`. Target channels are never pruned.
PruneResult pearson_prune(const std::vector<TransientCase>& cases,
                          double threshold = 0.95);

double pearson_r(const std::vector<double>& a, const std::vector<double>& b);

// One forecasting instance. All target/covariate channels are z-scored with
// the training-split statistics; the elapsed-time future covariate is scaled
// to [0,1] over the post-break window instead.
struct TimeSeriesSample {
  std::string case_id;
  std::vector<double> statics;   // [is_cold, is_hot, size01], possibly empty
  std::vector<double> y_hist;    // k+1 values, y_{t-k..t}
  Matrix z_hist;                 // (k+1) x m_z
  Matrix x_all;                  // (k+1+tau_max) x m_x, history plus horizon
  std::vector<double> y_future;  // tau_max truth values
  std::size_t t_index = 0;       // prediction start index in the case series
  std::string target;
  std::shared_ptr<const NormStats> norm;

  std::size_t k() const { return y_hist.size() - 1; }
  std::size_t tau_max() const { return y_future.size(); }
};

struct WindowSpec {
  std::size_t k = 200;
  std::size_t tau_max = 3800;
  double t_start_s = 100.0;
  std::string target = "cntrlvar_2";
  std::vector<std::string> covariates;  // retained direct signals
  bool include_statics = true;          // false for the static-ablation runs
  double size01_min = 0.1, size01_max = 35.5;  // break-size normalization span
};

// Cuts one sample out of a case. Throws std::domain_error when the case is
// too short for (k, tau_max) at t_start.
TimeSeriesSample window(const TransientCase& c, const WindowSpec& spec,
                        std::shared_ptr<const NormStats> norm);

// Additive white Gaussian noise on y_hist and z_hist at the given SNR (dB);
// statics, x and y_future are never touched. snr_db = +inf returns the
// sample unchanged. Returns a warning string for all-zero channels.
TimeSeriesSample inject_noise(const TimeSeriesSample& sample, double snr_db,
                              std::uint64_t seed,
                              std::vector<std::string>* warnings = nullptr);

struct SplitResult {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

// Seeded case-level shuffle; floor(train_frac * n) cases go to training.
SplitResult split_cases(const std::vector<TransientCase>& corpus,
                        double train_frac, std::uint64_t seed);

}  // namespace data
