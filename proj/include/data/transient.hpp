#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace data {

enum class BreakLocation { cold_leg, hot_leg };

std::string to_string(BreakLocation loc);
BreakLocation location_from_string(const std::string& s);

// Parametric LOCA-like transient generator settings. Cases carry a
// steady-state lead-in of onset_s seconds before the break so that a history
// window ending 100 s after the break always has data to draw on.
struct GeneratorConfig {
  double sample_rate_hz = 2.0;
  double duration_s = 2100.0;  // recorded window, break at onset_s
  double onset_s = 100.0;
  double noise_scale = 1.0;  // multiplier on the per-channel process noise

  double grid_start_cm = 0.1;
  double grid_step_cm = 0.2;
  double grid_end_cm = 35.5;
  int grid_stride = 1;  // desk preset samples every 10th size

  std::size_t sample_count() const;
  std::vector<double> grid_sizes() const;  // honoring stride
  bool on_grid(double size_cm) const;      // full grid, ignoring stride
};

struct TransientCase {
  std::string case_id;
  BreakLocation location = BreakLocation::cold_leg;
  double break_size_cm = 0.0;
  double sample_rate_hz = 0.0;
  double duration_s = 0.0;
  double onset_s = 0.0;
  std::vector<double> time_s;
  std::vector<std::string> signal_order;         // canonical channel order
  std::map<std::string, std::vector<double>> signals;

  std::size_t length() const { return time_s.size(); }
  const std::vector<double>& series(const std::string& code) const;
};

// Channel naming. The three forecastable synthetic channels come first.
const std::vector<std::string>& target_signal_codes();   // 3 entries
const std::vector<std::string>& direct_signal_codes();   // 13 entries
const std::vector<std::string>& all_signal_codes();      // targets + directs

std::string make_case_id(BreakLocation loc, double size_cm);

// Deterministic per-(location, size, seed) synthetic transient. Throws
// std::domain_error when size_cm is off the configured grid.
TransientCase generate_case(BreakLocation location, double size_cm,
                            std::uint64_t seed, const GeneratorConfig& config);

// One case per (stride-sampled grid size, location).
std::vector<TransientCase> build_corpus(const GeneratorConfig& config,
                                        std::uint64_t seed);

}  // namespace data
