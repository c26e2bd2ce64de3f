#pragma once

#include <memory>
#include <random>

#include "data/pipeline.hpp"
#include "tft/config.hpp"
#include "testutil.hpp"

namespace testutil {

inline tft::TftConfig tiny_config() {
  tft::TftConfig c;
  c.d_model = 4;
  c.num_heads = 2;
  c.lstm_layers = 1;
  c.full_attention = false;
  c.k = 4;
  c.tau_max = 3;
  c.m_s = 3;
  c.m_z = 2;
  c.m_x = 1;
  return c;
}

inline std::shared_ptr<data::NormStats> identity_norm(
    const std::string& target) {
  auto norm = std::make_shared<data::NormStats>();
  norm->by_signal[target] = {0.0, 1.0};
  return norm;
}

// Random sample with the shapes demanded by the config; values are already
// in normalized units.
inline data::TimeSeriesSample random_sample(const tft::TftConfig& cfg,
                                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  data::TimeSeriesSample s;
  s.case_id = "synthetic";
  s.target = "y";
  s.norm = identity_norm("y");
  if (cfg.m_s > 0) {
    s.statics.resize(cfg.m_s);
    for (double& v : s.statics) v = d(rng);
  }
  s.y_hist.resize(cfg.k + 1);
  for (double& v : s.y_hist) v = d(rng);
  s.y_future.resize(cfg.tau_max);
  for (double& v : s.y_future) v = d(rng);
  s.z_hist = data::Matrix(cfg.k + 1, cfg.m_z);
  for (double& v : s.z_hist.values) v = d(rng);
  s.x_all = data::Matrix(cfg.seq_len(), cfg.m_x);
  for (double& v : s.x_all.values) v = d(rng);
  s.t_index = cfg.k;
  return s;
}

}  // namespace testutil
