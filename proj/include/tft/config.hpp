#pragma once

#include <cstddef>
#include <vector>

namespace tft {

struct TftConfig {
  std::size_t d_model = 16;
  std::size_t num_heads = 2;  // m_H
  std::size_t lstm_layers = 1;
  bool full_attention = false;

  std::size_t k = 20;        // history window length (k+1 observed steps)
  std::size_t tau_max = 190; // forecast horizon

  std::size_t m_s = 3;  // static covariates; 0 removes the static pathway
  std::size_t m_z = 10; // historical covariates
  std::size_t m_x = 1;  // future-known covariates

  std::vector<double> quantiles{0.1, 0.5, 0.9};

  std::size_t seq_len() const { return k + tau_max + 1; }
  std::size_t hist_width() const { return m_z + 1; }  // [y_t, z_t]
  bool has_static() const { return m_s > 0; }

  void validate() const;  // throws std::invalid_argument
};

}  // namespace tft
