#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "training/forecaster.hpp"

namespace baselines {

enum class CellKind { elman, gru, lstm };

std::string to_string(CellKind kind);
CellKind cell_from_string(const std::string& s);

struct BaselineConfig {
  CellKind cell = CellKind::lstm;
  bool block_mode = true;
  std::size_t hidden = 16;
  std::size_t layers = 1;
  std::size_t k = 20;
  std::size_t tau_max = 190;
  std::size_t m_z = 10;  // history input is [y_t, z_t]
  std::vector<double> quantiles{0.1, 0.5, 0.9};

  std::size_t input_width() const { return m_z + 1; }
  void validate() const;
};

struct BaselineLayerWeights {
  // gate packing: elman 1x, gru 3x (z, r, candidate), lstm 4x (i, f, g, o)
  numerics::Tensor w_x, w_h, b;
  numerics::Tensor w_x_dec;  // decode-phase input map, autoregressive mode only
};

struct BaselineParams {
  std::vector<BaselineLayerWeights> layers;
  numerics::Tensor block_w, block_b;  // hidden -> tau*|Q|, block mode
  numerics::Tensor step_w, step_b;    // hidden -> |Q|, autoregressive mode
};

BaselineParams init_baseline_params(const BaselineConfig& config,
                                    std::uint64_t seed);

std::vector<numerics::NamedParam> named_baseline_params(
    BaselineParams& params, const BaselineConfig& config);

// Encodes the k+1 history steps with the recurrent stack; block mode maps the
// final hidden state to the whole tau_max x |Q| output in one affine map,
// autoregressive mode decodes step by step feeding back the median.
// Static and future covariates are not consumed.
numerics::Tensor baseline_forward(const data::TimeSeriesSample& sample,
                                  const BaselineParams& params,
                                  const BaselineConfig& config);

class BaselineModel : public training::Forecaster {
 public:
  BaselineModel(BaselineConfig config, std::uint64_t seed);

  numerics::Tensor forward_graph(
      const data::TimeSeriesSample& sample) const override;
  std::span<numerics::NamedParam> parameters() override;
  std::span<const double> quantiles() const override;

  const BaselineConfig& config() const { return config_; }
  BaselineParams& params() { return params_; }

 private:
  BaselineConfig config_;
  BaselineParams params_;
  std::vector<numerics::NamedParam> registry_;
};

}  // namespace baselines
