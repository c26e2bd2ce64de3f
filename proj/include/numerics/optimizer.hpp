#pragma once

#include <span>
#include <string>
#include <vector>

#include "numerics/tensor.hpp"

namespace numerics {

// Adam settings. The decay coefficient supports two readings: decoupled
// weight decay (theta -= lr*decay*theta before the moment update) or a
// classical L2 term folded into the gradient.
struct OptimizerConfig {
  double learning_rate = 1.0e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1.0e-8;
  double weight_decay = 4.0e-3;

  enum class DecayMode { decoupled_weights, gradient_l2 };
  DecayMode decay_mode = DecayMode::decoupled_weights;

  void validate() const;  // throws std::invalid_argument on bad ranges
};

struct NamedParam {
  std::string path;
  Tensor tensor;
};

struct AdamState {
  struct Slot {
    std::vector<double> m;
    std::vector<double> v;
  };
  std::vector<Slot> slots;
  long step = 0;
};

// One bias-corrected Adam update over all parameters. State slots are
// allocated on first use and must stay aligned with the parameter list.
// Throws NumericError naming the parameter path on a non-finite gradient.
void adam_step(std::span<NamedParam> params, AdamState& state,
               const OptimizerConfig& config);

void zero_grads(std::span<NamedParam> params);

}  // namespace numerics
