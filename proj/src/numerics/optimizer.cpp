#include "numerics/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace numerics {

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  if (!(beta1 > 0.0 && beta1 < 1.0)) {
    throw std::invalid_argument("beta1 must lie in (0,1)");
  }
  if (!(beta2 > 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("beta2 must lie in (0,1)");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be positive");
  }
  if (!(weight_decay >= 0.0)) {
    throw std::invalid_argument("weight_decay must be non-negative");
  }
}

void adam_step(std::span<NamedParam> params, AdamState& state,
               const OptimizerConfig& config) {
  config.validate();
  if (state.slots.empty()) {
    state.slots.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      state.slots[i].m.assign(params[i].tensor.size(), 0.0);
      state.slots[i].v.assign(params[i].tensor.size(), 0.0);
    }
  }
  if (state.slots.size() != params.size()) {
    throw std::invalid_argument("optimizer state does not match parameter list");
  }

  // Validate all gradients before touching any parameter, so a failed step
  // leaves every tensor untouched.
  for (auto& p : params) {
    for (double g : p.tensor.grad()) {
      if (!std::isfinite(g)) {
        throw NumericError("non-finite gradient for parameter " + p.path);
      }
    }
  }

  ++state.step;
  const double b1t = 1.0 - std::pow(config.beta1, double(state.step));
  const double b2t = 1.0 - std::pow(config.beta2, double(state.step));
  const double lr = config.learning_rate;

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto theta = params[i].tensor.mutable_data();
    auto grad = params[i].tensor.grad();
    auto& slot = state.slots[i];
    for (std::size_t j = 0; j < theta.size(); ++j) {
      double g = grad[j];
      if (config.decay_mode == OptimizerConfig::DecayMode::decoupled_weights) {
        theta[j] -= lr * config.weight_decay * theta[j];
      } else {
        g += config.weight_decay * theta[j];
      }
      slot.m[j] = config.beta1 * slot.m[j] + (1.0 - config.beta1) * g;
      slot.v[j] = config.beta2 * slot.v[j] + (1.0 - config.beta2) * g * g;
      const double m_hat = slot.m[j] / b1t;
      const double v_hat = slot.v[j] / b2t;
      theta[j] -= lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

void zero_grads(std::span<NamedParam> params) {
  for (auto& p : params) p.tensor.zero_grad();
}

}  // namespace numerics
