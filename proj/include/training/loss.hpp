#pragma once

#include <map>
#include <span>
#include <vector>

#include "numerics/tensor.hpp"

namespace training {

// Pinball loss for one (truth, prediction, quantile) triple.
// Throws std::domain_error for q outside (0,1).
double quantile_loss(double y, double yhat, double q);

struct LossReport {
  double total = 0.0;
  std::map<double, double> per_quantile;  // already /(M*tau_max)
  std::size_t n_samples = 0;
  std::size_t tau_max = 0;
};

// One sample's horizon truth plus its forecast matrix (tau x |Q|, row-major,
// columns ordered like `quantiles`).
struct ForecastPair {
  std::span<const double> truth;
  std::span<const double> forecast;
};

// Aggregated quantile loss: sum over samples, quantiles and horizon steps of
// the pinball loss, divided by M * tau_max (not by |Q|).
LossReport aggregate_loss(std::span<const ForecastPair> batch,
                          std::span<const double> quantiles);

// Differentiable counterpart: unnormalized pinball sum over quantiles and
// steps for one sample's forecast graph. Callers scale by 1/(M*tau_max).
numerics::Tensor pinball_sum_graph(const numerics::Tensor& forecast,
                                   std::span<const double> truth,
                                   std::span<const double> quantiles);

}  // namespace training
