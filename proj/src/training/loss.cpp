#include "training/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace training {

double quantile_loss(double y, double yhat, double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("quantile must lie in (0,1)");
  }
  return q * std::max(y - yhat, 0.0) + (1.0 - q) * std::max(yhat - y, 0.0);
}

LossReport aggregate_loss(std::span<const ForecastPair> batch,
                          std::span<const double> quantiles) {
  if (batch.empty()) throw std::domain_error("aggregate_loss: empty batch");
  const std::size_t tau = batch.front().truth.size();
  if (tau == 0) throw std::domain_error("aggregate_loss: empty horizon");

  LossReport report;
  report.n_samples = batch.size();
  report.tau_max = tau;
  for (double q : quantiles) report.per_quantile[q] = 0.0;

  const double norm = double(batch.size()) * double(tau);
  for (const ForecastPair& pair : batch) {
    if (pair.truth.size() != tau ||
        pair.forecast.size() != tau * quantiles.size()) {
      throw std::domain_error("aggregate_loss: forecast does not cover the horizon");
    }
    for (std::size_t step = 0; step < tau; ++step) {
      for (std::size_t qi = 0; qi < quantiles.size(); ++qi) {
        const double ql = quantile_loss(
            pair.truth[step], pair.forecast[step * quantiles.size() + qi],
            quantiles[qi]);
        report.per_quantile[quantiles[qi]] += ql / norm;
      }
    }
  }
  for (const auto& [q, v] : report.per_quantile) report.total += v;
  return report;
}

numerics::Tensor pinball_sum_graph(const numerics::Tensor& forecast,
                                   std::span<const double> truth,
                                   std::span<const double> quantiles) {
  using numerics::Tensor;
  const std::size_t tau = truth.size();
  if (forecast.rows() != tau || forecast.cols() != quantiles.size()) {
    throw numerics::ShapeError("pinball_sum_graph: forecast shape mismatch");
  }
  Tensor y = Tensor::from({tau, 1}, {truth.begin(), truth.end()});
  Tensor total;
  for (std::size_t qi = 0; qi < quantiles.size(); ++qi) {
    const double q = quantiles[qi];
    if (!(q > 0.0 && q < 1.0)) {
      throw std::domain_error("quantile must lie in (0,1)");
    }
    Tensor yhat = numerics::slice_cols(forecast, qi, qi + 1);
    Tensor under = numerics::relu(numerics::sub(y, yhat));  // y - yhat > 0
    Tensor over = numerics::relu(numerics::sub(yhat, y));
    Tensor term =
        numerics::add(numerics::scale(numerics::sum_all(under), q),
                      numerics::scale(numerics::sum_all(over), 1.0 - q));
    total = total.defined() ? numerics::add(total, term) : term;
  }
  return total;
}

}  // namespace training
