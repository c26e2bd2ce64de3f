#include "training/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace training {

std::vector<SampleForecast> run_forecasts(
    const Forecaster& model, std::span<const data::TimeSeriesSample> samples) {
  std::vector<SampleForecast> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    numerics::Tensor f = model.forward_graph(s);
    out.push_back({&s, {f.data().begin(), f.data().end()}});
  }
  return out;
}

EvalMetrics evaluate_forecasts(std::span<const SampleForecast> forecasts,
                               std::span<const double> quantiles) {
  if (forecasts.empty()) throw std::domain_error("evaluate: empty test set");
  const std::size_t nq = quantiles.size();
  std::size_t median_idx = 0;
  for (std::size_t i = 1; i < nq; ++i) {
    if (std::fabs(quantiles[i] - 0.5) < std::fabs(quantiles[median_idx] - 0.5)) {
      median_idx = i;
    }
  }

  EvalMetrics metrics;
  double sum = 0.0, sumsq = 0.0;
  std::size_t covered = 0, crossed = 0, n = 0;

  for (const SampleForecast& sf : forecasts) {
    const auto& truth = sf.sample->y_future;
    if (sf.values.size() != truth.size() * nq) {
      throw std::domain_error("evaluate: forecast does not cover the horizon");
    }
    CaseMetrics cm;
    cm.case_id = sf.sample->case_id;
    double csum = 0.0, csumsq = 0.0;
    std::size_t ccov = 0, ccross = 0;
    for (std::size_t step = 0; step < truth.size(); ++step) {
      const double* row = sf.values.data() + step * nq;
      const double r = row[median_idx] - truth[step];
      sum += r;
      sumsq += r * r;
      csum += r;
      csumsq += r * r;
      if (truth[step] >= row[0] && truth[step] <= row[nq - 1]) {
        ++covered;
        ++ccov;
      }
      bool monotone = true;
      for (std::size_t qi = 1; qi < nq; ++qi) {
        monotone = monotone && row[qi] >= row[qi - 1];
      }
      if (!monotone) {
        ++crossed;
        ++ccross;
      }
      ++n;
    }
    const double cn = double(truth.size());
    cm.residual_mean = csum / cn;
    cm.residual_variance = std::max(0.0, csumsq / cn - cm.residual_mean * cm.residual_mean);
    cm.coverage = double(ccov) / cn;
    cm.crossing_rate = double(ccross) / cn;
    metrics.per_case.push_back(cm);
  }

  metrics.n_points = n;
  metrics.residual_mean = sum / double(n);
  metrics.residual_variance =
      std::max(0.0, sumsq / double(n) - metrics.residual_mean * metrics.residual_mean);
  metrics.coverage = double(covered) / double(n);
  metrics.crossing_rate = double(crossed) / double(n);
  return metrics;
}

EvalMetrics evaluate(const Forecaster& model,
                     std::span<const data::TimeSeriesSample> test_set) {
  if (test_set.empty()) throw std::domain_error("evaluate: empty test set");
  auto forecasts = run_forecasts(model, test_set);
  return evaluate_forecasts(forecasts, model.quantiles());
}

}  // namespace training
