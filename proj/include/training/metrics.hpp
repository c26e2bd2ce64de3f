#pragma once

#include <span>
#include <string>
#include <vector>

#include "training/forecaster.hpp"

namespace training {

struct CaseMetrics {
  std::string case_id;
  double residual_mean = 0.0;
  double residual_variance = 0.0;
  double coverage = 0.0;
  double crossing_rate = 0.0;
};

// Residual statistics pooled over all test cases and horizon steps, in
// normalized target units. Coverage counts truth inside the closed
// [lowest-q, highest-q] band; crossings are steps whose quantile outputs are
// not nondecreasing in q.
struct EvalMetrics {
  double residual_mean = 0.0;
  double residual_variance = 0.0;
  double coverage = 0.0;
  double crossing_rate = 0.0;
  std::size_t n_points = 0;
  std::vector<CaseMetrics> per_case;
};

// One evaluated sample: normalized forecast values (tau x |Q| row-major).
struct SampleForecast {
  const data::TimeSeriesSample* sample = nullptr;
  std::vector<double> values;
};

std::vector<SampleForecast> run_forecasts(
    const Forecaster& model, std::span<const data::TimeSeriesSample> samples);

EvalMetrics evaluate_forecasts(std::span<const SampleForecast> forecasts,
                               std::span<const double> quantiles);

// run_forecasts + evaluate_forecasts; throws std::domain_error on an empty
// test set.
EvalMetrics evaluate(const Forecaster& model,
                     std::span<const data::TimeSeriesSample> test_set);

}  // namespace training
