#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "numerics/optimizer.hpp"
#include "training/trainer.hpp"

namespace baselines {

struct ModelSpec {
  std::string name;
  std::function<std::unique_ptr<training::Forecaster>()> make;
};

struct ComparisonRow {
  std::string model;
  std::string target;
  double residual_mean = 0.0;
  double residual_variance = 0.0;
  double coverage = 0.0;
  double pinball = 0.0;  // held-out aggregate quantile loss
  int rank_mean = 0;     // by |mean|, ascending
  int rank_variance = 0; // ascending
  int rank_coverage = 0; // descending
};

// Trains every registered model on the same split with the same loss and
// optimizer settings, evaluates on the test set and ranks the metric columns.
std::vector<ComparisonRow> compare(
    const std::vector<ModelSpec>& models, const std::string& target,
    std::span<const data::TimeSeriesSample> train_set,
    std::span<const data::TimeSeriesSample> test_set,
    const numerics::OptimizerConfig& optimizer,
    const training::TrainSchedule& schedule);

}  // namespace baselines
