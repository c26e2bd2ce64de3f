#include "baselines/compare.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "training/loss.hpp"
#include "training/metrics.hpp"

namespace baselines {

std::vector<ComparisonRow> compare(
    const std::vector<ModelSpec>& models, const std::string& target,
    std::span<const data::TimeSeriesSample> train_set,
    std::span<const data::TimeSeriesSample> test_set,
    const numerics::OptimizerConfig& optimizer,
    const training::TrainSchedule& schedule) {
  std::vector<ComparisonRow> rows;
  rows.reserve(models.size());

  for (const ModelSpec& spec : models) {
    auto model = spec.make();
    training::train(*model, train_set, optimizer, schedule);
    auto forecasts = training::run_forecasts(*model, test_set);
    auto metrics = training::evaluate_forecasts(forecasts, model->quantiles());

    std::vector<training::ForecastPair> pairs;
    pairs.reserve(forecasts.size());
    for (const auto& f : forecasts) {
      pairs.push_back({f.sample->y_future, f.values});
    }
    const double pinball =
        training::aggregate_loss(pairs, model->quantiles()).total;

    ComparisonRow row;
    row.model = spec.name;
    row.target = target;
    row.residual_mean = metrics.residual_mean;
    row.residual_variance = metrics.residual_variance;
    row.coverage = metrics.coverage;
    row.pinball = pinball;
    rows.push_back(row);
  }

  // per-column ranks, 1 = best
  auto assign_ranks = [&](auto key, auto field) {
    std::vector<std::size_t> idx(rows.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return key(rows[a]) < key(rows[b]);
    });
    for (std::size_t pos = 0; pos < idx.size(); ++pos) {
      rows[idx[pos]].*field = int(pos) + 1;
    }
  };
  assign_ranks([](const ComparisonRow& r) { return std::fabs(r.residual_mean); },
               &ComparisonRow::rank_mean);
  assign_ranks([](const ComparisonRow& r) { return r.residual_variance; },
               &ComparisonRow::rank_variance);
  assign_ranks([](const ComparisonRow& r) { return -r.coverage; },
               &ComparisonRow::rank_coverage);
  return rows;
}

}  // namespace baselines
