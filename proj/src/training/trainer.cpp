#include "training/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "training/loss.hpp"

namespace training {

TrainResult train(Forecaster& model,
                  std::span<const data::TimeSeriesSample> train_set,
                  const numerics::OptimizerConfig& optimizer,
                  const TrainSchedule& schedule) {
  if (train_set.empty()) throw std::domain_error("train: empty training set");
  if (schedule.batch_size == 0) throw std::domain_error("train: batch_size 0");
  optimizer.validate();

  const std::size_t tau = train_set.front().tau_max();
  auto quantiles = model.quantiles();
  auto params = model.parameters();
  numerics::AdamState state;
  std::mt19937_64 rng(schedule.seed);

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  for (std::size_t epoch = 0; epoch < schedule.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_sum = 0.0;
    std::size_t epoch_count = 0;
    for (std::size_t start = 0; start < order.size();
         start += schedule.batch_size) {
      const std::size_t end =
          std::min(order.size(), start + schedule.batch_size);
      const std::size_t m = end - start;

      numerics::zero_grads(params);
      double loss_value = 0.0;
      try {
        numerics::Tensor batch_sum;
        for (std::size_t i = start; i < end; ++i) {
          const auto& sample = train_set[order[i]];
          numerics::Tensor forecast = model.forward_graph(sample);
          numerics::Tensor s =
              pinball_sum_graph(forecast, sample.y_future, quantiles);
          batch_sum = batch_sum.defined() ? numerics::add(batch_sum, s) : s;
        }
        numerics::Tensor loss =
            numerics::scale(batch_sum, 1.0 / (double(m) * double(tau)));
        loss_value = loss.value();
        if (loss.requires_grad()) {  // parameter-free oracles just evaluate
          loss.backward();
          numerics::adam_step(params, state, optimizer);
        }
      } catch (const numerics::NumericError& e) {
        throw numerics::NumericError(
            "epoch " + std::to_string(epoch) + ", batch " +
            std::to_string(start / schedule.batch_size) + ": " + e.what());
      }
      epoch_sum += loss_value * double(m);
      epoch_count += m;
    }
    result.epoch_loss.push_back(epoch_sum / double(epoch_count));
  }
  return result;
}

}  // namespace training
