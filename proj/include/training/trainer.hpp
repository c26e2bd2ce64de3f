#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "training/forecaster.hpp"

namespace training {

struct TrainSchedule {
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
};

struct TrainResult {
  std::vector<double> epoch_loss;  // mean training loss per epoch
};

// Shuffled mini-batch quantile-loss training with Adam. Deterministic under a
// fixed schedule seed; throws NumericError with epoch/batch coordinates when
// the loss turns non-finite.
TrainResult train(Forecaster& model,
                  std::span<const data::TimeSeriesSample> train_set,
                  const numerics::OptimizerConfig& optimizer,
                  const TrainSchedule& schedule);

}  // namespace training
