#pragma once

#include <span>
#include <vector>

#include "data/pipeline.hpp"
#include "numerics/optimizer.hpp"
#include "numerics/tensor.hpp"

namespace training {

// A trainable multi-horizon quantile model. forward_graph returns the
// normalized-space forecast (tau_max x |Q|) wired into the autodiff tape so
// the shared training loop can backpropagate through it.
class Forecaster {
 public:
  virtual ~Forecaster() = default;
  virtual numerics::Tensor forward_graph(
      const data::TimeSeriesSample& sample) const = 0;
  virtual std::span<numerics::NamedParam> parameters() = 0;
  virtual std::span<const double> quantiles() const = 0;
};

}  // namespace training
