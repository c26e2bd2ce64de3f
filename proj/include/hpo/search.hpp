#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "numerics/optimizer.hpp"
#include "tft/config.hpp"
#include "training/trainer.hpp"

namespace hpo {

struct HyperPoint {
  int d_model = 8;
  int num_heads = 1;
  int lstm_layers = 1;
  bool full_attention = false;

  std::array<double, 4> encode() const {
    return {double(d_model), double(num_heads), double(lstm_layers),
            full_attention ? 1.0 : 0.0};
  }
  bool operator==(const HyperPoint&) const = default;
};

// Discrete search space as explicit value lists; defaults follow the
// published table.
struct SearchSpace {
  std::vector<int> d_model_values;
  std::vector<int> num_heads_values;
  std::vector<int> lstm_layers_values;
  std::vector<int> full_attention_values{0, 1};

  static SearchSpace published();  // d_model 8..128, heads 1..16, layers 1..16

  std::size_t size() const;
  HyperPoint at(std::size_t flat_index) const;  // lexicographic enumeration
  bool contains(const HyperPoint& p) const;
};

struct TrialRecord {
  HyperPoint theta;
  double objective = 0.0;
  std::size_t iteration = 0;
};

struct ForestConfig {
  std::size_t trees = 50;
  std::size_t feature_subset = 2;  // random features considered per split
  std::size_t max_leaf_points = 3;
  std::uint64_t seed = 0;
};

// Bootstrap ensemble of regression trees over the encoded point; the
// predictive spread combines cross-tree disagreement with leaf variance.
class ForestSurrogate {
 public:
  explicit ForestSurrogate(ForestConfig config) : config_(config) {}

  void fit(std::span<const TrialRecord> observations);

  struct Prediction {
    double mean = 0.0;
    double std = 0.0;
  };
  Prediction predict(const HyperPoint& point) const;

  bool fitted() const { return !trees_.empty(); }

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    double mean = 0.0;
    double var = 0.0;
  };
  struct Tree {
    std::vector<Node> nodes;
  };

  ForestConfig config_;
  std::vector<Tree> trees_;
};

// Expected improvement for minimization; s = 0 degenerates to
// max(y_best - mean, 0).
double expected_improvement(double mean, double std, double y_best);

struct OptimizeResult {
  TrialRecord best;
  std::vector<TrialRecord> trajectory;
  std::vector<double> best_so_far;  // aligned with trajectory
};

// Sequential surrogate-guided minimization: n_init seeded random points,
// then argmax-EI proposals over the enumerated space (or a seeded candidate
// sample when the space is too large to enumerate). Already-evaluated points
// fall through to the next-best candidate in (EI desc, lexicographic) order.
OptimizeResult optimize(const SearchSpace& space,
                        const std::function<double(const HyperPoint&)>& objective,
                        std::size_t n_max, std::size_t n_init,
                        std::uint64_t seed,
                        std::vector<TrialRecord> resume = {});

// Train-and-evaluate objective for one hyperparameter point: |residual mean|
// + residual standard deviation + fraction outside the outer quantile band.
struct ObjectiveSettings {
  tft::TftConfig base_config;  // d_model/heads/layers/full_attention overridden
  numerics::OptimizerConfig optimizer;
  std::size_t budget_epochs = 100;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  double divergence_penalty = 1.0e6;
};

double tft_objective(const HyperPoint& theta,
                     std::span<const data::TimeSeriesSample> train_set,
                     std::span<const data::TimeSeriesSample> eval_set,
                     const ObjectiveSettings& settings);

}  // namespace hpo
