#include "hpo/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "tft/model.hpp"
#include "training/metrics.hpp"

namespace hpo {

SearchSpace SearchSpace::published() {
  SearchSpace s;
  for (int v = 8; v <= 128; ++v) s.d_model_values.push_back(v);
  for (int v = 1; v <= 16; ++v) s.num_heads_values.push_back(v);
  for (int v = 1; v <= 16; ++v) s.lstm_layers_values.push_back(v);
  return s;
}

std::size_t SearchSpace::size() const {
  return d_model_values.size() * num_heads_values.size() *
         lstm_layers_values.size() * full_attention_values.size();
}

HyperPoint SearchSpace::at(std::size_t flat) const {
  const std::size_t nf = full_attention_values.size();
  const std::size_t nl = lstm_layers_values.size();
  const std::size_t nh = num_heads_values.size();
  HyperPoint p;
  p.full_attention = full_attention_values[flat % nf] != 0;
  flat /= nf;
  p.lstm_layers = lstm_layers_values[flat % nl];
  flat /= nl;
  p.num_heads = num_heads_values[flat % nh];
  flat /= nh;
  p.d_model = d_model_values.at(flat);
  return p;
}

bool SearchSpace::contains(const HyperPoint& p) const {
  auto has = [](const std::vector<int>& v, int x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };
  return has(d_model_values, p.d_model) && has(num_heads_values, p.num_heads) &&
         has(lstm_layers_values, p.lstm_layers) &&
         has(full_attention_values, p.full_attention ? 1 : 0);
}

void ForestSurrogate::fit(std::span<const TrialRecord> observations) {
  trees_.clear();
  if (observations.empty()) return;

  std::vector<std::array<double, 4>> xs;
  std::vector<double> ys;
  xs.reserve(observations.size());
  for (const auto& obs : observations) {
    xs.push_back(obs.theta.encode());
    ys.push_back(obs.objective);
  }

  std::mt19937_64 rng(config_.seed);
  std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
  std::uniform_int_distribution<int> pick_feature(0, 3);

  auto leaf_stats = [&](const std::vector<std::size_t>& idx, Node& node) {
    double mean = 0.0;
    for (std::size_t i : idx) mean += ys[i];
    mean /= double(idx.size());
    double var = 0.0;
    for (std::size_t i : idx) var += (ys[i] - mean) * (ys[i] - mean);
    var /= double(idx.size());
    node.mean = mean;
    node.var = var;
  };

  for (std::size_t t = 0; t < config_.trees; ++t) {
    Tree tree;
    std::vector<std::size_t> boot(xs.size());
    for (auto& i : boot) i = pick(rng);

    // iterative construction: stack of (node index, point indices)
    std::vector<std::pair<int, std::vector<std::size_t>>> work;
    tree.nodes.emplace_back();
    work.push_back({0, boot});
    while (!work.empty()) {
      auto [node_idx, idx] = std::move(work.back());
      work.pop_back();
      Node node;
      leaf_stats(idx, node);

      bool split_done = false;
      if (idx.size() > config_.max_leaf_points) {
        // candidate features for this split
        std::set<int> features;
        while (features.size() < std::min<std::size_t>(config_.feature_subset, 4)) {
          features.insert(pick_feature(rng));
        }
        double best_sse = std::numeric_limits<double>::infinity();
        int best_feature = -1;
        double best_threshold = 0.0;
        for (int f : features) {
          std::vector<double> values;
          values.reserve(idx.size());
          for (std::size_t i : idx) values.push_back(xs[i][std::size_t(f)]);
          std::sort(values.begin(), values.end());
          values.erase(std::unique(values.begin(), values.end()), values.end());
          for (std::size_t v = 0; v + 1 < values.size(); ++v) {
            const double thr = 0.5 * (values[v] + values[v + 1]);
            double sl = 0, sl2 = 0, sr = 0, sr2 = 0;
            std::size_t nl = 0, nr = 0;
            for (std::size_t i : idx) {
              if (xs[i][std::size_t(f)] <= thr) {
                sl += ys[i];
                sl2 += ys[i] * ys[i];
                ++nl;
              } else {
                sr += ys[i];
                sr2 += ys[i] * ys[i];
                ++nr;
              }
            }
            if (nl == 0 || nr == 0) continue;
            const double sse =
                (sl2 - sl * sl / double(nl)) + (sr2 - sr * sr / double(nr));
            if (sse < best_sse) {
              best_sse = sse;
              best_feature = f;
              best_threshold = thr;
            }
          }
        }
        if (best_feature >= 0) {
          std::vector<std::size_t> left, right;
          for (std::size_t i : idx) {
            (xs[i][std::size_t(best_feature)] <= best_threshold ? left : right)
                .push_back(i);
          }
          node.feature = best_feature;
          node.threshold = best_threshold;
          node.left = int(tree.nodes.size());
          node.right = int(tree.nodes.size()) + 1;
          tree.nodes.emplace_back();
          tree.nodes.emplace_back();
          work.push_back({node.left, std::move(left)});
          work.push_back({node.right, std::move(right)});
          split_done = true;
        }
      }
      (void)split_done;
      tree.nodes[std::size_t(node_idx)] = node;
    }
    trees_.push_back(std::move(tree));
  }
}

ForestSurrogate::Prediction ForestSurrogate::predict(
    const HyperPoint& point) const {
  if (trees_.empty()) {
    throw std::logic_error("surrogate must be fitted before prediction");
  }
  const auto x = point.encode();
  double mean_sum = 0.0, mean_sq = 0.0, leaf_var_sum = 0.0;
  for (const Tree& tree : trees_) {
    int idx = 0;
    while (tree.nodes[std::size_t(idx)].feature >= 0) {
      const Node& n = tree.nodes[std::size_t(idx)];
      idx = x[std::size_t(n.feature)] <= n.threshold ? n.left : n.right;
    }
    const Node& leaf = tree.nodes[std::size_t(idx)];
    mean_sum += leaf.mean;
    mean_sq += leaf.mean * leaf.mean;
    leaf_var_sum += leaf.var;
  }
  const double n = double(trees_.size());
  Prediction p;
  p.mean = mean_sum / n;
  const double across = std::max(0.0, mean_sq / n - p.mean * p.mean);
  p.std = std::sqrt(across + leaf_var_sum / n);
  return p;
}

double expected_improvement(double mean, double std, double y_best) {
  if (std <= 0.0) return std::max(y_best - mean, 0.0);
  const double z = (y_best - mean) / std;
  const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
  const double Phi = 0.5 * std::erfc(-z / std::sqrt(2.0));
  return (y_best - mean) * Phi + std * phi;
}

namespace {

std::array<double, 4> key_of(const HyperPoint& p) { return p.encode(); }

}  // namespace

OptimizeResult optimize(const SearchSpace& space,
                        const std::function<double(const HyperPoint&)>& objective,
                        std::size_t n_max, std::size_t n_init,
                        std::uint64_t seed,
                        std::vector<TrialRecord> resume) {
  if (space.size() == 0) throw std::domain_error("optimize: empty search space");
  if (n_init < 2) throw std::domain_error("optimize: n_init must be >= 2");

  // candidate set: full enumeration, or a seeded sample for huge spaces
  constexpr std::size_t kEnumerationLimit = 100000;
  constexpr std::size_t kSampleCount = 10000;
  std::vector<HyperPoint> candidates;
  std::mt19937_64 rng(seed);
  if (space.size() <= kEnumerationLimit) {
    candidates.reserve(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) candidates.push_back(space.at(i));
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, space.size() - 1);
    candidates.reserve(kSampleCount);
    for (std::size_t i = 0; i < kSampleCount; ++i) {
      candidates.push_back(space.at(pick(rng)));
    }
  }

  OptimizeResult result;
  result.trajectory = std::move(resume);
  std::set<std::array<double, 4>> evaluated;
  double y_best = std::numeric_limits<double>::infinity();
  for (auto& rec : result.trajectory) {
    evaluated.insert(key_of(rec.theta));
    y_best = std::min(y_best, rec.objective);
    result.best_so_far.push_back(y_best);
  }

  auto evaluate = [&](const HyperPoint& theta) {
    TrialRecord rec;
    rec.theta = theta;
    rec.objective = objective(theta);
    rec.iteration = result.trajectory.size();
    if (!std::isfinite(rec.objective)) {
      throw std::domain_error("objective returned a non-finite value");
    }
    result.trajectory.push_back(rec);
    evaluated.insert(key_of(theta));
    y_best = std::min(y_best, rec.objective);
    result.best_so_far.push_back(y_best);
  };

  // seeded random initialization
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  while (result.trajectory.size() < std::min(n_init, n_max)) {
    const HyperPoint theta = candidates[pick(rng)];
    if (evaluated.count(key_of(theta))) continue;
    evaluate(theta);
  }

  // surrogate-guided loop
  while (result.trajectory.size() < n_max) {
    ForestConfig fc;
    fc.seed = seed ^ (0x9e3779b97f4a7c15ULL * (result.trajectory.size() + 1));
    ForestSurrogate surrogate(fc);
    surrogate.fit(result.trajectory);

    // order candidates by (EI descending, lexicographic key ascending)
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const auto pred = surrogate.predict(candidates[i]);
      scored.push_back({expected_improvement(pred.mean, pred.std, y_best), i});
    }
    std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return key_of(candidates[a.second]) < key_of(candidates[b.second]);
    });

    bool proposed = false;
    for (const auto& [ei, idx] : scored) {
      if (evaluated.count(key_of(candidates[idx]))) continue;
      evaluate(candidates[idx]);
      proposed = true;
      break;
    }
    if (!proposed) break;  // space exhausted
  }

  if (result.trajectory.empty()) {
    throw std::domain_error("optimize produced no trials");
  }
  result.best = *std::min_element(
      result.trajectory.begin(), result.trajectory.end(),
      [](const TrialRecord& a, const TrialRecord& b) {
        return a.objective < b.objective;
      });
  return result;
}

double tft_objective(const HyperPoint& theta,
                     std::span<const data::TimeSeriesSample> train_set,
                     std::span<const data::TimeSeriesSample> eval_set,
                     const ObjectiveSettings& settings) {
  try {
    tft::TftConfig cfg = settings.base_config;
    cfg.d_model = std::size_t(theta.d_model);
    cfg.num_heads = std::size_t(theta.num_heads);
    cfg.lstm_layers = std::size_t(theta.lstm_layers);
    cfg.full_attention = theta.full_attention;

    tft::TftModel model(cfg, settings.seed);
    training::TrainSchedule schedule;
    schedule.epochs = settings.budget_epochs;
    schedule.batch_size = settings.batch_size;
    schedule.seed = settings.seed;
    training::train(model, train_set, settings.optimizer, schedule);

    auto metrics = training::evaluate(model, eval_set);
    return std::fabs(metrics.residual_mean) +
           std::sqrt(metrics.residual_variance) + (1.0 - metrics.coverage);
  } catch (const numerics::NumericError&) {
    return settings.divergence_penalty;
  }
}

}  // namespace hpo
