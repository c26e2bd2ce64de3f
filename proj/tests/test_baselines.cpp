#include <cmath>
#include <random>

#include "baselines/compare.hpp"
#include "baselines/recurrent.hpp"
#include "doctest.h"
#include "model_testutil.hpp"
#include "training/metrics.hpp"

using baselines::BaselineConfig;
using baselines::CellKind;
using numerics::Tensor;

namespace {

BaselineConfig small_config(CellKind kind, bool block) {
  BaselineConfig cfg;
  cfg.cell = kind;
  cfg.block_mode = block;
  cfg.hidden = 4;
  cfg.layers = 1;
  cfg.k = 4;
  cfg.tau_max = 3;
  cfg.m_z = 2;
  return cfg;
}

tft::TftConfig matching_tft_config() {
  tft::TftConfig cfg = testutil::tiny_config();
  cfg.k = 4;
  cfg.tau_max = 3;
  cfg.m_z = 2;
  return cfg;
}

// truth +- pad at the outer quantiles, exact at the median
class OracleForecaster : public training::Forecaster {
 public:
  explicit OracleForecaster(double pad) : pad_(pad) {}
  numerics::Tensor forward_graph(
      const data::TimeSeriesSample& sample) const override {
    std::vector<double> v;
    for (double y : sample.y_future) {
      v.push_back(y - pad_);
      v.push_back(y);
      v.push_back(y + pad_);
    }
    return Tensor::from({sample.y_future.size(), 3}, std::move(v));
  }
  std::span<numerics::NamedParam> parameters() override { return {}; }
  std::span<const double> quantiles() const override { return quantiles_; }

 private:
  double pad_;
  std::vector<double> quantiles_{0.1, 0.5, 0.9};
};

}  // namespace

TEST_CASE("zero heads produce an all-zero forecast") {
  std::mt19937_64 rng(3);
  for (bool block : {true, false}) {
    for (CellKind kind : {CellKind::elman, CellKind::gru, CellKind::lstm}) {
      BaselineConfig cfg = small_config(kind, block);
      auto params = baselines::init_baseline_params(cfg, 7);
      if (block) {
        for (double& v : params.block_w.mutable_data()) v = 0.0;
        for (double& v : params.block_b.mutable_data()) v = 0.0;
      } else {
        for (double& v : params.step_w.mutable_data()) v = 0.0;
        for (double& v : params.step_b.mutable_data()) v = 0.0;
      }
      auto sample = testutil::random_sample(matching_tft_config(), rng);
      Tensor out = baselines::baseline_forward(sample, params, cfg);
      for (double v : out.data()) CHECK(v == 0.0);
    }
  }
}

TEST_CASE("block mode emits the full horizon in one shot") {
  std::mt19937_64 rng(5);
  for (CellKind kind : {CellKind::elman, CellKind::gru, CellKind::lstm}) {
    BaselineConfig cfg = small_config(kind, true);
    baselines::BaselineModel model(cfg, 11);
    auto sample = testutil::random_sample(matching_tft_config(), rng);
    Tensor out = model.forward_graph(sample);
    CHECK(out.rows() == cfg.tau_max);
    CHECK(out.cols() == 3);
    // purity
    Tensor again = model.forward_graph(sample);
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out.data()[i] == again.data()[i]);
    }
  }
}

TEST_CASE("every cell kind passes the finite-difference gradient check") {
  std::mt19937_64 rng(7);
  for (bool block : {true, false}) {
    for (CellKind kind : {CellKind::elman, CellKind::gru, CellKind::lstm}) {
      BaselineConfig cfg = small_config(kind, block);
      baselines::BaselineModel model(cfg, 13);
      auto sample = testutil::random_sample(matching_tft_config(), rng);
      Tensor proj = testutil::random_tensor({cfg.tau_max, 3}, rng, false);
      auto graph = [&] {
        return numerics::sum_all(
            numerics::hadamard(model.forward_graph(sample), proj));
      };
      auto loss = [&] { return graph().value(); };
      auto params = model.parameters();
      for (auto& p : params) p.tensor.zero_grad();
      graph().backward();
      for (auto& p : params) {
        const double worst = testutil::gradcheck_elements(p.tensor, loss, rng, 3);
        CAPTURE(to_string(kind));
        CAPTURE(p.path);
        CHECK(worst < 1e-4);
      }
    }
  }
}

TEST_CASE("static covariates are not consumed") {
  std::mt19937_64 rng(17);
  BaselineConfig cfg = small_config(CellKind::gru, true);
  baselines::BaselineModel model(cfg, 19);
  auto sample = testutil::random_sample(matching_tft_config(), rng);
  Tensor before = model.forward_graph(sample);
  auto altered = sample;
  for (double& v : altered.statics) v += 10.0;
  Tensor after = model.forward_graph(altered);
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(before.data()[i] == after.data()[i]);
  }
}

TEST_CASE("comparison rows: oracle dominates and duplicates agree") {
  std::mt19937_64 rng(23);
  tft::TftConfig scfg = matching_tft_config();
  std::vector<data::TimeSeriesSample> train, test;
  for (int i = 0; i < 6; ++i) train.push_back(testutil::random_sample(scfg, rng));
  for (int i = 0; i < 3; ++i) test.push_back(testutil::random_sample(scfg, rng));

  auto lstm_factory = [] {
    BaselineConfig cfg = small_config(CellKind::lstm, true);
    return std::make_unique<baselines::BaselineModel>(cfg, 31);
  };
  std::vector<baselines::ModelSpec> specs;
  specs.push_back({"oracle", [] { return std::make_unique<OracleForecaster>(0.5); }});
  specs.push_back({"block_lstm", lstm_factory});
  specs.push_back({"block_lstm_again", lstm_factory});

  numerics::OptimizerConfig opt;
  opt.weight_decay = 0.0;
  training::TrainSchedule schedule;
  schedule.epochs = 3;
  schedule.batch_size = 2;
  schedule.seed = 5;
  auto rows = baselines::compare(specs, "y", train, test, opt, schedule);
  REQUIRE(rows.size() == 3);

  CHECK(rows[0].residual_mean == 0.0);
  CHECK(rows[0].residual_variance == 0.0);
  CHECK(rows[0].coverage == 1.0);
  CHECK(rows[0].rank_mean == 1);
  CHECK(rows[0].rank_variance == 1);
  CHECK(rows[0].rank_coverage == 1);

  // identical spec registered twice yields identical rows
  CHECK(rows[1].residual_mean == rows[2].residual_mean);
  CHECK(rows[1].residual_variance == rows[2].residual_variance);
  CHECK(rows[1].coverage == rows[2].coverage);
  CHECK(rows[1].pinball == rows[2].pinball);

  for (const auto& r : rows) {
    CHECK(r.target == "y");
    CHECK(r.rank_mean >= 1);
    CHECK(r.rank_mean <= 3);
  }
}
