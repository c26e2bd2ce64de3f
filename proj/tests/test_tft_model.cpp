#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "model_testutil.hpp"
#include "tft/checkpoint.hpp"
#include "tft/model.hpp"

using numerics::Tensor;
using testutil::rel_err;

namespace {

tft::TftConfig random_search_space_config(std::mt19937_64& rng) {
  tft::TftConfig cfg = testutil::tiny_config();
  cfg.d_model = std::uniform_int_distribution<std::size_t>(8, 128)(rng);
  cfg.num_heads = std::uniform_int_distribution<std::size_t>(1, 16)(rng);
  cfg.lstm_layers = std::uniform_int_distribution<std::size_t>(1, 16)(rng);
  cfg.full_attention = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
  return cfg;
}

}  // namespace

TEST_CASE("forward is pure: identical calls are bit-identical") {
  tft::TftConfig cfg = testutil::tiny_config();
  tft::TftParams params = tft::init_params(cfg, 7);
  std::mt19937_64 rng(11);
  auto sample = testutil::random_sample(cfg, rng);
  Tensor a = tft::forward_graph(sample, params, cfg);
  Tensor b = tft::forward_graph(sample, params, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.data()[i] == b.data()[i]);
}

TEST_CASE("forward is numerically continuous in its inputs") {
  tft::TftConfig cfg = testutil::tiny_config();
  tft::TftParams params = tft::init_params(cfg, 13);
  std::mt19937_64 rng(17);
  auto sample = testutil::random_sample(cfg, rng);
  Tensor before = tft::forward_graph(sample, params, cfg);
  auto perturbed = sample;
  perturbed.y_hist[2] += 1e-7;
  Tensor after = tft::forward_graph(perturbed, params, cfg);
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(std::fabs(after.data()[i] - before.data()[i]) < 1e-3);
  }
}

TEST_CASE("published hyperparameter choice passes the shape audit") {
  tft::TftConfig cfg = testutil::tiny_config();
  cfg.d_model = 123;
  cfg.num_heads = 11;
  cfg.lstm_layers = 15;
  cfg.full_attention = false;
  tft::TftParams params = tft::init_params(cfg, 1);
  CHECK_NOTHROW(tft::audit_shapes(params, cfg));
}

TEST_CASE("audit rejects a mismatched parameter shape") {
  tft::TftConfig cfg = testutil::tiny_config();
  tft::TftParams params = tft::init_params(cfg, 2);
  std::mt19937_64 rng(3);
  params.attn_value_w = Tensor::glorot(cfg.d_model + 1, cfg.d_model, rng);
  CHECK_THROWS_AS(tft::audit_shapes(params, cfg), std::invalid_argument);
}

TEST_CASE("forward works across random draws from the search space") {
  std::mt19937_64 rng(2025);
  for (int trial = 0; trial < 10; ++trial) {
    tft::TftConfig cfg = random_search_space_config(rng);
    tft::TftParams params = tft::init_params(cfg, 100 + trial);
    CHECK_NOTHROW(tft::audit_shapes(params, cfg));
    auto sample = testutil::random_sample(cfg, rng);
    Tensor out = tft::forward_graph(sample, params, cfg);
    CHECK(out.rows() == cfg.tau_max);
    CHECK(out.cols() == cfg.quantiles.size());
    for (double v : out.data()) CHECK(std::isfinite(v));
  }
}

TEST_CASE("causal mask: later future inputs cannot move earlier forecasts") {
  tft::TftConfig cfg = testutil::tiny_config();
  cfg.full_attention = false;
  cfg.tau_max = 5;
  tft::TftParams params = tft::init_params(cfg, 19);
  std::mt19937_64 rng(23);
  auto sample = testutil::random_sample(cfg, rng);
  Tensor before = tft::forward_graph(sample, params, cfg);

  // perturb the known future covariate at the last horizon step
  auto perturbed = sample;
  perturbed.x_all.at(perturbed.x_all.rows - 1, 0) += 3.0;
  Tensor after = tft::forward_graph(perturbed, params, cfg);

  for (std::size_t step = 0; step + 1 < cfg.tau_max; ++step) {
    for (std::size_t qi = 0; qi < cfg.quantiles.size(); ++qi) {
      CHECK(std::fabs(after.at(step, qi) - before.at(step, qi)) <= 1e-10);
    }
  }
  // the perturbed step itself must react (sanity that the probe is live)
  bool moved = false;
  for (std::size_t qi = 0; qi < cfg.quantiles.size(); ++qi) {
    moved = moved || std::fabs(after.at(cfg.tau_max - 1, qi) -
                               before.at(cfg.tau_max - 1, qi)) > 1e-12;
  }
  CHECK(moved);
}

TEST_CASE("full attention propagates future inputs backwards in time") {
  tft::TftConfig cfg = testutil::tiny_config();
  cfg.full_attention = true;
  cfg.tau_max = 5;
  tft::TftParams params = tft::init_params(cfg, 29);
  std::mt19937_64 rng(31);
  auto sample = testutil::random_sample(cfg, rng);
  Tensor before = tft::forward_graph(sample, params, cfg);
  auto perturbed = sample;
  perturbed.x_all.at(perturbed.x_all.rows - 1, 0) += 3.0;
  Tensor after = tft::forward_graph(perturbed, params, cfg);
  bool any_earlier_moved = false;
  for (std::size_t step = 0; step + 1 < cfg.tau_max; ++step) {
    for (std::size_t qi = 0; qi < cfg.quantiles.size(); ++qi) {
      any_earlier_moved = any_earlier_moved ||
                          std::fabs(after.at(step, qi) - before.at(step, qi)) > 1e-12;
    }
  }
  CHECK(any_earlier_moved);
}

TEST_CASE("full-model gradients match finite differences per block") {
  tft::TftConfig cfg = testutil::tiny_config();
  tft::TftParams params = tft::init_params(cfg, 37);
  std::mt19937_64 rng(41);
  auto sample = testutil::random_sample(cfg, rng);
  Tensor proj = testutil::random_tensor({cfg.tau_max, cfg.quantiles.size()},
                                        rng, false);
  auto graph = [&] {
    return numerics::sum_all(
        numerics::hadamard(tft::forward_graph(sample, params, cfg), proj));
  };
  auto loss = [&] { return graph().value(); };

  auto registry = tft::named_params(params, cfg);
  for (auto& p : registry) p.tensor.zero_grad();
  graph().backward();

  // a representative tensor from every block
  std::vector<std::string> picks{
      "static_select.embed",        "static_select.sel_grn.w_hidden",
      "static_proj",                "hist_select.embed",
      "hist_select.var_grn.w_out",  "hist_select.sel_grn.skip_w",
      "future_select.embed",        "lstm.0.w_x",
      "lstm.0.w_h",                 "lstm.0.b",
      "seq_gate.gate_w",            "seq_norm.gain",
      "enrich.w_context",           "attention.head0.w_q",
      "attention.head1.w_k",        "attention.w_v",
      "decoder.gate_attn.value_w",  "decoder.grn.w_hidden",
      "decoder.gate_ff.gate_w",     "decoder.norm_ff.bias",
      "head.q0.w",                  "head.q2.b"};
  for (const auto& path : picks) {
    auto it = std::find_if(registry.begin(), registry.end(),
                           [&](const auto& p) { return p.path == path; });
    REQUIRE_MESSAGE(it != registry.end(), path);
    const double worst = testutil::gradcheck_elements(it->tensor, loss, rng, 3);
    CAPTURE(path);
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("ablated static pathway still runs and audits") {
  tft::TftConfig cfg = testutil::tiny_config();
  cfg.m_s = 0;
  tft::TftParams params = tft::init_params(cfg, 43);
  CHECK_NOTHROW(tft::audit_shapes(params, cfg));
  std::mt19937_64 rng(47);
  auto sample = testutil::random_sample(cfg, rng);
  CHECK(sample.statics.empty());
  Tensor out = tft::forward_graph(sample, params, cfg);
  CHECK(out.rows() == cfg.tau_max);
}

TEST_CASE("mismatched input shapes report the failing stage") {
  tft::TftConfig cfg = testutil::tiny_config();
  tft::TftParams params = tft::init_params(cfg, 53);
  std::mt19937_64 rng(59);
  auto sample = testutil::random_sample(cfg, rng);
  sample.y_hist.push_back(0.0);
  try {
    (void)tft::forward_graph(sample, params, cfg);
    FAIL("expected ShapeError");
  } catch (const numerics::ShapeError& e) {
    CHECK(std::string(e.what()).find("forward/input") != std::string::npos);
  }
}

TEST_CASE("denormalized forecast carries physical units") {
  tft::TftConfig cfg = testutil::tiny_config();
  tft::TftParams params = tft::init_params(cfg, 61);
  std::mt19937_64 rng(67);
  auto sample = testutil::random_sample(cfg, rng);
  auto norm = std::make_shared<data::NormStats>();
  norm->by_signal["y"] = {10.0, 4.0};
  sample.norm = norm;
  Tensor normalized = tft::forward_graph(sample, params, cfg);
  auto forecast = tft::forward(sample, params, cfg);
  CHECK(forecast.values.rows == cfg.tau_max);
  CHECK(forecast.quantiles == cfg.quantiles);
  for (std::size_t i = 0; i < cfg.tau_max; ++i) {
    for (std::size_t j = 0; j < cfg.quantiles.size(); ++j) {
      CHECK(forecast.values.at(i, j) ==
            doctest::Approx(normalized.at(i, j) * 4.0 + 10.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("checkpoint save/load round-trips parameters losslessly") {
  tft::TftConfig cfg = testutil::tiny_config();
  tft::Checkpoint ckpt;
  ckpt.config = cfg;
  ckpt.params = tft::init_params(cfg, 71);
  ckpt.norm.by_signal["cntrlvar_2"] = {1.0 / 3.0, 0.123456789012345678};
  ckpt.target = "cntrlvar_2";
  ckpt.covariates = {"p_155010000", "rktpow"};
  ckpt.init_seed = 71;

  const auto file = std::filesystem::temp_directory_path() / "tft_ckpt_test.json";
  tft::save_checkpoint(file, ckpt);
  auto loaded = tft::load_checkpoint(file);

  CHECK(loaded.target == ckpt.target);
  CHECK(loaded.covariates == ckpt.covariates);
  CHECK(loaded.config.d_model == cfg.d_model);
  CHECK(loaded.norm.of("cntrlvar_2").std == 0.123456789012345678);

  auto a = tft::named_params(ckpt.params, cfg);
  auto b = tft::named_params(loaded.params, loaded.config);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].path == b[i].path);
    REQUIRE(a[i].tensor.size() == b[i].tensor.size());
    for (std::size_t j = 0; j < a[i].tensor.size(); ++j) {
      CHECK(a[i].tensor.data()[j] == b[i].tensor.data()[j]);
    }
  }
  std::filesystem::remove(file);
}
