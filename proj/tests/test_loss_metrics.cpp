#include <cmath>
#include <random>

#include "doctest.h"
#include "model_testutil.hpp"
#include "training/loss.hpp"
#include "training/metrics.hpp"

using numerics::Tensor;
using training::ForecastPair;
using training::quantile_loss;

TEST_CASE("pinball loss evaluates the formula directly") {
  CHECK(quantile_loss(1.0, 1.0, 0.1) == 0.0);
  CHECK(quantile_loss(1.0, 1.0, 0.9) == 0.0);
  CHECK(quantile_loss(2.0, 1.0, 0.9) == doctest::Approx(0.9));
  CHECK(quantile_loss(1.0, 2.0, 0.9) == doctest::Approx(0.1));
  CHECK_THROWS_AS(quantile_loss(1.0, 2.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(quantile_loss(1.0, 2.0, 1.0), std::domain_error);
}

TEST_CASE("median pinball equals half the absolute error") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double y = d(rng), yhat = d(rng);
    CHECK(quantile_loss(y, yhat, 0.5) ==
          doctest::Approx(0.5 * std::fabs(y - yhat)).epsilon(1e-12));
  }
}

TEST_CASE("aggregate loss on hand-evaluated cases") {
  const std::vector<double> quantiles{0.5};
  {
    std::vector<double> truth{3.0};
    std::vector<double> forecast{1.0};
    ForecastPair pair{truth, forecast};
    auto report = training::aggregate_loss({&pair, 1}, quantiles);
    CHECK(report.total == doctest::Approx(1.0));  // 0.5 * 2 / (1*1)
  }
  {
    const std::vector<double> q3{0.1, 0.5, 0.9};
    std::vector<double> truth{1.0, 2.0};
    std::vector<double> perfect{1.0, 1.0, 1.0, 2.0, 2.0, 2.0};
    ForecastPair pair{truth, perfect};
    auto report = training::aggregate_loss({&pair, 1}, q3);
    CHECK(report.total == 0.0);
  }
}

TEST_CASE("duplicating every sample leaves the aggregate loss unchanged") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  const std::vector<double> quantiles{0.1, 0.5, 0.9};
  const std::size_t tau = 5;
  std::vector<std::vector<double>> truths(3), forecasts(3);
  for (std::size_t s = 0; s < 3; ++s) {
    truths[s].resize(tau);
    forecasts[s].resize(tau * 3);
    for (double& v : truths[s]) v = d(rng);
    for (double& v : forecasts[s]) v = d(rng);
  }
  std::vector<ForecastPair> batch, doubled;
  for (std::size_t s = 0; s < 3; ++s) batch.push_back({truths[s], forecasts[s]});
  doubled = batch;
  doubled.insert(doubled.end(), batch.begin(), batch.end());
  const double a = training::aggregate_loss(batch, quantiles).total;
  const double b = training::aggregate_loss(doubled, quantiles).total;
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
  CHECK(a >= 0.0);
}

TEST_CASE("empty batch is a domain error") {
  CHECK_THROWS_AS(training::aggregate_loss({}, std::vector<double>{0.5}),
                  std::domain_error);
}

TEST_CASE("report decomposes into per-quantile parts") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const std::vector<double> quantiles{0.1, 0.5, 0.9};
  std::vector<double> truth(4), forecast(12);
  for (double& v : truth) v = d(rng);
  for (double& v : forecast) v = d(rng);
  ForecastPair pair{truth, forecast};
  auto report = training::aggregate_loss({&pair, 1}, quantiles);
  double sum = 0.0;
  for (const auto& [q, v] : report.per_quantile) sum += v;
  CHECK(report.total == doctest::Approx(sum).epsilon(1e-12));
  CHECK(report.n_samples == 1);
  CHECK(report.tau_max == 4);
}

TEST_CASE("graph loss agrees with the scalar path and its subgradient") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  const std::vector<double> quantiles{0.1, 0.5, 0.9};
  const std::size_t tau = 6;
  std::vector<double> truth(tau);
  std::vector<double> values(tau * 3);
  for (double& v : truth) v = d(rng);
  for (double& v : values) v = d(rng);
  // keep every prediction away from the pinball kink
  for (std::size_t step = 0; step < tau; ++step) {
    for (std::size_t qi = 0; qi < 3; ++qi) {
      double& v = values[step * 3 + qi];
      if (std::fabs(v - truth[step]) < 1e-2) v += 5e-2;
    }
  }

  Tensor forecast = Tensor::from({tau, 3}, values, true);
  Tensor loss = training::pinball_sum_graph(forecast, truth, quantiles);

  ForecastPair pair{truth, values};
  auto report = training::aggregate_loss({&pair, 1}, quantiles);
  CHECK(loss.value() / double(tau) == doctest::Approx(report.total).epsilon(1e-12));

  forecast.zero_grad();
  training::pinball_sum_graph(forecast, truth, quantiles).backward();
  for (std::size_t step = 0; step < tau; ++step) {
    for (std::size_t qi = 0; qi < 3; ++qi) {
      const double q = quantiles[qi];
      const double yhat = forecast.data()[step * 3 + qi];
      const double expected = yhat < truth[step] ? -q : (1.0 - q);
      CHECK(forecast.grad()[step * 3 + qi] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("metrics on an exact forecast with a padded band") {
  tft::TftConfig cfg = testutil::tiny_config();
  std::mt19937_64 rng(17);
  auto sample = testutil::random_sample(cfg, rng);
  training::SampleForecast sf;
  sf.sample = &sample;
  for (double y : sample.y_future) {
    sf.values.push_back(y - 1.0);
    sf.values.push_back(y);
    sf.values.push_back(y + 1.0);
  }
  auto metrics = training::evaluate_forecasts({&sf, 1}, cfg.quantiles);
  CHECK(metrics.residual_mean == 0.0);
  CHECK(metrics.residual_variance == 0.0);
  CHECK(metrics.coverage == 1.0);
  CHECK(metrics.crossing_rate == 0.0);
  REQUIRE(metrics.per_case.size() == 1);
  CHECK(metrics.per_case[0].coverage == 1.0);
}

TEST_CASE("coverage uses a closed interval at the band edges") {
  tft::TftConfig cfg = testutil::tiny_config();
  std::mt19937_64 rng(19);
  auto sample = testutil::random_sample(cfg, rng);
  training::SampleForecast sf;
  sf.sample = &sample;
  for (double y : sample.y_future) {
    sf.values.push_back(y);
    sf.values.push_back(y);
    sf.values.push_back(y);
  }
  auto metrics = training::evaluate_forecasts({&sf, 1}, cfg.quantiles);
  CHECK(metrics.coverage == 1.0);
  CHECK(metrics.crossing_rate == 0.0);
}

TEST_CASE("coverage and crossings match a brute-force count") {
  tft::TftConfig cfg = testutil::tiny_config();
  cfg.tau_max = 25;
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<data::TimeSeriesSample> samples;
  std::vector<training::SampleForecast> forecasts;
  samples.reserve(4);
  for (int s = 0; s < 4; ++s) samples.push_back(testutil::random_sample(cfg, rng));
  for (int s = 0; s < 4; ++s) {
    training::SampleForecast sf;
    sf.sample = &samples[s];
    for (std::size_t i = 0; i < cfg.tau_max * 3; ++i) sf.values.push_back(d(rng));
    forecasts.push_back(std::move(sf));
  }
  auto metrics = training::evaluate_forecasts(forecasts, cfg.quantiles);

  // independent oracle: literal counting
  std::size_t covered = 0, crossed = 0, n = 0;
  double sum = 0.0, sumsq = 0.0;
  for (const auto& sf : forecasts) {
    for (std::size_t i = 0; i < cfg.tau_max; ++i) {
      const double lo = sf.values[i * 3 + 0];
      const double mid = sf.values[i * 3 + 1];
      const double hi = sf.values[i * 3 + 2];
      const double y = sf.sample->y_future[i];
      if (y >= lo && y <= hi) ++covered;
      if (!(lo <= mid && mid <= hi)) ++crossed;
      sum += mid - y;
      sumsq += (mid - y) * (mid - y);
      ++n;
    }
  }
  CHECK(metrics.n_points == n);
  CHECK(metrics.coverage == doctest::Approx(double(covered) / double(n)));
  CHECK(metrics.crossing_rate == doctest::Approx(double(crossed) / double(n)));
  const double mean = sum / double(n);
  CHECK(metrics.residual_mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(metrics.residual_variance ==
        doctest::Approx(sumsq / double(n) - mean * mean).epsilon(1e-10));
}

TEST_CASE("empty test set is a domain error") {
  CHECK_THROWS_AS(
      training::evaluate_forecasts({}, std::vector<double>{0.1, 0.5, 0.9}),
      std::domain_error);
}
