#include <algorithm>
#include <cmath>
#include <random>

#include "data/transient.hpp"
#include "doctest.h"

using data::BreakLocation;
using data::GeneratorConfig;
using data::TransientCase;

namespace {

GeneratorConfig desk_config() {
  GeneratorConfig g;
  g.sample_rate_hz = 0.1;
  g.grid_stride = 10;
  return g;
}

// Local maxima above baseline + prominence, robust to low-amplitude process
// noise: a peak must dominate its +-window neighborhood.
int count_prominent_maxima(const std::vector<double>& s, double baseline,
                           double prominence, std::size_t window) {
  int count = 0;
  for (std::size_t i = window; i + window < s.size(); ++i) {
    if (s[i] < baseline + prominence) continue;
    bool is_peak = true;
    for (std::size_t j = i - window; j <= i + window; ++j) {
      if (j != i && s[j] >= s[i]) {
        is_peak = false;
        break;
      }
    }
    if (is_peak) ++count;
  }
  return count;
}

// first time the series exceeds baseline + threshold, in seconds
double first_excursion_time(const TransientCase& c, const std::string& code,
                            double threshold) {
  const auto& s = c.series(code);
  const double baseline = s.front();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] > baseline + threshold) return c.time_s[i];
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

TEST_CASE("grid arithmetic matches the published step layout") {
  GeneratorConfig full;  // 0.1 : 0.2 : 35.5
  CHECK(full.grid_sizes().size() == 178);
  GeneratorConfig desk = desk_config();
  CHECK(desk.grid_sizes().size() == 18);
  CHECK(full.on_grid(7.5));
  CHECK(full.on_grid(0.1));
  CHECK(full.on_grid(35.5));
  CHECK(!full.on_grid(7.6));
  CHECK(!full.on_grid(36.1));
}

TEST_CASE("corpus counts and unique ids") {
  auto corpus = data::build_corpus(desk_config(), 7);
  CHECK(corpus.size() == 36);
  std::vector<std::string> ids;
  for (const auto& c : corpus) ids.push_back(c.case_id);
  std::sort(ids.begin(), ids.end());
  CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
}

TEST_CASE("generation is deterministic per (location, size, seed)") {
  GeneratorConfig g = desk_config();
  auto a = data::generate_case(BreakLocation::cold_leg, 8.1, 123, g);
  auto b = data::generate_case(BreakLocation::cold_leg, 8.1, 123, g);
  for (const auto& code : a.signal_order) {
    const auto& sa = a.series(code);
    const auto& sb = b.series(code);
    REQUIRE(sa.size() == sb.size());
    for (std::size_t i = 0; i < sa.size(); ++i) CHECK(sa[i] == sb[i]);
  }
  auto c = data::generate_case(BreakLocation::cold_leg, 8.1, 124, g);
  bool any_diff = false;
  for (std::size_t i = 0; i < c.length(); ++i) {
    any_diff = any_diff || c.series("p_155010000")[i] != a.series("p_155010000")[i];
  }
  CHECK(any_diff);
}

TEST_CASE("off-grid sizes are rejected") {
  GeneratorConfig g;
  CHECK_THROWS_AS(data::generate_case(BreakLocation::cold_leg, 7.55, 1, g),
                  std::domain_error);
}

TEST_CASE("7.5 cm cold leg cladding shows exactly two excursion peaks") {
  GeneratorConfig g;  // paper-like rate for shape fidelity
  g.sample_rate_hz = 2.0;
  auto c = data::generate_case(BreakLocation::cold_leg, 7.5, 42, g);
  const auto& clad = c.series("cntrlvar_913");
  // examine the 2000 s post-break window
  const std::size_t i0 = std::size_t(std::llround(g.onset_s * g.sample_rate_hz));
  std::vector<double> post(clad.begin() + i0, clad.end());
  const int peaks = count_prominent_maxima(post, clad.front(), 15.0, 40);
  CHECK(peaks == 2);
}

TEST_CASE("near-null transient at the smallest break") {
  GeneratorConfig g;
  g.sample_rate_hz = 2.0;
  auto c = data::generate_case(BreakLocation::cold_leg, 0.1, 42, g);
  const auto& level = c.series("cntrlvar_2");
  const double initial = level.front();
  for (double v : level) CHECK(v > 0.8 * initial);
}

TEST_CASE("uncovery onset is non-increasing in break size per location") {
  GeneratorConfig g = desk_config();
  for (BreakLocation loc : {BreakLocation::cold_leg, BreakLocation::hot_leg}) {
    double prev = std::numeric_limits<double>::infinity();
    bool started = false;
    for (double size : g.grid_sizes()) {
      if (size < 2.5 || size > 34.5) continue;  // middle-break range
      auto c = data::generate_case(loc, size, 99, g);
      const double onset = first_excursion_time(c, "cntrlvar_913", 50.0);
      if (started) CHECK(onset <= prev + 1e-9);
      prev = onset;
      started = true;
    }
    CHECK(started);
  }
}

TEST_CASE("hot leg cases differ by temperature offset and delayed uncovery") {
  GeneratorConfig g;
  g.sample_rate_hz = 2.0;
  auto cold = data::generate_case(BreakLocation::cold_leg, 7.5, 5, g);
  auto hot = data::generate_case(BreakLocation::hot_leg, 7.5, 5, g);
  // steady-state loop temperature sits higher for the hot-leg analogue
  CHECK(hot.series("cntrlvar_101").front() >
        cold.series("cntrlvar_101").front() + 3.0);
  CHECK(first_excursion_time(hot, "cntrlvar_913", 50.0) >
        first_excursion_time(cold, "cntrlvar_913", 50.0));
}

TEST_CASE("all series share one length and the channel budget holds") {
  GeneratorConfig g = desk_config();
  auto c = data::generate_case(BreakLocation::hot_leg, 14.1, 3, g);
  CHECK(c.signal_order.size() == 16);  // 13 direct analogues + 3 targets
  CHECK(c.length() == g.sample_count());
  for (const auto& code : c.signal_order) {
    CHECK(c.series(code).size() == c.length());
  }
}
