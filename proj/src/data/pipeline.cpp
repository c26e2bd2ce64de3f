#include "data/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace data {

const NormStats::Moments& NormStats::of(const std::string& signal) const {
  auto it = by_signal.find(signal);
  if (it == by_signal.end()) {
    throw std::domain_error("no normalization stats for signal " + signal);
  }
  return it->second;
}

double NormStats::normalize(const std::string& signal, double x) const {
  const Moments& m = of(signal);
  return (x - m.mean) / m.std;
}

double NormStats::denormalize(const std::string& signal, double z) const {
  const Moments& m = of(signal);
  return z * m.std + m.mean;
}

NormStats compute_norm_stats(const std::vector<TransientCase>& train_cases,
                             std::vector<std::string>* dropped) {
  if (train_cases.empty()) {
    throw std::domain_error("cannot compute normalization stats without cases");
  }
  NormStats stats;
  for (const auto& code : train_cases.front().signal_order) {
    double sum = 0.0, sumsq = 0.0;
    std::size_t count = 0;
    for (const auto& c : train_cases) {
      for (double v : c.series(code)) {
        sum += v;
        sumsq += v * v;
        ++count;
      }
    }
    const double mean = sum / double(count);
    const double var = std::max(0.0, sumsq / double(count) - mean * mean);
    const double sd = std::sqrt(var);
    if (sd <= 0.0) {
      if (dropped) dropped->push_back(code);
      continue;
    }
    stats.by_signal[code] = {mean, sd};
  }
  return stats;
}

double pearson_r(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::domain_error("pearson_r needs two equal-length series, n >= 2");
  }
  const double n = double(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cab = 0.0, caa = 0.0, cbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    cab += da * db;
    caa += da * da;
    cbb += db * db;
  }
  if (caa <= 0.0 || cbb <= 0.0) {
    throw std::domain_error("pearson_r undefined for a zero-variance series");
  }
  return cab / std::sqrt(caa * cbb);
}

PruneResult pearson_prune(const std::vector<TransientCase>& cases,
                          double threshold) {
  if (cases.empty()) throw std::domain_error("pearson_prune: no cases");

  PruneResult result;
  const auto& targets = target_signal_codes();
  const auto& directs = direct_signal_codes();

  // pooled series per signal, skipping zero-variance channels
  std::map<std::string, std::vector<double>> pooled;
  for (const auto& code : cases.front().signal_order) {
    std::vector<double> s;
    for (const auto& c : cases) {
      const auto& v = c.series(code);
      s.insert(s.end(), v.begin(), v.end());
    }
    const double first = s.front();
    const bool constant =
        std::all_of(s.begin(), s.end(), [&](double v) { return v == first; });
    if (constant) {
      result.warnings.push_back("signal " + code +
                                " has zero variance and was dropped");
      result.dropped.push_back(code);
      continue;
    }
    result.labels.push_back(code);
    pooled[code] = std::move(s);
  }

  const std::size_t m = result.labels.size();
  result.matrix = Matrix(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    result.matrix.at(i, i) = 1.0;
    for (std::size_t j = i + 1; j < m; ++j) {
      const double r =
          pearson_r(pooled.at(result.labels[i]), pooled.at(result.labels[j]));
      result.matrix.at(i, j) = r;
      result.matrix.at(j, i) = r;
    }
  }

  // greedy prune in canonical order; targets are seeded as retained
  std::vector<std::string> retained;
  for (const auto& t : targets) {
    if (pooled.count(t)) retained.push_back(t);
  }
  auto corr = [&](const std::string& a, const std::string& b) {
    const auto ia = std::find(result.labels.begin(), result.labels.end(), a) -
                    result.labels.begin();
    const auto ib = std::find(result.labels.begin(), result.labels.end(), b) -
                    result.labels.begin();
    return result.matrix.at(std::size_t(ia), std::size_t(ib));
  };
  for (const auto& code : directs) {
    if (!pooled.count(code)) continue;  // degenerate, already dropped
    bool keep = true;
    for (const auto& kept : retained) {
      if (std::fabs(corr(code, kept)) > threshold) {
        keep = false;
        break;
      }
    }
    if (keep) {
      retained.push_back(code);
      result.retained_covariates.push_back(code);
    } else {
      result.dropped.push_back(code);
    }
  }
  return result;
}

TimeSeriesSample window(const TransientCase& c, const WindowSpec& spec,
                        std::shared_ptr<const NormStats> norm) {
  if (!norm) throw std::domain_error("window: missing normalization stats");
  const std::size_t t_index =
      std::size_t(std::llround(spec.t_start_s * c.sample_rate_hz));
  if (t_index < spec.k) {
    throw std::domain_error("window: not enough history before t_start");
  }
  if (t_index + spec.tau_max >= c.length()) {
    throw std::domain_error("window: horizon extends past the case end");
  }

  TimeSeriesSample s;
  s.case_id = c.case_id;
  s.t_index = t_index;
  s.target = spec.target;
  s.norm = norm;

  if (spec.include_statics) {
    const double span = spec.size01_max - spec.size01_min;
    s.statics = {c.location == BreakLocation::cold_leg ? 1.0 : 0.0,
                 c.location == BreakLocation::hot_leg ? 1.0 : 0.0,
                 (c.break_size_cm - spec.size01_min) / span};
  }

  const auto& y = c.series(spec.target);
  s.y_hist.resize(spec.k + 1);
  for (std::size_t i = 0; i <= spec.k; ++i) {
    s.y_hist[i] = norm->normalize(spec.target, y[t_index - spec.k + i]);
  }
  s.y_future.resize(spec.tau_max);
  for (std::size_t i = 0; i < spec.tau_max; ++i) {
    s.y_future[i] = norm->normalize(spec.target, y[t_index + 1 + i]);
  }

  s.z_hist = Matrix(spec.k + 1, spec.covariates.size());
  for (std::size_t j = 0; j < spec.covariates.size(); ++j) {
    const auto& z = c.series(spec.covariates[j]);
    for (std::size_t i = 0; i <= spec.k; ++i) {
      s.z_hist.at(i, j) =
          norm->normalize(spec.covariates[j], z[t_index - spec.k + i]);
    }
  }

  // future covariate: elapsed time since transient onset, scaled so the
  // post-break window maps onto [0, 1]
  const double span_s = c.duration_s - c.onset_s;
  s.x_all = Matrix(spec.k + 1 + spec.tau_max, 1);
  for (std::size_t i = 0; i < s.x_all.rows; ++i) {
    const double t = c.time_s[t_index - spec.k + i];
    s.x_all.at(i, 0) = (t - c.onset_s) / span_s;
  }
  return s;
}

TimeSeriesSample inject_noise(const TimeSeriesSample& sample, double snr_db,
                              std::uint64_t seed,
                              std::vector<std::string>* warnings) {
  TimeSeriesSample out = sample;
  if (std::isinf(snr_db) && snr_db > 0.0) return out;
  if (!std::isfinite(snr_db)) {
    throw std::domain_error("inject_noise: snr_db must be finite or +inf");
  }
  const double ratio = std::pow(10.0, snr_db / 10.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto corrupt = [&](std::vector<double>& channel, const std::string& name) {
    double power = 0.0;
    for (double v : channel) power += v * v;
    power /= double(channel.size());
    if (power == 0.0) {
      if (warnings) {
        warnings->push_back("channel " + name +
                            " is all-zero; no noise injected");
      }
      return;
    }
    const double sigma = std::sqrt(power / ratio);
    for (double& v : channel) v += sigma * gauss(rng);
  };

  corrupt(out.y_hist, "y:" + sample.target);
  for (std::size_t j = 0; j < out.z_hist.cols; ++j) {
    std::vector<double> col(out.z_hist.rows);
    for (std::size_t i = 0; i < out.z_hist.rows; ++i) col[i] = out.z_hist.at(i, j);
    corrupt(col, "z[" + std::to_string(j) + "]");
    for (std::size_t i = 0; i < out.z_hist.rows; ++i) out.z_hist.at(i, j) = col[i];
  }
  return out;
}

SplitResult split_cases(const std::vector<TransientCase>& corpus,
                        double train_frac, std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw std::domain_error("train_frac must lie in (0,1)");
  }
  std::vector<std::size_t> idx(corpus.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const std::size_t n_train = std::size_t(double(corpus.size()) * train_frac);
  if (n_train == 0 || n_train == corpus.size()) {
    throw std::domain_error("split would leave one side empty");
  }
  SplitResult r;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto& side = i < n_train ? r.train_ids : r.test_ids;
    side.push_back(corpus[idx[i]].case_id);
  }
  std::sort(r.train_ids.begin(), r.train_ids.end());
  std::sort(r.test_ids.begin(), r.test_ids.end());
  return r;
}

}  // namespace data
