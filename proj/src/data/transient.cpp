#include "data/transient.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace data {

std::string to_string(BreakLocation loc) {
  return loc == BreakLocation::cold_leg ? "cold_leg" : "hot_leg";
}

BreakLocation location_from_string(const std::string& s) {
  if (s == "cold_leg" || s == "cold") return BreakLocation::cold_leg;
  if (s == "hot_leg" || s == "hot") return BreakLocation::hot_leg;
  throw std::domain_error("unknown break location: " + s);
}

std::size_t GeneratorConfig::sample_count() const {
  return std::size_t(std::llround(duration_s * sample_rate_hz)) + 1;
}

std::vector<double> GeneratorConfig::grid_sizes() const {
  std::vector<double> out;
  const int n = int(std::llround((grid_end_cm - grid_start_cm) / grid_step_cm)) + 1;
  for (int i = 0; i < n; i += grid_stride) {
    out.push_back(grid_start_cm + grid_step_cm * i);
  }
  return out;
}

bool GeneratorConfig::on_grid(double size_cm) const {
  const double idx = (size_cm - grid_start_cm) / grid_step_cm;
  const double snapped = grid_start_cm + grid_step_cm * std::round(idx);
  return size_cm >= grid_start_cm - 1e-9 && size_cm <= grid_end_cm + 1e-9 &&
         std::fabs(size_cm - snapped) < 1e-6;
}

const std::vector<double>& TransientCase::series(const std::string& code) const {
  auto it = signals.find(code);
  if (it == signals.end()) {
    throw std::domain_error("case " + case_id + " has no signal " + code);
  }
  return it->second;
}

const std::vector<std::string>& target_signal_codes() {
  static const std::vector<std::string> codes{
      "cntrlvar_2",    // PV water level
      "cntrlvar_101",  // avg temperature of the broken loop
      "cntrlvar_913",  // max cladding temperature
  };
  return codes;
}

const std::vector<std::string>& direct_signal_codes() {
  static const std::vector<std::string> codes{
      "p_155010000",      // reactor coolant pressure
      "tempf_138010000",  // core outlet temperature
      "tempf_250010000",  // broken-loop cold leg temperature
      "voidf_811010000",  // SI tank level
      "p_810010000",      // SI pressure
      "mflowj_811010000", // LHSI pump flow
      "mflowj_806000000", // boron injection flow
      "rktpow",           // average power
      "pmpvel_235",       // broken-loop pump speed
      "mflowj_537000000", // main steam flow
      "p_540010000",      // steam line pressure
      "tempf_505010000",  // main feed water temperature
      "voidf_200010000",  // broken-loop hot leg water level
  };
  return codes;
}

const std::vector<std::string>& all_signal_codes() {
  static const std::vector<std::string> codes = [] {
    std::vector<std::string> v = target_signal_codes();
    const auto& d = direct_signal_codes();
    v.insert(v.end(), d.begin(), d.end());
    return v;
  }();
  return codes;
}

std::string make_case_id(BreakLocation loc, double size_cm) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%05.1fcm",
                loc == BreakLocation::cold_leg ? "cold" : "hot", size_cm);
  return buf;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// rising step centered at t0 with width w, zero for t << t0
double step(double t, double t0, double w) { return logistic((t - t0) / w); }

double bump(double t, double t0, double w) {
  const double z = (t - t0) / w;
  return std::exp(-z * z);
}

// smooth minimum, sharper for smaller tau
double softmin(double a, double b, double tau) {
  const double lo = std::min(a, b);
  return lo - tau * std::log1p(std::exp(-(std::fabs(a - b)) / tau));
}

double saturation_temp(double p_mpa) {
  return 176.0 * std::pow(std::max(p_mpa, 1e-3), 0.246);
}

// Break-size driven event times and amplitudes shared by several channels.
struct Phenomenology {
  double aeff;      // relative break area, (D/10)^2
  double tau_p;     // depressurization time constant
  double t_scram;   // reactor trip on low pressure
  double t_acc;     // accumulator injection start
  double t_lhsi;    // low-head injection start
  double t_unc;     // loop-seal core uncovery onset (middle breaks)
  double t_rec;     // seal clearing / level recovery
  double g_small, g_mid, g_large;  // regime weights
  bool hot;

  explicit Phenomenology(double d_cm, BreakLocation loc) {
    hot = loc == BreakLocation::hot_leg;
    aeff = (d_cm / 10.0) * (d_cm / 10.0);
    tau_p = 178.0 / aeff;
    t_scram = tau_p * std::log(15.35 / 13.05);
    t_acc = tau_p * std::log(15.35 / 4.35);
    t_lhsi = tau_p * std::log(15.35 / 0.85);
    // strictly decreasing in size with gaps above one desk-rate sample
    t_unc = 420.0 + 2850.0 / d_cm + 4.0 * (35.0 - d_cm);
    if (hot) t_unc *= 1.18;  // coolant keeps passing the core: later uncovery
    t_rec = t_unc + 700.0;
    g_small = logistic((2.5 - d_cm) / 0.3);
    g_large = logistic((d_cm - 34.5) / 0.3);
    g_mid = std::max(0.0, 1.0 - g_small - g_large);
  }

  double pressure(double u) const {
    return 0.15 + 15.35 * std::exp(-std::max(0.0, u) / tau_p);
  }
};

}  // namespace

TransientCase generate_case(BreakLocation location, double size_cm,
                            std::uint64_t seed, const GeneratorConfig& config) {
  if (!config.on_grid(size_cm)) {
    char buf[96];
    std::snprintf(buf, sizeof(buf),
                  "break size %.3f cm is off the configured grid", size_cm);
    throw std::domain_error(buf);
  }

  const Phenomenology ph(size_cm, location);
  const double D = size_cm;
  const bool hot = ph.hot;

  const std::size_t n = config.sample_count();
  const double dt = 1.0 / config.sample_rate_hz;

  TransientCase c;
  c.case_id = make_case_id(location, size_cm);
  c.location = location;
  c.break_size_cm = size_cm;
  c.sample_rate_hz = config.sample_rate_hz;
  c.duration_s = config.duration_s;
  c.onset_s = config.onset_s;
  c.time_s.resize(n);
  for (std::size_t i = 0; i < n; ++i) c.time_s[i] = dt * double(i);
  c.signal_order = all_signal_codes();

  // excursion amplitudes (middle-break double peak, large-break single peak);
  // sized to clear the ~330 C initial cladding value even after the coolant
  // baseline has cooled down
  const double amp1 = ph.g_mid * (320.0 + 11.0 * D);
  const double amp2 = 0.75 * amp1;
  const double amp_large = ph.g_large * 520.0;
  const double hot_temp_offset = hot ? 6.0 : 0.0;
  const double uncovery_scale = hot ? 0.85 : 1.0;

  auto clad_bumps = [&](double u) {
    double v = amp1 * uncovery_scale * bump(u, ph.t_unc, 110.0) +
               amp2 * uncovery_scale * bump(u, ph.t_unc + 430.0, 130.0) +
               amp_large * bump(u, 80.0, 60.0);
    return v;
  };

  auto scram_gate = [&](double u) { return step(u, ph.t_scram, 5.0); };

  // PV water level: blowdown drop, accumulator refill, boil-off toward
  // uncovery, recovery once the loop seal clears
  const double d1 = 0.5 * std::pow(ph.aeff / (ph.aeff + 0.08), 0.7);
  const double racc = 0.18 * (ph.g_mid + ph.g_large);
  const double d2 = (0.28 * ph.g_mid + 0.10 * ph.g_large) * (hot ? 0.8 : 1.0);
  const double rfin = 0.32 * (ph.g_mid + ph.g_large);

  auto pv_level = [&](double u) {
    double v = 1.0;
    v -= d1 * step(u, 0.35 * ph.tau_p, 0.25 * ph.tau_p + 20.0);
    v += racc * step(u, ph.t_acc, 60.0);
    v -= d2 * step(u, ph.t_unc - 150.0, 80.0);
    v += rfin * step(u, ph.t_rec, 120.0);
    return v;
  };

  auto base_loop_temp = [&](double u) {
    const double cooldown =
        310.0 - 0.004 * std::max(0.0, u - ph.t_scram) * scram_gate(u);
    double v = softmin(cooldown, saturation_temp(ph.pressure(u)) - 2.0, 4.0);
    v -= 12.0 * bump(u, ph.t_acc + 60.0, 100.0);
    v += 0.12 * clad_bumps(u);
    return v + hot_temp_offset;
  };

  auto series_for = [&](const std::string& code) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = c.time_s[i] - config.onset_s;  // post-break time
      const double p = ph.pressure(u);
      double v = 0.0;
      if (code == "cntrlvar_2") {
        v = pv_level(u);
      } else if (code == "cntrlvar_101") {
        v = base_loop_temp(u);
      } else if (code == "cntrlvar_913") {
        const double coolant = base_loop_temp(u) - hot_temp_offset;
        const double film = 20.0 * (1.0 - scram_gate(u)) +
                            20.0 * scram_gate(u) *
                                std::exp(-std::max(0.0, u - ph.t_scram) / 80.0);
        v = coolant + film + clad_bumps(u);
      } else if (code == "p_155010000") {
        v = p;
      } else if (code == "tempf_138010000") {
        const double cooldown =
            312.0 - 22.0 * step(u, ph.t_scram, 30.0) -
            0.003 * std::max(0.0, u - ph.t_scram) * scram_gate(u);
        v = softmin(cooldown, saturation_temp(p) + 1.0, 4.0) +
            0.35 * clad_bumps(u);
      } else if (code == "tempf_250010000") {
        // once injection runs, the cold leg reads mostly ECCS water
        const double track =
            softmin(291.5 - 0.003 * std::max(0.0, u - ph.t_scram) * scram_gate(u),
                    saturation_temp(p) - 18.0, 4.0);
        const double w_inj = 0.88 * step(u, ph.t_acc, 80.0);
        v = (1.0 - w_inj) * track + w_inj * (55.0 + 0.2 * (track - 55.0));
      } else if (code == "voidf_811010000") {
        v = 1.0 - 0.95 * step(u, ph.t_acc + 150.0, 80.0);
      } else if (code == "p_810010000") {
        // injection-line pressure: accumulator head until the tank empties,
        // then the flat LHSI discharge head
        const double w_empty = step(u, ph.t_acc + 350.0, 80.0);
        v = (1.0 - w_empty) * softmin(4.5, p + 0.25, 0.1) + w_empty * 1.1;
      } else if (code == "mflowj_811010000") {
        v = 85.0 * step(0.9 - p, 0.0, 0.08) * (1.0 + 0.3 * std::max(0.0, 0.9 - p));
      } else if (code == "mflowj_806000000") {
        // flow-limited charging pump: constant once started, tapering late
        v = 45.0 * step(u, ph.t_scram + 25.0, 15.0) *
            (1.0 - 0.3 * step(u, ph.t_scram + 1200.0, 300.0));
      } else if (code == "rktpow") {
        const double g = scram_gate(u);
        const double decay =
            std::pow(1.0 + std::max(0.0, u - ph.t_scram) / 50.0, -0.12);
        v = 3050.0 * ((1.0 - g) + g * 0.062 * decay);
      } else if (code == "pmpvel_235") {
        // slow coastdown against the fast trip transients elsewhere
        v = 1480.0 * std::exp(-std::max(0.0, u - ph.t_scram - 3.0) / 90.0);
      } else if (code == "mflowj_537000000") {
        v = 1650.0 * (1.0 - 0.94 * step(u, ph.t_scram + 5.0, 8.0)) +
            120.0 * bump(u, ph.t_scram + 60.0, 40.0);  // relief valve blip
      } else if (code == "p_540010000") {
        v = 6.8 + 1.3 * step(u, ph.t_scram, 25.0) *
                      std::exp(-std::max(0.0, u - ph.t_scram) / 900.0) -
            2.5 * step(2.0 - p, 0.0, 0.4);
      } else if (code == "tempf_505010000") {
        v = 228.0 - 180.0 * step(u, ph.t_scram + 250.0, 220.0);
      } else if (code == "voidf_200010000") {
        const double t_void = 0.4 * ph.tau_p;
        v = 1.0 - 0.85 * step(u, t_void, 90.0) * (ph.g_mid + ph.g_large) +
            0.5 * step(u, ph.t_rec + 150.0, 200.0) * ph.g_mid;
      } else {
        throw std::domain_error("unknown signal code " + code);
      }
      s[i] = v;
    }
    return s;
  };

  // per-channel noise scale, roughly 0.3% of each channel's dynamic range
  const std::map<std::string, double> noise_sigma{
      {"cntrlvar_2", 0.003},       {"cntrlvar_101", 0.7},
      {"cntrlvar_913", 0.9},       {"p_155010000", 0.05},
      {"tempf_138010000", 0.8},    {"tempf_250010000", 0.7},
      {"voidf_811010000", 0.004},  {"p_810010000", 0.02},
      {"mflowj_811010000", 0.5},   {"mflowj_806000000", 0.3},
      {"rktpow", 9.0},             {"pmpvel_235", 5.0},
      {"mflowj_537000000", 7.0},   {"p_540010000", 0.03},
      {"tempf_505010000", 0.8},    {"voidf_200010000", 0.005},
  };

  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(
                                            std::uint64_t(location) * 7919 +
                                            std::uint64_t(std::llround(size_cm * 10.0)))));
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (const auto& code : c.signal_order) {
    std::vector<double> s = series_for(code);
    const double sigma = noise_sigma.at(code) * config.noise_scale;
    if (sigma > 0.0) {
      // AR(1) process noise, stationary std equal to sigma
      const double rho = 0.9;
      const double drive = sigma * std::sqrt(1.0 - rho * rho);
      double nprev = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        nprev = rho * nprev + drive * gauss(rng);
        s[i] += nprev;
      }
    }
    c.signals[code] = std::move(s);
  }
  return c;
}

std::vector<TransientCase> build_corpus(const GeneratorConfig& config,
                                        std::uint64_t seed) {
  std::vector<TransientCase> out;
  for (BreakLocation loc : {BreakLocation::cold_leg, BreakLocation::hot_leg}) {
    for (double size : config.grid_sizes()) {
      out.push_back(generate_case(loc, size, seed, config));
    }
  }
  return out;
}

}  // namespace data
