#include "baselines/recurrent.hpp"

#include <stdexcept>

namespace baselines {

using numerics::Tensor;

std::string to_string(CellKind kind) {
  switch (kind) {
    case CellKind::elman: return "rnn";
    case CellKind::gru: return "gru";
    default: return "lstm";
  }
}

CellKind cell_from_string(const std::string& s) {
  if (s == "rnn" || s == "elman") return CellKind::elman;
  if (s == "gru") return CellKind::gru;
  if (s == "lstm") return CellKind::lstm;
  throw std::domain_error("unknown recurrent cell kind: " + s);
}

void BaselineConfig::validate() const {
  if (hidden < 1) throw std::invalid_argument("hidden size must be >= 1");
  if (layers < 1) throw std::invalid_argument("layer count must be >= 1");
  if (k < 1 || tau_max < 1) {
    throw std::invalid_argument("k and tau_max must be >= 1");
  }
  if (quantiles.empty()) throw std::invalid_argument("quantile set is empty");
}

namespace {

std::size_t gate_multiple(CellKind kind) {
  switch (kind) {
    case CellKind::elman: return 1;
    case CellKind::gru: return 3;
    default: return 4;
  }
}

struct CellState {
  Tensor h;
  Tensor c;  // lstm only
};

// One recurrent step; x is 1 x in.
CellState cell_step(const Tensor& x, const CellState& prev, const Tensor& w_x,
                    const BaselineLayerWeights& w, CellKind kind,
                    std::size_t hidden) {
  CellState next;
  if (kind == CellKind::elman) {
    Tensor pre = numerics::add_rowvec(
        numerics::add(numerics::matmul(x, w_x), numerics::matmul(prev.h, w.w_h)),
        w.b);
    next.h = numerics::tanh(pre);
    return next;
  }
  if (kind == CellKind::gru) {
    // packing: [update z | reset r | candidate]
    Tensor xin = numerics::matmul(x, w_x);
    Tensor hin = numerics::matmul(prev.h, w.w_h);
    Tensor z = numerics::sigmoid(numerics::add_rowvec(
        numerics::add(numerics::slice_cols(xin, 0, hidden),
                      numerics::slice_cols(hin, 0, hidden)),
        numerics::slice_cols(w.b, 0, hidden)));
    Tensor r = numerics::sigmoid(numerics::add_rowvec(
        numerics::add(numerics::slice_cols(xin, hidden, 2 * hidden),
                      numerics::slice_cols(hin, hidden, 2 * hidden)),
        numerics::slice_cols(w.b, hidden, 2 * hidden)));
    Tensor cand = numerics::tanh(numerics::add_rowvec(
        numerics::add(numerics::slice_cols(xin, 2 * hidden, 3 * hidden),
                      numerics::hadamard(
                          r, numerics::slice_cols(hin, 2 * hidden, 3 * hidden))),
        numerics::slice_cols(w.b, 2 * hidden, 3 * hidden)));
    Tensor keep = numerics::hadamard(z, prev.h);
    Tensor ones = Tensor::full({1, hidden}, 1.0);
    Tensor take = numerics::hadamard(numerics::sub(ones, z), cand);
    next.h = numerics::add(keep, take);
    return next;
  }
  // lstm, packing (i, f, g, o)
  Tensor gates = numerics::add_rowvec(
      numerics::add(numerics::matmul(x, w_x), numerics::matmul(prev.h, w.w_h)),
      w.b);
  Tensor i_g = numerics::sigmoid(numerics::slice_cols(gates, 0, hidden));
  Tensor f_g = numerics::sigmoid(numerics::slice_cols(gates, hidden, 2 * hidden));
  Tensor g_g = numerics::tanh(numerics::slice_cols(gates, 2 * hidden, 3 * hidden));
  Tensor o_g = numerics::sigmoid(numerics::slice_cols(gates, 3 * hidden, 4 * hidden));
  next.c = numerics::add(numerics::hadamard(f_g, prev.c),
                         numerics::hadamard(i_g, g_g));
  next.h = numerics::hadamard(o_g, numerics::tanh(next.c));
  return next;
}

CellState initial_state(CellKind kind, std::size_t hidden) {
  CellState s;
  s.h = Tensor::zeros({1, hidden});
  if (kind == CellKind::lstm) s.c = Tensor::zeros({1, hidden});
  return s;
}

}  // namespace

BaselineParams init_baseline_params(const BaselineConfig& config,
                                    std::uint64_t seed) {
  config.validate();
  const std::size_t g = gate_multiple(config.cell);
  const std::size_t h = config.hidden;
  std::mt19937_64 rng(seed);
  BaselineParams p;
  p.layers.resize(config.layers);
  for (std::size_t l = 0; l < config.layers; ++l) {
    const std::size_t in = l == 0 ? config.input_width() : h;
    p.layers[l].w_x = Tensor::glorot(in, g * h, rng);
    p.layers[l].w_h = Tensor::glorot(h, g * h, rng);
    p.layers[l].b = Tensor::zeros({1, g * h}, true);
    if (!config.block_mode && l == 0) {
      p.layers[l].w_x_dec = Tensor::glorot(1, g * h, rng);
    }
  }
  if (config.block_mode) {
    p.block_w = Tensor::glorot(h, config.tau_max * config.quantiles.size(), rng);
    p.block_b = Tensor::zeros({1, config.tau_max * config.quantiles.size()}, true);
  } else {
    p.step_w = Tensor::glorot(h, config.quantiles.size(), rng);
    p.step_b = Tensor::zeros({1, config.quantiles.size()}, true);
  }
  return p;
}

std::vector<numerics::NamedParam> named_baseline_params(
    BaselineParams& params, const BaselineConfig& config) {
  std::vector<numerics::NamedParam> out;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const std::string prefix = "layer" + std::to_string(l);
    out.push_back({prefix + ".w_x", params.layers[l].w_x});
    out.push_back({prefix + ".w_h", params.layers[l].w_h});
    out.push_back({prefix + ".b", params.layers[l].b});
    if (params.layers[l].w_x_dec.defined()) {
      out.push_back({prefix + ".w_x_dec", params.layers[l].w_x_dec});
    }
  }
  if (config.block_mode) {
    out.push_back({"block.w", params.block_w});
    out.push_back({"block.b", params.block_b});
  } else {
    out.push_back({"step.w", params.step_w});
    out.push_back({"step.b", params.step_b});
  }
  return out;
}

numerics::Tensor baseline_forward(const data::TimeSeriesSample& sample,
                                  const BaselineParams& params,
                                  const BaselineConfig& config) {
  const std::size_t hist_steps = config.k + 1;
  if (sample.y_hist.size() != hist_steps) {
    throw numerics::ShapeError("baseline/input: history length mismatch");
  }
  if (sample.z_hist.rows != hist_steps || sample.z_hist.cols != config.m_z) {
    throw numerics::ShapeError("baseline/input: covariate shape mismatch");
  }

  std::vector<CellState> states(config.layers);
  for (std::size_t l = 0; l < config.layers; ++l) {
    states[l] = initial_state(config.cell, config.hidden);
  }

  auto run_step = [&](const Tensor& input, bool decode_phase) {
    Tensor x = input;
    for (std::size_t l = 0; l < config.layers; ++l) {
      const auto& w = params.layers[l];
      const Tensor& w_in = (decode_phase && l == 0) ? w.w_x_dec : w.w_x;
      states[l] = cell_step(x, states[l], w_in, w, config.cell, config.hidden);
      x = states[l].h;
    }
    return x;
  };

  // encode the observed block
  Tensor top;
  for (std::size_t t = 0; t < hist_steps; ++t) {
    std::vector<double> row(config.input_width());
    row[0] = sample.y_hist[t];
    for (std::size_t j = 0; j < config.m_z; ++j) row[1 + j] = sample.z_hist.at(t, j);
    top = run_step(Tensor::row(std::move(row)), false);
  }

  if (config.block_mode) {
    Tensor flat = numerics::add_rowvec(numerics::matmul(top, params.block_w),
                                       params.block_b);
    return numerics::reshape(flat, {config.tau_max, config.quantiles.size()});
  }

  // autoregressive decoding on the median output
  const std::size_t nq = config.quantiles.size();
  std::size_t median_idx = 0;
  for (std::size_t i = 1; i < nq; ++i) {
    if (std::abs(config.quantiles[i] - 0.5) <
        std::abs(config.quantiles[median_idx] - 0.5)) {
      median_idx = i;
    }
  }
  Tensor feedback = Tensor::from({1, 1}, {sample.y_hist.back()});
  std::vector<Tensor> rows;
  rows.reserve(config.tau_max);
  for (std::size_t t = 0; t < config.tau_max; ++t) {
    Tensor h = run_step(feedback, true);
    Tensor out =
        numerics::add_rowvec(numerics::matmul(h, params.step_w), params.step_b);
    rows.push_back(out);
    feedback = numerics::slice_cols(out, median_idx, median_idx + 1);
  }
  return numerics::concat_rows(rows);
}

BaselineModel::BaselineModel(BaselineConfig config, std::uint64_t seed)
    : config_(std::move(config)),
      params_(init_baseline_params(config_, seed)),
      registry_(named_baseline_params(params_, config_)) {}

numerics::Tensor BaselineModel::forward_graph(
    const data::TimeSeriesSample& sample) const {
  return baseline_forward(sample, params_, config_);
}

std::span<numerics::NamedParam> BaselineModel::parameters() {
  return registry_;
}

std::span<const double> BaselineModel::quantiles() const {
  return config_.quantiles;
}

}  // namespace baselines
