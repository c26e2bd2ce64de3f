#include "tft/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tft {

namespace {

using numerics::ShapeError;

[[noreturn]] void stage_error(const std::string& stage, const std::string& what) {
  throw ShapeError(stage + ": " + what);
}

Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b) {
  return numerics::add_rowvec(numerics::matmul(x, w), b);
}

}  // namespace

Tensor glu_apply(const Tensor& x, const GluWeights& w) {
  return numerics::hadamard(numerics::sigmoid(affine(x, w.gate_w, w.gate_b)),
                            affine(x, w.value_w, w.value_b));
}

Tensor grn_apply(const Tensor& x, const std::optional<Tensor>& context,
                 const GrnWeights& w) {
  Tensor pre = numerics::matmul(x, w.w_hidden);
  if (context) {
    if (!w.w_context.defined()) {
      stage_error("grn", "context given to a context-free unit");
    }
    if (context->rows() != 1) stage_error("grn", "context must be one row");
    // the context is a single row, broadcast over all activations
    pre = numerics::add_rowvec(pre, numerics::matmul(*context, w.w_context));
  }
  Tensor eta2 = numerics::elu(numerics::add_rowvec(pre, w.b_hidden));
  Tensor eta1 = affine(eta2, w.w_out, w.b_out);
  Tensor gated = numerics::hadamard(
      numerics::sigmoid(affine(eta1, w.gate_w, w.gate_b)),
      affine(eta1, w.value_w, w.value_b));
  Tensor residual = w.skip_w.defined() ? numerics::matmul(x, w.skip_w) : x;
  return numerics::layer_norm_rows(numerics::add(residual, gated), w.ln_gain,
                                   w.ln_bias);
}

SelectionResult variable_select_detail(const Tensor& raw,
                                       const std::optional<Tensor>& context,
                                       const VarSelectWeights& w,
                                       std::size_t d_model) {
  const std::size_t d_in = raw.cols();
  if (w.embed.rows() != d_in) {
    stage_error("variable_select", "input width does not match the embedding");
  }
  if (w.embed.cols() != d_model) {
    stage_error("variable_select", "embedding width does not match d_model");
  }

  std::vector<Tensor> expanded;   // per channel, steps x d_model
  std::vector<Tensor> gated;
  expanded.reserve(d_in);
  gated.reserve(d_in);
  for (std::size_t j = 0; j < d_in; ++j) {
    Tensor channel = numerics::slice_cols(raw, j, j + 1);
    Tensor e = numerics::matmul(channel, numerics::slice_rows(w.embed, j, j + 1));
    expanded.push_back(e);
    gated.push_back(grn_apply(e, std::nullopt, w.var_grn));
  }

  Tensor flat = d_in == 1 ? expanded.front()
                          : numerics::concat_cols(expanded);
  Tensor logits = grn_apply(flat, context, w.sel_grn);
  Tensor weights = numerics::softmax_rows(logits);

  Tensor combined;
  for (std::size_t j = 0; j < d_in; ++j) {
    Tensor term =
        numerics::mul_colvec(gated[j], numerics::slice_cols(weights, j, j + 1));
    combined = combined.defined() ? numerics::add(combined, term) : term;
  }
  return {combined, weights};
}

Tensor variable_select(const Tensor& raw, const std::optional<Tensor>& context,
                       const VarSelectWeights& w, std::size_t d_model) {
  return variable_select_detail(raw, context, w, d_model).combined;
}

StaticContext encode_static(const Tensor& theta_static, const Tensor& proj) {
  if (theta_static.rows() != 1 || theta_static.cols() != proj.rows()) {
    stage_error("encode_static", "embedded static vector shape mismatch");
  }
  const std::size_t d = proj.cols() / 4;
  Tensor ctx4 = numerics::matmul(theta_static, proj);
  StaticContext ctx;
  ctx.c_v = numerics::slice_cols(ctx4, 0, d);
  ctx.c_c = numerics::slice_cols(ctx4, d, 2 * d);
  ctx.c_h = numerics::slice_cols(ctx4, 2 * d, 3 * d);
  ctx.c_e = numerics::slice_cols(ctx4, 3 * d, 4 * d);
  return ctx;
}

TemporalFeatures temporal_encode(const Tensor& embedded,
                                 const std::optional<StaticContext>& ctx,
                                 const TftParams& params,
                                 const TftConfig& config) {
  const std::size_t d = config.d_model;
  const std::size_t n_steps = embedded.rows();
  if (n_steps != config.seq_len()) {
    stage_error("temporal_encode", "sequence length must equal k + tau_max + 1");
  }
  if (embedded.cols() != d) {
    stage_error("temporal_encode", "embedding width must equal d_model");
  }

  // stacked LSTM; the static context seeds layer one only
  Tensor layer_input = embedded;
  Tensor top;
  for (std::size_t layer = 0; layer < params.lstm.size(); ++layer) {
    const LstmLayerWeights& w = params.lstm[layer];
    Tensor h = (layer == 0 && ctx) ? ctx->c_h : Tensor::zeros({1, d});
    Tensor c = (layer == 0 && ctx) ? ctx->c_c : Tensor::zeros({1, d});
    std::vector<Tensor> outputs;
    outputs.reserve(n_steps);
    for (std::size_t t = 0; t < n_steps; ++t) {
      Tensor x_t = numerics::slice_rows(layer_input, t, t + 1);
      Tensor gates = numerics::add_rowvec(
          numerics::add(numerics::matmul(x_t, w.w_x), numerics::matmul(h, w.w_h)),
          w.b);
      Tensor i_g = numerics::sigmoid(numerics::slice_cols(gates, 0, d));
      Tensor f_g = numerics::sigmoid(numerics::slice_cols(gates, d, 2 * d));
      Tensor g_g = numerics::tanh(numerics::slice_cols(gates, 2 * d, 3 * d));
      Tensor o_g = numerics::sigmoid(numerics::slice_cols(gates, 3 * d, 4 * d));
      c = numerics::add(numerics::hadamard(f_g, c), numerics::hadamard(i_g, g_g));
      h = numerics::hadamard(o_g, numerics::tanh(c));
      outputs.push_back(h);
    }
    top = numerics::concat_rows(outputs);
    layer_input = top;
  }

  TemporalFeatures features;
  features.phi_tilde = numerics::layer_norm_rows(
      numerics::add(embedded, glu_apply(top, params.seq_gate)),
      params.seq_norm.gain, params.seq_norm.bias);
  std::optional<Tensor> enrich_ctx;
  if (ctx) enrich_ctx = ctx->c_e;
  features.psi = grn_apply(features.phi_tilde, enrich_ctx, params.enrich);
  return features;
}

AttentionResult interpretable_attention(const Tensor& psi,
                                        const TftParams& params,
                                        const TftConfig& config) {
  const std::size_t d = config.d_model;
  if (psi.cols() != d) stage_error("attention", "input width must be d_model");
  const double inv_sqrt_d = 1.0 / std::sqrt(double(d));

  Tensor value = numerics::matmul(psi, params.attn_value_w);
  AttentionResult result;
  Tensor sum;
  for (const AttentionHeadWeights& head : params.heads) {
    Tensor q = numerics::matmul(psi, head.w_q);
    Tensor k = numerics::matmul(psi, head.w_k);
    Tensor scores =
        numerics::scale(numerics::matmul(q, numerics::transpose(k)), inv_sqrt_d);
    Tensor attn = numerics::softmax_rows(scores, !config.full_attention);
    result.per_head.push_back(attn);
    Tensor h = numerics::matmul(attn, value);
    sum = sum.defined() ? numerics::add(sum, h) : h;
  }
  result.b_tilde = numerics::scale(sum, 1.0 / double(params.heads.size()));
  return result;
}

Tensor decode_quantiles(const Tensor& b_future, const Tensor& phi_future,
                        const Tensor& psi_future, const TftParams& params,
                        const TftConfig& config) {
  if (b_future.rows() != config.tau_max || phi_future.rows() != config.tau_max ||
      psi_future.rows() != config.tau_max) {
    stage_error("decode_quantiles", "future slices must cover tau_max steps");
  }
  Tensor delta = numerics::layer_norm_rows(
      numerics::add(psi_future, glu_apply(b_future, params.dec_gate_attn)),
      params.dec_norm_attn.gain, params.dec_norm_attn.bias);
  Tensor eps = grn_apply(delta, std::nullopt, params.dec_grn);
  Tensor eps_tilde = numerics::layer_norm_rows(
      numerics::add(phi_future, glu_apply(eps, params.dec_gate_ff)),
      params.dec_norm_ff.gain, params.dec_norm_ff.bias);

  std::vector<Tensor> columns;
  columns.reserve(config.quantiles.size());
  for (std::size_t qi = 0; qi < config.quantiles.size(); ++qi) {
    columns.push_back(affine(eps_tilde, params.head_w[qi], params.head_b[qi]));
  }
  return columns.size() == 1 ? columns.front() : numerics::concat_cols(columns);
}

Tensor forward_graph(const data::TimeSeriesSample& sample,
                     const TftParams& params, const TftConfig& config) {
  const std::size_t hist_steps = config.k + 1;
  if (sample.y_hist.size() != hist_steps) {
    stage_error("forward/input", "history length does not match config k");
  }
  if (sample.z_hist.rows != hist_steps || sample.z_hist.cols != config.m_z) {
    stage_error("forward/input", "historical covariate shape mismatch");
  }
  if (sample.y_future.size() != config.tau_max) {
    stage_error("forward/input", "future truth length does not match tau_max");
  }
  if (sample.x_all.rows != config.seq_len() || sample.x_all.cols != config.m_x) {
    stage_error("forward/input", "future covariate shape mismatch");
  }
  if (config.has_static() && sample.statics.size() != config.m_s) {
    stage_error("forward/input", "static covariate width mismatch");
  }

  // static pathway
  std::optional<StaticContext> ctx;
  std::optional<Tensor> c_v;
  if (config.has_static()) {
    Tensor s_raw = Tensor::row(sample.statics);
    Tensor theta_static = variable_select(s_raw, std::nullopt,
                                          params.static_select, config.d_model);
    ctx = encode_static(theta_static, params.static_proj);
    c_v = ctx->c_v;
  }

  // historical group: [y_t, z_t] per step
  std::vector<double> hist(hist_steps * config.hist_width());
  for (std::size_t t = 0; t < hist_steps; ++t) {
    hist[t * config.hist_width()] = sample.y_hist[t];
    for (std::size_t j = 0; j < config.m_z; ++j) {
      hist[t * config.hist_width() + 1 + j] = sample.z_hist.at(t, j);
    }
  }
  Tensor hist_raw = Tensor::from({hist_steps, config.hist_width()}, std::move(hist));
  Tensor hist_embedded =
      variable_select(hist_raw, c_v, params.hist_select, config.d_model);

  // future group: known covariates over the horizon
  std::vector<double> fut(config.tau_max * config.m_x);
  for (std::size_t t = 0; t < config.tau_max; ++t) {
    for (std::size_t j = 0; j < config.m_x; ++j) {
      fut[t * config.m_x + j] = sample.x_all.at(hist_steps + t, j);
    }
  }
  Tensor fut_raw = Tensor::from({config.tau_max, config.m_x}, std::move(fut));
  Tensor fut_embedded =
      variable_select(fut_raw, c_v, params.future_select, config.d_model);

  std::vector<Tensor> seq_parts{hist_embedded, fut_embedded};
  Tensor embedded = numerics::concat_rows(seq_parts);

  TemporalFeatures features = temporal_encode(embedded, ctx, params, config);
  AttentionResult attn = interpretable_attention(features.psi, params, config);

  const std::size_t n = config.seq_len();
  Tensor b_future = numerics::slice_rows(attn.b_tilde, hist_steps, n);
  Tensor phi_future = numerics::slice_rows(features.phi_tilde, hist_steps, n);
  Tensor psi_future = numerics::slice_rows(features.psi, hist_steps, n);
  return decode_quantiles(b_future, phi_future, psi_future, params, config);
}

QuantileForecast forward(const data::TimeSeriesSample& sample,
                         const TftParams& params, const TftConfig& config) {
  Tensor out = forward_graph(sample, params, config);
  QuantileForecast forecast;
  forecast.quantiles = config.quantiles;
  forecast.start_index = sample.t_index;
  forecast.values = data::Matrix(config.tau_max, config.quantiles.size());
  if (!sample.norm) stage_error("forward", "sample lacks normalization stats");
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) {
      forecast.values.at(i, j) = sample.norm->denormalize(sample.target, out.at(i, j));
    }
  }
  return forecast;
}

TftModel::TftModel(TftConfig config, std::uint64_t seed)
    : config_(std::move(config)),
      params_(init_params(config_, seed)),
      registry_(named_params(params_, config_)) {}

TftModel::TftModel(TftConfig config, TftParams params)
    : config_(std::move(config)), params_(std::move(params)) {
  audit_shapes(params_, config_);
  registry_ = named_params(params_, config_);
}

numerics::Tensor TftModel::forward_graph(
    const data::TimeSeriesSample& sample) const {
  return tft::forward_graph(sample, params_, config_);
}

std::span<numerics::NamedParam> TftModel::parameters() { return registry_; }

std::span<const double> TftModel::quantiles() const {
  return config_.quantiles;
}

}  // namespace tft
