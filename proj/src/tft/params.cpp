#include "tft/params.hpp"

#include <stdexcept>

namespace tft {

void TftConfig::validate() const {
  if (d_model < 1) throw std::invalid_argument("d_model must be >= 1");
  if (num_heads < 1) throw std::invalid_argument("num_heads must be >= 1");
  if (lstm_layers < 1) throw std::invalid_argument("lstm_layers must be >= 1");
  if (k < 1) throw std::invalid_argument("history length k must be >= 1");
  if (tau_max < 1) throw std::invalid_argument("tau_max must be >= 1");
  if (m_x < 1) throw std::invalid_argument("m_x must be >= 1");
  if (quantiles.empty()) throw std::invalid_argument("quantile set is empty");
  double prev = 0.0;
  for (double q : quantiles) {
    if (!(q > 0.0 && q < 1.0)) {
      throw std::invalid_argument("quantiles must lie in (0,1)");
    }
    if (q <= prev) {
      throw std::invalid_argument("quantiles must be strictly increasing");
    }
    prev = q;
  }
}

namespace {

using numerics::Shape;
using numerics::Tensor;

// All construction/enumeration runs through one walker so that the draw
// order, the path naming and the shape audit can never drift apart.
struct ParamWalker {
  const TftConfig& cfg;
  // visit(path, tensor_slot, rows, cols)
  std::function<void(const std::string&, Tensor&, std::size_t, std::size_t)> visit;

  void grn(const std::string& prefix, GrnWeights& g, std::size_t in,
           std::size_t hidden, std::size_t out, bool with_context) {
    visit(prefix + ".w_hidden", g.w_hidden, in, hidden);
    visit(prefix + ".b_hidden", g.b_hidden, 1, hidden);
    if (with_context) visit(prefix + ".w_context", g.w_context, cfg.d_model, hidden);
    visit(prefix + ".w_out", g.w_out, hidden, out);
    visit(prefix + ".b_out", g.b_out, 1, out);
    visit(prefix + ".gate_w", g.gate_w, out, out);
    visit(prefix + ".gate_b", g.gate_b, 1, out);
    visit(prefix + ".value_w", g.value_w, out, out);
    visit(prefix + ".value_b", g.value_b, 1, out);
    if (in != out) visit(prefix + ".skip_w", g.skip_w, in, out);
    visit(prefix + ".ln_gain", g.ln_gain, 1, out);
    visit(prefix + ".ln_bias", g.ln_bias, 1, out);
  }

  void glu(const std::string& prefix, GluWeights& g, std::size_t dim) {
    visit(prefix + ".gate_w", g.gate_w, dim, dim);
    visit(prefix + ".gate_b", g.gate_b, 1, dim);
    visit(prefix + ".value_w", g.value_w, dim, dim);
    visit(prefix + ".value_b", g.value_b, 1, dim);
  }

  void layer_norm(const std::string& prefix, LayerNormWeights& n, std::size_t dim) {
    visit(prefix + ".gain", n.gain, 1, dim);
    visit(prefix + ".bias", n.bias, 1, dim);
  }

  void var_select(const std::string& prefix, VarSelectWeights& v,
                  std::size_t d_in, bool with_context) {
    const std::size_t d = cfg.d_model;
    visit(prefix + ".embed", v.embed, d_in, d);
    grn(prefix + ".var_grn", v.var_grn, d, d, d, false);
    grn(prefix + ".sel_grn", v.sel_grn, d_in * d, d, d_in, with_context);
  }

  void walk(TftParams& p) {
    const std::size_t d = cfg.d_model;
    const bool ctx = cfg.has_static();
    if (ctx) {
      var_select("static_select", p.static_select, cfg.m_s, false);
      visit("static_proj", p.static_proj, d, 4 * d);
    }
    var_select("hist_select", p.hist_select, cfg.hist_width(), ctx);
    var_select("future_select", p.future_select, cfg.m_x, ctx);

    p.lstm.resize(cfg.lstm_layers);
    for (std::size_t l = 0; l < cfg.lstm_layers; ++l) {
      const std::string prefix = "lstm." + std::to_string(l);
      visit(prefix + ".w_x", p.lstm[l].w_x, d, 4 * d);
      visit(prefix + ".w_h", p.lstm[l].w_h, d, 4 * d);
      visit(prefix + ".b", p.lstm[l].b, 1, 4 * d);
    }
    glu("seq_gate", p.seq_gate, d);
    layer_norm("seq_norm", p.seq_norm, d);
    grn("enrich", p.enrich, d, d, d, ctx);

    p.heads.resize(cfg.num_heads);
    for (std::size_t h = 0; h < cfg.num_heads; ++h) {
      const std::string prefix = "attention.head" + std::to_string(h);
      visit(prefix + ".w_q", p.heads[h].w_q, d, d);
      visit(prefix + ".w_k", p.heads[h].w_k, d, d);
    }
    visit("attention.w_v", p.attn_value_w, d, d);

    glu("decoder.gate_attn", p.dec_gate_attn, d);
    layer_norm("decoder.norm_attn", p.dec_norm_attn, d);
    grn("decoder.grn", p.dec_grn, d, d, d, false);
    glu("decoder.gate_ff", p.dec_gate_ff, d);
    layer_norm("decoder.norm_ff", p.dec_norm_ff, d);

    p.head_w.resize(cfg.quantiles.size());
    p.head_b.resize(cfg.quantiles.size());
    for (std::size_t qi = 0; qi < cfg.quantiles.size(); ++qi) {
      const std::string prefix = "head.q" + std::to_string(qi);
      visit(prefix + ".w", p.head_w[qi], d, 1);
      visit(prefix + ".b", p.head_b[qi], 1, 1);
    }
  }
};

bool is_bias_path(const std::string& path) {
  const auto tail = path.substr(path.rfind('.') + 1);
  return tail == "b" || tail.rfind("b_", 0) == 0 || tail == "gate_b" ||
         tail == "value_b" || tail == "ln_bias" || tail == "bias";
}

bool is_gain_path(const std::string& path) {
  const auto tail = path.substr(path.rfind('.') + 1);
  return tail == "ln_gain" || tail == "gain";
}

}  // namespace

TftParams init_params(const TftConfig& config, std::uint64_t seed) {
  config.validate();
  TftParams params;
  std::mt19937_64 rng(seed);
  ParamWalker walker{
      config,
      [&rng](const std::string& path, Tensor& slot, std::size_t rows,
             std::size_t cols) {
        if (is_bias_path(path)) {
          slot = Tensor::zeros({rows, cols}, true);
        } else if (is_gain_path(path)) {
          slot = Tensor::full({rows, cols}, 1.0, true);
        } else {
          slot = Tensor::glorot(rows, cols, rng);
        }
      }};
  walker.walk(params);
  return params;
}

void for_each_param(
    TftParams& params, const TftConfig& config,
    const std::function<void(const std::string&, numerics::Tensor&)>& fn) {
  ParamWalker walker{config,
                     [&fn](const std::string& path, Tensor& slot, std::size_t,
                           std::size_t) { fn(path, slot); }};
  walker.walk(params);
}

std::vector<numerics::NamedParam> named_params(TftParams& params,
                                               const TftConfig& config) {
  std::vector<numerics::NamedParam> out;
  for_each_param(params, config,
                 [&out](const std::string& path, Tensor& t) {
                   out.push_back({path, t});
                 });
  return out;
}

void audit_shapes(TftParams& params, const TftConfig& config) {
  config.validate();
  ParamWalker walker{
      config,
      [](const std::string& path, Tensor& slot, std::size_t rows,
         std::size_t cols) {
        if (!slot.defined()) {
          throw std::invalid_argument("missing parameter " + path);
        }
        const numerics::Shape expected{rows, cols};
        if (slot.shape() != expected) {
          throw std::invalid_argument("parameter " + path +
                                      " has an unexpected shape");
        }
      }};
  walker.walk(params);
}

}  // namespace tft
