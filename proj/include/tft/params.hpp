#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "numerics/optimizer.hpp"
#include "numerics/tensor.hpp"
#include "tft/config.hpp"

namespace tft {

// Weight matrices are stored input-major: a row-convention activation X of
// shape [rows x in] is transformed as matmul(X, W) with W [in x out].

// Gated residual network weights. The square flavor (in == out == d_model)
// follows the gating equations directly; the rectangular flavor used by the
// selection networks adds a linear skip projection.
struct GrnWeights {
  numerics::Tensor w_hidden, b_hidden;  // in -> hidden
  numerics::Tensor w_context;           // d_model -> hidden, optional
  numerics::Tensor w_out, b_out;        // hidden -> out
  numerics::Tensor gate_w, gate_b;      // out -> out, sigmoid branch
  numerics::Tensor value_w, value_b;    // out -> out, linear branch
  numerics::Tensor skip_w;              // in -> out, only when in != out
  numerics::Tensor ln_gain, ln_bias;
};

struct GluWeights {
  numerics::Tensor gate_w, gate_b;
  numerics::Tensor value_w, value_b;
};

struct LayerNormWeights {
  numerics::Tensor gain, bias;
};

// Per-covariate-group embedding plus selection networks.
struct VarSelectWeights {
  numerics::Tensor embed;  // d_in x d_model, one expansion row per channel
  GrnWeights var_grn;      // shared across channels, square
  GrnWeights sel_grn;      // (d_in * d_model) -> d_in, softmaxed outside
};

struct LstmLayerWeights {
  numerics::Tensor w_x;  // in x 4*d_model, gate order (i, f, g, o)
  numerics::Tensor w_h;  // d_model x 4*d_model
  numerics::Tensor b;    // 1 x 4*d_model
};

struct AttentionHeadWeights {
  numerics::Tensor w_q, w_k;  // d_model x d_model each
};

struct TftParams {
  // variable selection (static group present only when m_s > 0)
  VarSelectWeights static_select;
  numerics::Tensor static_proj;  // d_model x 4*d_model
  VarSelectWeights hist_select;
  VarSelectWeights future_select;

  std::vector<LstmLayerWeights> lstm;
  GluWeights seq_gate;        // gate on the LSTM output
  LayerNormWeights seq_norm;
  GrnWeights enrich;          // static enrichment, context-conditioned

  std::vector<AttentionHeadWeights> heads;
  numerics::Tensor attn_value_w;  // d_model x d_model, shared by all heads

  GluWeights dec_gate_attn;   // gate on the attention output
  LayerNormWeights dec_norm_attn;
  GrnWeights dec_grn;         // position-wise feed-forward, square
  GluWeights dec_gate_ff;     // gate on the feed-forward output
  LayerNormWeights dec_norm_ff;

  std::vector<numerics::Tensor> head_w;  // per quantile, d_model x 1
  std::vector<numerics::Tensor> head_b;  // per quantile, 1 x 1
};

// Glorot-initialized parameters, biases zero, layer-norm gains one; the
// draw order is the canonical enumeration order, so a given (config, seed)
// always yields the same parameters.
TftParams init_params(const TftConfig& config, std::uint64_t seed);

// Visits every parameter in canonical order with its path string
// (e.g. "attention.head3.w_q").
void for_each_param(
    TftParams& params, const TftConfig& config,
    const std::function<void(const std::string&, numerics::Tensor&)>& fn);

std::vector<numerics::NamedParam> named_params(TftParams& params,
                                               const TftConfig& config);

// Verifies every tensor against the shape dictated by the config.
// Throws std::invalid_argument naming the offending path.
void audit_shapes(TftParams& params, const TftConfig& config);

}  // namespace tft
