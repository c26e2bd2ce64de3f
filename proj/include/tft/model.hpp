#pragma once

#include <optional>
#include <vector>

#include "data/pipeline.hpp"
#include "numerics/tensor.hpp"
#include "tft/params.hpp"
#include "training/forecaster.hpp"

namespace tft {

using numerics::Tensor;

// Four conditioning vectors produced by the static covariate encoder, each
// 1 x d_model: selection context, LSTM initial cell/hidden state, and the
// enrichment context.
struct StaticContext {
  Tensor c_v, c_c, c_h, c_e;
};

struct TemporalFeatures {
  Tensor phi_tilde;  // N x d_model, gated LSTM output with residual
  Tensor psi;        // N x d_model, after static enrichment
};

struct AttentionResult {
  Tensor b_tilde;                 // N x d_model, head-averaged
  std::vector<Tensor> per_head;   // m_H matrices of N x N attention weights
};

struct QuantileForecast {
  data::Matrix values;  // tau_max x |Q|, physical units of the target
  std::vector<double> quantiles;
  std::size_t start_index = 0;
};

// ---- building blocks (exposed for direct testing) ----

// Gated residual unit: out = LayerNorm(residual(x) + GLU(eta1)),
// eta1 = W_out ELU(W_hidden x + W_context c + b_hidden) + b_out.
// x has one activation per row.
Tensor grn_apply(const Tensor& x, const std::optional<Tensor>& context,
                 const GrnWeights& w);

Tensor glu_apply(const Tensor& x, const GluWeights& w);

// Scalar-channel expansion, shared per-variable gating and softmax variable
// weighting; raw is [steps x d_in], returns [steps x d_model].
Tensor variable_select(const Tensor& raw, const std::optional<Tensor>& context,
                       const VarSelectWeights& w, std::size_t d_model);

// As above but also exposing the selection weights [steps x d_in].
struct SelectionResult {
  Tensor combined;
  Tensor weights;
};
SelectionResult variable_select_detail(const Tensor& raw,
                                       const std::optional<Tensor>& context,
                                       const VarSelectWeights& w,
                                       std::size_t d_model);

// Single affine map from the embedded static vector to the four contexts.
StaticContext encode_static(const Tensor& theta_static, const Tensor& proj);

// Seq2seq LSTM over all N steps (initial state from the static context for
// layer one), gated residual and static enrichment.
TemporalFeatures temporal_encode(const Tensor& embedded,
                                 const std::optional<StaticContext>& ctx,
                                 const TftParams& params,
                                 const TftConfig& config);

// Multi-head attention with per-head queries/keys and one shared value
// projection; head outputs are averaged. With full_attention = false a
// causal mask hides keys later than each query position.
AttentionResult interpretable_attention(const Tensor& psi,
                                        const TftParams& params,
                                        const TftConfig& config);

// Position-wise decoder over the future slice plus the linear quantile
// heads; returns a tau_max x |Q| matrix in normalized units.
Tensor decode_quantiles(const Tensor& b_future, const Tensor& phi_future,
                        const Tensor& psi_future, const TftParams& params,
                        const TftConfig& config);

// Full composition, normalized units, autodiff-connected.
Tensor forward_graph(const data::TimeSeriesSample& sample,
                     const TftParams& params, const TftConfig& config);

// Full composition, denormalized to physical units via the sample's stats.
QuantileForecast forward(const data::TimeSeriesSample& sample,
                         const TftParams& params, const TftConfig& config);

// Forecaster adapter owning config + parameters.
class TftModel : public training::Forecaster {
 public:
  TftModel(TftConfig config, std::uint64_t seed);
  TftModel(TftConfig config, TftParams params);

  numerics::Tensor forward_graph(
      const data::TimeSeriesSample& sample) const override;
  std::span<numerics::NamedParam> parameters() override;
  std::span<const double> quantiles() const override;

  const TftConfig& config() const { return config_; }
  TftParams& params() { return params_; }
  const TftParams& params() const { return params_; }

 private:
  TftConfig config_;
  TftParams params_;
  std::vector<numerics::NamedParam> registry_;
};

}  // namespace tft
