#include "padkit/model.hpp"

#include <cmath>

namespace padkit {

namespace {

Tensor init_weight(std::size_t in, std::size_t out, Rng& rng) {
  Tensor w({in, out});
  const double scale = std::sqrt(2.0 / static_cast<double>(in));
  for (double& v : w.values()) v = scale * rng.normal();
  return w;
}

}  // namespace

ToyModel::ToyModel(const ModelDims& dims, Rng& rng) : dims_(dims) {
  names_ = {"enc1_w", "enc1_b", "enc2_w", "enc2_b", "cls_w",
            "cls_b",  "proj1_w", "proj1_b", "proj2_w", "proj2_b"};
  params_.resize(kBlockCount);
  params_[kEnc1W] = init_weight(dims.input, dims.hidden, rng);
  params_[kEnc1B] = Tensor({dims.hidden});
  params_[kEnc2W] = init_weight(dims.hidden, dims.feature, rng);
  params_[kEnc2B] = Tensor({dims.feature});
  params_[kClsW] = init_weight(dims.feature, 1, rng);
  params_[kClsB] = Tensor({1});
  params_[kProj1W] = init_weight(dims.feature, dims.proj_hidden, rng);
  params_[kProj1B] = Tensor({dims.proj_hidden});
  params_[kProj2W] = init_weight(dims.proj_hidden, dims.proj_out, rng);
  // nonzero bias keeps the projection away from the normalization pole
  params_[kProj2B] = Tensor({dims.proj_out});
  for (double& v : params_[kProj2B].values()) v = rng.uniform(0.05, 0.15);
}

ToyModel ToyModel::from_params(const ModelDims& dims, std::vector<std::string> names,
                               std::vector<Tensor> params) {
  if (names.size() != kBlockCount || params.size() != kBlockCount) {
    throw IntegrityError("from_params expects " + std::to_string(int(kBlockCount)) +
                         " parameter blocks");
  }
  ToyModel m;
  m.dims_ = dims;
  m.names_ = std::move(names);
  m.params_ = std::move(params);
  return m;
}

std::size_t ToyModel::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor& p : params_) n += p.size();
  return n;
}

ToyModel::Forward ToyModel::forward(const Tensor& input) const {
  if (input.rank() != 2 || input.extent(1) != dims_.input) {
    throw DimensionError("model input shape " + shape_string(input.shape()) + ", expected (B, " +
                         std::to_string(dims_.input) + ")");
  }
  Forward f;
  f.input = input;
  f.h1_pre = affine(input, params_[kEnc1W], params_[kEnc1B]);
  f.h1 = rectify(f.h1_pre);
  f.h2_pre = affine(f.h1, params_[kEnc2W], params_[kEnc2B]);
  f.features = rectify(f.h2_pre);

  Tensor logits2d = affine(f.features, params_[kClsW], params_[kClsB]);
  f.logits = Tensor({input.extent(0)}, logits2d.values());

  f.p1_pre = affine(f.features, params_[kProj1W], params_[kProj1B]);
  f.p1 = rectify(f.p1_pre);
  f.proj_raw = affine(f.p1, params_[kProj2W], params_[kProj2B]);
  f.projections = l2_normalize_rows(f.proj_raw);
  return f;
}

std::vector<Tensor> ToyModel::backward(const Forward& fwd, const Tensor& grad_logits,
                                       const Tensor& grad_projections) const {
  const std::size_t b = fwd.input.extent(0);
  std::vector<Tensor> grads(kBlockCount);

  // projection head
  Tensor d_proj_raw = l2_normalize_rows_backward(fwd.proj_raw, grad_projections);
  AffineGrads g_proj2 = affine_backward(fwd.p1, params_[kProj2W], d_proj_raw);
  grads[kProj2W] = std::move(g_proj2.weight);
  grads[kProj2B] = std::move(g_proj2.bias);
  Tensor d_p1_pre = rectify_backward(fwd.p1_pre, g_proj2.input);
  AffineGrads g_proj1 = affine_backward(fwd.features, params_[kProj1W], d_p1_pre);
  grads[kProj1W] = std::move(g_proj1.weight);
  grads[kProj1B] = std::move(g_proj1.bias);

  // classification head
  Tensor d_logits2d({b, 1}, grad_logits.values());
  AffineGrads g_cls = affine_backward(fwd.features, params_[kClsW], d_logits2d);
  grads[kClsW] = std::move(g_cls.weight);
  grads[kClsB] = std::move(g_cls.bias);

  // encoder: heads' feature gradients accumulate
  Tensor d_features = g_cls.input;
  for (std::size_t i = 0; i < d_features.size(); ++i) d_features[i] += g_proj1.input[i];
  Tensor d_h2_pre = rectify_backward(fwd.h2_pre, d_features);
  AffineGrads g_enc2 = affine_backward(fwd.h1, params_[kEnc2W], d_h2_pre);
  grads[kEnc2W] = std::move(g_enc2.weight);
  grads[kEnc2B] = std::move(g_enc2.bias);
  Tensor d_h1_pre = rectify_backward(fwd.h1_pre, g_enc2.input);
  AffineGrads g_enc1 = affine_backward(fwd.input, params_[kEnc1W], d_h1_pre);
  grads[kEnc1W] = std::move(g_enc1.weight);
  grads[kEnc1B] = std::move(g_enc1.bias);

  return grads;
}

}  // namespace padkit
