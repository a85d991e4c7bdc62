#pragma once

#include <string>
#include <vector>

#include "padkit/rng.hpp"
#include "padkit/tensor.hpp"

namespace padkit {

struct ModelDims {
  std::size_t input = 16 * 16 * 3;
  std::size_t hidden = 64;
  std::size_t feature = 64;
  std::size_t proj_hidden = 64;
  std::size_t proj_out = 128;
};

// Flattened-pixel encoder (two affine+rectify stages), a one-logit
// classification head, and a projection head ending on the unit sphere.
class ToyModel {
 public:
  ToyModel() = default;
  ToyModel(const ModelDims& dims, Rng& rng);

  static ToyModel from_params(const ModelDims& dims, std::vector<std::string> names,
                              std::vector<Tensor> params);

  const ModelDims& dims() const { return dims_; }
  std::size_t parameter_count() const;

  std::size_t block_count() const { return params_.size(); }
  const std::string& block_name(std::size_t i) const { return names_[i]; }
  Tensor& block(std::size_t i) { return params_[i]; }
  const Tensor& block(std::size_t i) const { return params_[i]; }

  struct Forward {
    Tensor input;    // (B x input)
    Tensor h1_pre, h1;
    Tensor h2_pre, features;
    Tensor logits;       // (B)
    Tensor p1_pre, p1;
    Tensor proj_raw;     // (B x proj_out), pre-normalization
    Tensor projections;  // unit rows
  };

  Forward forward(const Tensor& input) const;

  // Gradients per parameter block, same order as blocks.
  std::vector<Tensor> backward(const Forward& fwd, const Tensor& grad_logits,
                               const Tensor& grad_projections) const;

 private:
  ModelDims dims_;
  std::vector<std::string> names_;
  std::vector<Tensor> params_;

  enum Block {
    kEnc1W, kEnc1B, kEnc2W, kEnc2B, kClsW, kClsB, kProj1W, kProj1B, kProj2W, kProj2B,
    kBlockCount
  };
};

}  // namespace padkit
