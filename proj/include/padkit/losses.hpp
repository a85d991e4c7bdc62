#pragma once

#include <vector>

#include "padkit/tensor.hpp"

namespace padkit {

struct LossConfig {
  double focal_alpha = 0.5;
  double focal_gamma = 0.7;
  double supcon_temperature = 0.14;
  double supcon_weight = 0.3;
  double probability_clamp = 1e-7;

  void validate() const;
};

struct LossBundle {
  double focal = 0.0;
  double supcon = 0.0;
  double total = 0.0;
  int valid_anchor_count = 0;
  bool supcon_degenerate = false;
};

struct ScalarLoss {
  double value = 0.0;
  double grad = 0.0;  // d value / d logit
};

// Binary focal loss on one logit; target may be a CutMix-mixed value in [0,1].
ScalarLoss focal_loss(double logit, double target, const LossConfig& config);

struct BatchFocal {
  double value = 0.0;
  Tensor grad_logits;  // shape (N)
};

// Mean over the batch.
BatchFocal focal_loss_batch(const Tensor& logits, const std::vector<double>& targets,
                            const LossConfig& config);

struct SupConResult {
  double value = 0.0;
  Tensor grad;  // d value / d projections, shape (N x D)
  int valid_anchor_count = 0;
  bool degenerate = false;  // no anchor had a positive
};

// Sum-inside-log supervised contrastive loss over unit-norm projections
// (rows of an N x D matrix).  Anchors without positives are excluded
// from the mean.  Gradient is with respect to the projection entries as
// free variables; chain it through l2_normalize_rows_backward to reach
// the pre-normalization activations.
SupConResult supcon_loss(const Tensor& projections, const std::vector<int>& labels,
                         double temperature);

struct CombinedResult {
  LossBundle bundle;
  Tensor grad_logits;       // (N)
  Tensor grad_projections;  // (N x D), wrt the unit-norm projections
};

// total = focal + supcon_weight * supcon, with focal on mixed targets
// and supcon on unmixed labels.
CombinedResult combined_objective(const Tensor& logits, const std::vector<double>& focal_targets,
                                  const Tensor& projections, const std::vector<int>& supcon_labels,
                                  const LossConfig& config);

}  // namespace padkit
