#pragma once

#include <optional>
#include <string>
#include <vector>

#include "padkit/data.hpp"
#include "padkit/rng.hpp"
#include "padkit/tensor.hpp"

namespace padkit {

struct AugmentConfig {
  double flip_prob = 0.5;
  double brightness_contrast_range = 0.10;  // +/- on both factors
  double hue_sat_range = 10.0;              // +/- on a [0,255]-scaled HSV space
  double gamma_min = 0.80;
  double gamma_max = 1.20;
  double jpeg_quality_min = 40.0;  // block-quantization proxy, 100 = no-op
  double jpeg_quality_max = 60.0;
  double cutmix_prob = 0.3;
  double cutmix_alpha = 0.6;

  void validate() const;
};

struct MixedSample {
  Tensor image;
  double focal_target = 0.0;  // mixed label, live = 1
  Label supcon_label = Label::Attack;
  std::string base_id;
  std::optional<std::string> donor_id;
  double lambda = 1.0;
};

// Asymmetric policy step 1: photometric/geometric chain for live slots.
Tensor augment_live(const Tensor& image, const AugmentConfig& config, Rng& rng);

// Standard CutMix: Beta(alpha, alpha) mix ratio, uniform patch center,
// clipped at borders, lambda recomputed from the clipped patch area.
MixedSample cutmix(const MixedSample& base, const MixedSample& donor, double alpha, Rng& rng);

struct BatchSlot {
  std::string id;
  Label label;
  Tensor image;
};

// Augments live slots in place, then applies CutMix per slot with
// probability cutmix_prob; donors are drawn from the post-step-1 batch.
std::vector<MixedSample> apply_batch_policy(const std::vector<BatchSlot>& batch,
                                            const AugmentConfig& config, Rng& rng);

}  // namespace padkit
