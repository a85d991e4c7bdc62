#include "padkit/augment.hpp"

#include <algorithm>
#include <cmath>

namespace padkit {

void AugmentConfig::validate() const {
  auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob_ok(flip_prob) || !prob_ok(cutmix_prob)) {
    throw ConfigError("augment probabilities must be in [0,1]");
  }
  if (brightness_contrast_range < 0.0 || hue_sat_range < 0.0) {
    throw ConfigError("augment ranges must be non-negative");
  }
  if (gamma_min > gamma_max || jpeg_quality_min > jpeg_quality_max) {
    throw ConfigError("augment range bounds out of order");
  }
  if (cutmix_alpha <= 0.0) throw ConfigError("cutmix_alpha must be positive");
}

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

void flip_horizontal(Tensor& img) {
  const std::size_t h = img.extent(0), w = img.extent(1);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w / 2; ++j) {
      for (std::size_t c = 0; c < 3; ++c) {
        std::swap(img.at3(i, j, c), img.at3(i, w - 1 - j, c));
      }
    }
  }
}

// RGB in [0,1] <-> HSV with all channels scaled to [0,255].
void rgb_to_hsv255(double r, double g, double b, double& h, double& s, double& v) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double d = mx - mn;
  double hue = 0.0;
  if (d > 0.0) {
    if (mx == r) {
      hue = std::fmod((g - b) / d, 6.0);
    } else if (mx == g) {
      hue = (b - r) / d + 2.0;
    } else {
      hue = (r - g) / d + 4.0;
    }
    hue *= 60.0;
    if (hue < 0.0) hue += 360.0;
  }
  h = hue / 360.0 * 255.0;
  s = (mx > 0.0 ? d / mx : 0.0) * 255.0;
  v = mx * 255.0;
}

void hsv255_to_rgb(double h, double s, double v, double& r, double& g, double& b) {
  const double hue = h / 255.0 * 360.0;
  const double sat = s / 255.0;
  const double val = v / 255.0;
  const double c = val * sat;
  const double x = c * (1.0 - std::fabs(std::fmod(hue / 60.0, 2.0) - 1.0));
  const double m = val - c;
  double rp = 0, gp = 0, bp = 0;
  if (hue < 60) {
    rp = c; gp = x;
  } else if (hue < 120) {
    rp = x; gp = c;
  } else if (hue < 180) {
    gp = c; bp = x;
  } else if (hue < 240) {
    gp = x; bp = c;
  } else if (hue < 300) {
    rp = x; bp = c;
  } else {
    rp = c; bp = x;
  }
  r = rp + m;
  g = gp + m;
  b = bp + m;
}

void block_quantize(Tensor& img, double quality) {
  // quality 100 would be a no-op; [40,60] gives visible smoothing
  const double w = (100.0 - quality) / 150.0;
  if (w <= 0.0) return;
  const std::size_t h = img.extent(0), wd = img.extent(1);
  for (std::size_t bi = 0; bi < h; bi += 4) {
    for (std::size_t bj = 0; bj < wd; bj += 4) {
      const std::size_t ei = std::min(bi + 4, h), ej = std::min(bj + 4, wd);
      for (std::size_t c = 0; c < 3; ++c) {
        double mean = 0.0;
        for (std::size_t i = bi; i < ei; ++i)
          for (std::size_t j = bj; j < ej; ++j) mean += img.at3(i, j, c);
        mean /= static_cast<double>((ei - bi) * (ej - bj));
        for (std::size_t i = bi; i < ei; ++i)
          for (std::size_t j = bj; j < ej; ++j) {
            img.at3(i, j, c) = (1.0 - w) * img.at3(i, j, c) + w * mean;
          }
      }
    }
  }
}

}  // namespace

Tensor augment_live(const Tensor& image, const AugmentConfig& config, Rng& rng) {
  if (image.rank() != 3 || image.extent(2) != 3) {
    throw DimensionError("augment_live expects an H x W x 3 image, got " +
                         shape_string(image.shape()));
  }
  Tensor out = image;

  if (rng.bernoulli(config.flip_prob)) flip_horizontal(out);

  const double contrast = 1.0 + rng.uniform(-config.brightness_contrast_range,
                                            config.brightness_contrast_range);
  const double brightness =
      rng.uniform(-config.brightness_contrast_range, config.brightness_contrast_range);
  if (contrast != 1.0 || brightness != 0.0) {
    for (double& v : out.values()) v = clamp01((v - 0.5) * contrast + 0.5 + brightness);
  }

  const double dh = rng.uniform(-config.hue_sat_range, config.hue_sat_range);
  const double ds = rng.uniform(-config.hue_sat_range, config.hue_sat_range);
  if (dh != 0.0 || ds != 0.0) {
    const std::size_t h = out.extent(0), w = out.extent(1);
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < w; ++j) {
        double hh, ss, vv;
        rgb_to_hsv255(out.at3(i, j, 0), out.at3(i, j, 1), out.at3(i, j, 2), hh, ss, vv);
        hh = std::fmod(hh + dh + 255.0, 255.0);
        ss = std::min(255.0, std::max(0.0, ss + ds));
        double r, g, b;
        hsv255_to_rgb(hh, ss, vv, r, g, b);
        out.at3(i, j, 0) = clamp01(r);
        out.at3(i, j, 1) = clamp01(g);
        out.at3(i, j, 2) = clamp01(b);
      }
    }
  }

  const double gamma = rng.uniform(config.gamma_min, config.gamma_max);
  if (gamma != 1.0) {
    for (double& v : out.values()) v = std::pow(v, gamma);
  }

  const double quality = rng.uniform(config.jpeg_quality_min, config.jpeg_quality_max);
  block_quantize(out, quality);

  return out;
}

MixedSample cutmix(const MixedSample& base, const MixedSample& donor, double alpha, Rng& rng) {
  if (!base.image.same_shape(donor.image)) {
    throw DimensionError("cutmix shape mismatch: " + shape_string(base.image.shape()) + " vs " +
                         shape_string(donor.image.shape()));
  }
  const std::size_t h = base.image.extent(0), w = base.image.extent(1);

  const double lambda0 = rng.beta(alpha, alpha);
  const double ratio = std::sqrt(1.0 - lambda0);
  const std::size_t ph = static_cast<std::size_t>(std::lround(ratio * static_cast<double>(h)));
  const std::size_t pw = static_cast<std::size_t>(std::lround(ratio * static_cast<double>(w)));
  const std::size_t cy = rng.uniform_int(h);
  const std::size_t cx = rng.uniform_int(w);

  const std::size_t y0 = cy >= ph / 2 ? cy - ph / 2 : 0;
  const std::size_t x0 = cx >= pw / 2 ? cx - pw / 2 : 0;
  const std::size_t y1 = std::min(y0 + ph, h);
  const std::size_t x1 = std::min(x0 + pw, w);

  MixedSample out = base;
  const std::size_t area = (y1 > y0 && x1 > x0) ? (y1 - y0) * (x1 - x0) : 0;
  for (std::size_t i = y0; i < y1; ++i) {
    for (std::size_t j = x0; j < x1; ++j) {
      for (std::size_t c = 0; c < 3; ++c) out.image.at3(i, j, c) = donor.image.at3(i, j, c);
    }
  }
  const double lambda =
      1.0 - static_cast<double>(area) / static_cast<double>(h * w);
  out.lambda = lambda;
  out.focal_target = lambda * base.focal_target + (1.0 - lambda) * donor.focal_target;
  out.supcon_label = base.supcon_label;
  if (area > 0) out.donor_id = donor.base_id;
  return out;
}

std::vector<MixedSample> apply_batch_policy(const std::vector<BatchSlot>& batch,
                                            const AugmentConfig& config, Rng& rng) {
  config.validate();
  if (batch.size() < 2 && config.cutmix_prob > 0.0) {
    throw ConfigError("apply_batch_policy: CutMix needs a batch of at least 2 samples");
  }

  // step 1: asymmetric augmentation, lives only
  std::vector<MixedSample> staged;
  staged.reserve(batch.size());
  for (const BatchSlot& slot : batch) {
    MixedSample ms;
    ms.base_id = slot.id;
    ms.supcon_label = slot.label;
    ms.focal_target = slot.label == Label::Live ? 1.0 : 0.0;
    ms.image = slot.label == Label::Live ? augment_live(slot.image, config, rng) : slot.image;
    staged.push_back(std::move(ms));
  }

  // step 2: CutMix with donors drawn from the staged batch
  std::vector<MixedSample> out = staged;
  for (std::size_t i = 0; i < staged.size(); ++i) {
    if (!rng.bernoulli(config.cutmix_prob)) continue;
    std::size_t j = rng.uniform_int(staged.size() - 1);
    if (j >= i) ++j;
    out[i] = cutmix(staged[i], staged[j], config.cutmix_alpha, rng);
  }
  return out;
}

}  // namespace padkit
