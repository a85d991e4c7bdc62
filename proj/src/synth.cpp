#include "padkit/synth.hpp"

#include <algorithm>
#include <cmath>

namespace padkit {

void SynthConfig::validate() const {
  if (orphan_attack_fraction < 0.0 || orphan_attack_fraction > 1.0) {
    throw ConfigError("orphan_attack_fraction must be in [0,1]");
  }
  if (image_size < 8) throw ConfigError("image_size must be >= 8");
  if (embedding_dim == 0) throw ConfigError("embedding_dim must be positive");
}

bool is_identity_preserving(AttackCategory c) {
  return c == AttackCategory::PixelLevel || c == AttackCategory::SemanticLevel ||
         c == AttackCategory::VideoDriven;
}

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

double round_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

struct IdentityParams {
  double fx, fy, ph0, ph1, ph2;
  std::vector<double> center;  // embedding cluster center
};

Tensor base_image(const IdentityParams& p, std::size_t n) {
  Tensor img({n, n, 3});
  const double phases[3] = {p.ph0, p.ph1, p.ph2};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t c = 0; c < 3; ++c) {
        const double v =
            0.5 + 0.25 * std::sin(p.fx * static_cast<double>(i) + phases[c]) *
                      std::cos(p.fy * static_cast<double>(j) + phases[(c + 1) % 3]);
        img.at3(i, j, c) = clamp01(v);
      }
    }
  }
  return img;
}

std::vector<double> random_center(Rng& rng, std::size_t dim, double spread) {
  std::vector<double> c(dim);
  double norm = 0.0;
  for (double& v : c) {
    v = rng.normal();
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (double& v : c) v = v / norm * spread;
  return c;
}

std::vector<double> jitter(const std::vector<double>& center, double scale, Rng& rng) {
  // scale is the expected norm of the whole perturbation
  const double per_coord = scale / std::sqrt(static_cast<double>(center.size()));
  std::vector<double> v(center.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = round_f32(center[i] + per_coord * rng.normal());
  }
  return v;
}

// Marks every attack with a shared low-amplitude texture so live/attack
// is separable from pixels, then layers a category-specific pattern.
void apply_attack_texture(Tensor& img, AttackCategory cat, const Tensor& donor_base, Rng& rng) {
  const std::size_t n = img.extent(0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double checker = ((i + j) % 2 == 0) ? 0.15 : -0.15;
      img.at3(i, j, 0) = clamp01(img.at3(i, j, 0) + checker);
    }
  }
  switch (cat) {
    case AttackCategory::PixelLevel:
      for (double& v : img.values()) v = clamp01(v + 0.08 * (rng.uniform() - 0.5));
      break;
    case AttackCategory::SemanticLevel:
      for (std::size_t i = 0; i < n; ++i) {
        const double s = 0.10 * std::sin(1.9 * static_cast<double>(i));
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t c = 0; c < 3; ++c) img.at3(i, j, c) = clamp01(img.at3(i, j, c) + s);
      }
      break;
    case AttackCategory::VideoDriven:
      for (std::size_t j = 0; j < n; ++j) {
        const double s = 0.10 * std::sin(1.9 * static_cast<double>(j));
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t c = 0; c < 3; ++c) img.at3(i, j, c) = clamp01(img.at3(i, j, c) + s);
      }
      break;
    case AttackCategory::FaceSwap:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t c = 0; c < 3; ++c) {
            double v = 0.5 * img.at3(i, j, c) + 0.5 * donor_base.at3(i, j, c);
            if (i == 0 || j == 0 || i == n - 1 || j == n - 1) v *= 0.6;  // seam frame
            img.at3(i, j, c) = clamp01(v);
          }
      break;
    case AttackCategory::AttributeEdit:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) img.at3(i, j, 1) = clamp01(img.at3(i, j, 1) + 0.12);
      break;
    case AttackCategory::Replay:
      for (std::size_t i = 0; i < n; ++i) {
        const double band = (i / 2) % 2 == 0 ? 0.08 : -0.08;
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t c = 0; c < 3; ++c) img.at3(i, j, c) = clamp01(img.at3(i, j, c) + band);
      }
      break;
    case AttackCategory::Cutouts: {
      const std::size_t q = n / 4;
      for (std::size_t i = q; i < n - q; ++i)
        for (std::size_t j = q; j < n - q; ++j)
          for (std::size_t c = 0; c < 3; ++c) img.at3(i, j, c) = 0.5;
      break;
    }
    case AttackCategory::Print:
      for (std::size_t i = 0; i < n; i += 3)
        for (std::size_t j = 0; j < n; j += 3)
          for (std::size_t c = 0; c < 3; ++c) img.at3(i, j, c) = clamp01(img.at3(i, j, c) - 0.2);
      break;
    case AttackCategory::Live:
      break;
  }
}

std::string pad3(std::size_t v) {
  std::string s = std::to_string(v);
  while (s.size() < 3) s.insert(s.begin(), '0');
  return s;
}

}  // namespace

SyntheticDataset generate_synthetic(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);
  SyntheticDataset out;
  out.embeddings = EmbeddingStore(config.embedding_dim);

  std::vector<IdentityParams> identities(config.n_identities);
  for (IdentityParams& p : identities) {
    p.fx = rng.uniform(0.4, 1.6);
    p.fy = rng.uniform(0.4, 1.6);
    p.ph0 = rng.uniform(0.0, 6.28);
    p.ph1 = rng.uniform(0.0, 6.28);
    p.ph2 = rng.uniform(0.0, 6.28);
    p.center = random_center(rng, config.embedding_dim, config.identity_spread);
  }

  std::size_t orphan_counter = 0;
  for (std::size_t idx = 0; idx < config.n_identities; ++idx) {
    const IdentityParams& p = identities[idx];
    const std::string identity = "person_" + pad3(idx);
    const Tensor base = base_image(p, config.image_size);

    for (std::size_t k = 0; k < config.lives_per_identity; ++k) {
      Sample s;
      s.id = "live_" + pad3(idx) + "_" + pad3(k);
      s.identity = identity;
      s.label = Label::Live;
      s.category = AttackCategory::Live;
      s.image = base;
      for (double& v : s.image.values()) v = clamp01(v + 0.02 * rng.normal());
      out.embeddings.insert(s.id, jitter(p.center, config.noise_scale, rng));
      out.samples.push_back(std::move(s));
    }

    for (AttackCategory cat : kAllCategories) {
      if (cat == AttackCategory::Live) continue;
      auto it = config.attacks_per_identity_per_category.find(cat);
      const std::size_t count = it == config.attacks_per_identity_per_category.end() ? 0 : it->second;
      for (std::size_t k = 0; k < count; ++k) {
        Sample s;
        s.id = "atk_" + category_name(cat) + "_" + pad3(idx) + "_" + pad3(k);
        s.identity = identity;
        s.label = Label::Attack;
        s.category = cat;
        s.image = base;
        const IdentityParams& donor = identities[(idx + 1) % config.n_identities];
        const Tensor donor_base = base_image(donor, config.image_size);
        apply_attack_texture(s.image, cat, donor_base, rng);

        if (is_identity_preserving(cat)) {
          out.embeddings.insert(s.id, jitter(p.center, config.noise_scale, rng));
        } else {
          // far from every live cluster
          std::vector<double> far = random_center(rng, config.embedding_dim,
                                                  std::max(config.attack_offset, 1e-3));
          out.embeddings.insert(s.id, jitter(far, config.noise_scale, rng));
          if (rng.bernoulli(config.orphan_attack_fraction)) {
            s.identity = "orphan_" + pad3(orphan_counter++);
          }
        }
        out.samples.push_back(std::move(s));
      }
    }
  }
  return out;
}

}  // namespace padkit
