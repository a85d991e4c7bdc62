#include <cmath>
#include <vector>

#include "doctest.h"
#include "padkit/augment.hpp"
#include "padkit/rng.hpp"

using namespace padkit;

namespace {

AugmentConfig identity_config() {
  AugmentConfig cfg;
  cfg.flip_prob = 0.0;
  cfg.brightness_contrast_range = 0.0;
  cfg.hue_sat_range = 0.0;
  cfg.gamma_min = cfg.gamma_max = 1.0;
  cfg.jpeg_quality_min = cfg.jpeg_quality_max = 100.0;
  cfg.cutmix_prob = 0.0;
  return cfg;
}

Tensor random_image(Rng& rng, std::size_t n = 16) {
  Tensor img({n, n, 3});
  for (double& v : img.values()) v = rng.uniform();
  return img;
}

Tensor constant_image(double value, std::size_t n = 16) {
  Tensor img({n, n, 3});
  for (double& v : img.values()) v = value;
  return img;
}

MixedSample plain(const std::string& id, Label label, Tensor image) {
  MixedSample m;
  m.image = std::move(image);
  m.focal_target = label == Label::Live ? 1.0 : 0.0;
  m.supcon_label = label;
  m.base_id = id;
  m.lambda = 1.0;
  return m;
}

}  // namespace

TEST_CASE("collapsed ranges leave the image bit-exact") {
  Rng rng(41);
  const Tensor img = random_image(rng);
  Rng aug_rng(7);
  const Tensor out = augment_live(img, identity_config(), aug_rng);
  CHECK(out == img);
}

TEST_CASE("gamma-only chain matches the analytic power curve") {
  AugmentConfig cfg = identity_config();
  cfg.gamma_min = cfg.gamma_max = 1.2;
  Rng rng(1);
  const Tensor out = augment_live(constant_image(0.5), cfg, rng);
  const double expected = 0.43527528164806207;  // 0.5^1.2
  for (double v : out.values()) CHECK(v == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("augmentation output stays in range and is seed-deterministic") {
  AugmentConfig cfg;  // full default ranges
  Rng img_rng(2);
  const Tensor img = random_image(img_rng);

  Rng a(99), b(99), c(100);
  const Tensor out_a = augment_live(img, cfg, a);
  const Tensor out_b = augment_live(img, cfg, b);
  const Tensor out_c = augment_live(img, cfg, c);
  CHECK(out_a == out_b);
  CHECK(out_a.values() != out_c.values());
  for (double v : out_a.values()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("cutmix mixes labels by exact clipped patch area") {
  Rng rng(17);
  int interior = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const MixedSample base = plain("base", Label::Attack, constant_image(0.0));
    const MixedSample donor = plain("donor", Label::Live, constant_image(1.0));
    const MixedSample mixed = cutmix(base, donor, 0.6, rng);

    // donor pixels are exactly the 1.0-valued ones
    std::size_t donor_pixels = 0;
    const std::size_t n = mixed.image.extent(0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double v = mixed.image.at3(i, j, 0);
        CHECK((v == 0.0 || v == 1.0));
        if (v == 1.0) ++donor_pixels;
      }
    }
    const double lambda = 1.0 - static_cast<double>(donor_pixels) / static_cast<double>(n * n);
    CHECK(mixed.lambda == lambda);
    CHECK(mixed.focal_target == lambda * 0.0 + (1.0 - lambda) * 1.0);
    CHECK(mixed.supcon_label == Label::Attack);
    CHECK(mixed.base_id == "base");
    if (donor_pixels > 0) {
      REQUIRE(mixed.donor_id.has_value());
      CHECK(*mixed.donor_id == "donor");
    } else {
      CHECK(!mixed.donor_id.has_value());
      CHECK(mixed.lambda == 1.0);
    }
    if (mixed.focal_target > 0.0 && mixed.focal_target < 1.0) ++interior;
  }
  // degenerate all-or-nothing patches must be rare
  CHECK(interior > 900);
}

TEST_CASE("cutmix shape mismatch is rejected") {
  Rng rng(3);
  const MixedSample base = plain("a", Label::Live, constant_image(0.5, 16));
  const MixedSample donor = plain("b", Label::Attack, constant_image(0.5, 8));
  CHECK_THROWS_AS(cutmix(base, donor, 0.6, rng), DimensionError);
}

TEST_CASE("batch policy without cutmix keeps hard labels") {
  AugmentConfig cfg;
  cfg.cutmix_prob = 0.0;
  Rng img_rng(4);
  std::vector<BatchSlot> batch = {
      {"atk_0", Label::Attack, random_image(img_rng)},
      {"atk_1", Label::Attack, random_image(img_rng)},
      {"live_0", Label::Live, random_image(img_rng)},
      {"live_1", Label::Live, random_image(img_rng)},
  };
  Rng rng(8);
  const std::vector<MixedSample> mixed = apply_batch_policy(batch, cfg, rng);
  REQUIRE(mixed.size() == 4);
  for (std::size_t i = 0; i < mixed.size(); ++i) {
    CHECK((mixed[i].focal_target == 0.0 || mixed[i].focal_target == 1.0));
    CHECK(mixed[i].lambda == 1.0);
    CHECK(mixed[i].supcon_label == batch[i].label);
    CHECK(!mixed[i].donor_id.has_value());
  }
}

TEST_CASE("step one touches live pixels only") {
  AugmentConfig cfg;
  cfg.cutmix_prob = 0.0;
  cfg.flip_prob = 1.0;  // guarantee the lives change
  Rng img_rng(12);
  const Tensor atk_img = random_image(img_rng);
  const Tensor live_img = random_image(img_rng);
  std::vector<BatchSlot> batch = {
      {"atk_0", Label::Attack, atk_img},
      {"live_0", Label::Live, live_img},
  };
  Rng rng(21);
  const std::vector<MixedSample> mixed = apply_batch_policy(batch, cfg, rng);
  CHECK(mixed[0].image == atk_img);
  CHECK(mixed[1].image.values() != live_img.values());
}

TEST_CASE("batch policy with forced cutmix mixes opposite labels") {
  AugmentConfig cfg = identity_config();
  cfg.cutmix_prob = 1.0;
  Rng rng(33);
  int interior = 0;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<BatchSlot> batch = {
        {"atk_0", Label::Attack, constant_image(0.0)},
        {"live_0", Label::Live, constant_image(1.0)},
    };
    const std::vector<MixedSample> mixed = apply_batch_policy(batch, cfg, rng);
    for (const MixedSample& m : mixed) {
      CHECK(m.focal_target >= 0.0);
      CHECK(m.focal_target <= 1.0);
    }
    CHECK(mixed[0].supcon_label == Label::Attack);
    CHECK(mixed[1].supcon_label == Label::Live);
    if (mixed[0].focal_target > 0.0 && mixed[0].focal_target < 1.0) ++interior;
  }
  CHECK(interior > 150);
}

TEST_CASE("batch policy rejects singleton batches when cutmix is on") {
  AugmentConfig cfg;
  cfg.cutmix_prob = 0.5;
  Rng img_rng(5);
  std::vector<BatchSlot> one = {{"solo", Label::Live, random_image(img_rng)}};
  Rng rng(6);
  CHECK_THROWS_AS(apply_batch_policy(one, cfg, rng), ConfigError);
}

TEST_CASE("batch policy is deterministic under a fixed rng seed") {
  AugmentConfig cfg;
  Rng img_rng(50);
  std::vector<BatchSlot> batch = {
      {"atk_0", Label::Attack, random_image(img_rng)},
      {"atk_1", Label::Attack, random_image(img_rng)},
      {"live_0", Label::Live, random_image(img_rng)},
      {"live_1", Label::Live, random_image(img_rng)},
  };
  Rng a(71), b(71);
  const auto ma = apply_batch_policy(batch, cfg, a);
  const auto mb = apply_batch_policy(batch, cfg, b);
  REQUIRE(ma.size() == mb.size());
  for (std::size_t i = 0; i < ma.size(); ++i) {
    CHECK(ma[i].image == mb[i].image);
    CHECK(ma[i].focal_target == mb[i].focal_target);
    CHECK(ma[i].lambda == mb[i].lambda);
  }
}
