#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "padkit/gradcheck.hpp"
#include "padkit/losses.hpp"
#include "padkit/rng.hpp"
#include "padkit/tensor.hpp"

using namespace padkit;

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Direct double-loop reference for the contrastive loss.
double supcon_reference(const Tensor& z, const std::vector<int>& labels, double T) {
  const std::size_t n = z.extent(0);
  const std::size_t d = z.extent(1);
  double total = 0.0;
  std::size_t anchors = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double pos = 0.0, all = 0.0;
    bool has_pos = false;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) dot += z.at2(i, j) * z.at2(k, j);
      const double e = std::exp(dot / T);
      all += e;
      if (labels[k] == labels[i]) {
        pos += e;
        has_pos = true;
      }
    }
    if (!has_pos) continue;
    total += -std::log(pos / all);
    ++anchors;
  }
  return anchors == 0 ? 0.0 : total / static_cast<double>(anchors);
}

Tensor random_unit_rows(Rng& rng, std::size_t n, std::size_t d) {
  Tensor z({n, d});
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      z.at2(i, j) = rng.normal();
      norm += z.at2(i, j) * z.at2(i, j);
    }
    norm = std::sqrt(norm);
    for (std::size_t j = 0; j < d; ++j) z.at2(i, j) /= norm;
  }
  return z;
}

// Random orthogonal matrix via Gram-Schmidt on a Gaussian draw.
std::vector<std::vector<double>> random_rotation(Rng& rng, std::size_t d) {
  std::vector<std::vector<double>> q(d, std::vector<double>(d));
  for (auto& row : q) {
    for (double& v : row) v = rng.normal();
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) dot += q[i][j] * q[k][j];
      for (std::size_t j = 0; j < d; ++j) q[i][j] -= dot * q[k][j];
    }
    double norm = 0.0;
    for (double v : q[i]) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : q[i]) v /= norm;
  }
  return q;
}

Tensor rotate_rows(const Tensor& z, const std::vector<std::vector<double>>& q) {
  Tensor out(z.shape());
  const std::size_t n = z.extent(0), d = z.extent(1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < d; ++a) {
      double s = 0.0;
      for (std::size_t b = 0; b < d; ++b) s += q[a][b] * z.at2(i, b);
      out.at2(i, a) = s;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("focal loss fixed values") {
  LossConfig cfg;
  cfg.focal_gamma = 0.0;
  // logit 0 -> p = 0.5; alpha-weighted cross-entropy 0.5 * ln 2
  CHECK(focal_loss(0.0, 1.0, cfg).value ==
        doctest::Approx(0.34657359027997265).epsilon(1e-14));

  LossConfig default_cfg;  // alpha 0.5, gamma 0.7
  CHECK(focal_loss(0.0, 1.0, default_cfg).value ==
        doctest::Approx(0.21334106974303916).epsilon(1e-14));
}

TEST_CASE("focal loss vanishes for a confident correct prediction") {
  LossConfig cfg;
  CHECK(focal_loss(30.0, 1.0, cfg).value == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(focal_loss(-30.0, 0.0, cfg).value == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("focal loss rejects out-of-range targets") {
  LossConfig cfg;
  CHECK_THROWS_AS(focal_loss(0.0, 1.5, cfg), DomainError);
  CHECK_THROWS_AS(focal_loss(0.0, -0.1, cfg), DomainError);
}

TEST_CASE("gamma zero with alpha half is exactly half binary cross-entropy") {
  LossConfig cfg;
  cfg.focal_alpha = 0.5;
  cfg.focal_gamma = 0.0;
  Rng rng(61);
  for (int i = 0; i < 1000; ++i) {
    const double logit = rng.uniform(-6.0, 6.0);
    const double target = rng.uniform();
    double p = sigmoid(logit);
    p = std::min(1.0 - cfg.probability_clamp, std::max(cfg.probability_clamp, p));
    const double bce = -(target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
    const double got = focal_loss(logit, target, cfg).value;
    CHECK(std::fabs(got - 0.5 * bce) <= 1e-12 * std::max(1.0, 0.5 * bce));
  }
}

TEST_CASE("focal loss is strictly decreasing in p for a live target") {
  LossConfig cfg;
  double prev = focal_loss(-8.0, 1.0, cfg).value;
  for (double logit = -7.75; logit <= 8.0; logit += 0.25) {
    const double cur = focal_loss(logit, 1.0, cfg).value;
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("focal gradient matches finite differences") {
  Rng rng(62);
  for (int i = 0; i < 100; ++i) {
    LossConfig cfg;
    cfg.focal_gamma = rng.uniform(0.0, 3.0);
    cfg.focal_alpha = rng.uniform(0.1, 0.9);
    const double target = rng.uniform();
    ScalarFn fn{
        [&](const Tensor& p) { return focal_loss(p[0], target, cfg).value; },
        [&](const Tensor& p) {
          Tensor g({1});
          g[0] = focal_loss(p[0], target, cfg).grad;
          return g;
        },
    };
    CHECK(check_gradient(fn, Tensor({1}, {rng.uniform(-5.0, 5.0)}), 1e-5, 1e-4).passed);
  }
}

TEST_CASE("focal batch is the mean of per-sample losses") {
  LossConfig cfg;
  const Tensor logits({3}, {-1.0, 0.3, 2.0});
  const std::vector<double> targets = {0.0, 0.7, 1.0};
  const BatchFocal batch = focal_loss_batch(logits, targets, cfg);
  double mean = 0.0;
  for (std::size_t i = 0; i < 3; ++i) mean += focal_loss(logits[i], targets[i], cfg).value;
  mean /= 3.0;
  CHECK(batch.value == doctest::Approx(mean).epsilon(1e-15));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(batch.grad_logits[i] ==
          doctest::Approx(focal_loss(logits[i], targets[i], cfg).grad / 3.0).epsilon(1e-15));
  }
}

TEST_CASE("supcon loss of identical same-class projections is zero") {
  Tensor z({4, 3});
  for (std::size_t i = 0; i < 4; ++i) {
    z.at2(i, 0) = 1.0;
  }
  const SupConResult r = supcon_loss(z, {1, 1, 1, 1}, 0.14);
  CHECK(r.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.valid_anchor_count == 4);
}

TEST_CASE("supcon loss with no positives is degenerate zero") {
  Tensor z({2, 2});
  z.at2(0, 0) = 1.0;
  z.at2(1, 1) = 1.0;
  const SupConResult r = supcon_loss(z, {0, 1}, 0.14);
  CHECK(r.value == 0.0);
  CHECK(r.valid_anchor_count == 0);
  CHECK(r.degenerate);
}

TEST_CASE("supcon loss rejects tiny batches") {
  Tensor z({1, 2});
  z.at2(0, 0) = 1.0;
  CHECK_THROWS_AS(supcon_loss(z, {1}, 0.14), DomainError);
}

TEST_CASE("supcon matches the double-loop reference") {
  Rng rng(63);
  const double temps[] = {0.07, 0.14, 0.5};
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rng.uniform_int(7);
    const Tensor z = random_unit_rows(rng, n, 8);
    std::vector<int> labels(n);
    for (int& l : labels) l = static_cast<int>(rng.uniform_int(2));
    for (double T : temps) {
      const double want = supcon_reference(z, labels, T);
      const double got = supcon_loss(z, labels, T).value;
      CHECK(std::fabs(got - want) <= 1e-10 * std::max(1.0, std::fabs(want)));
    }
  }
}

TEST_CASE("supcon invariances") {
  Rng rng(64);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 6;
    const Tensor z = random_unit_rows(rng, n, 8);
    std::vector<int> labels = {0, 0, 0, 1, 1, 1};
    const double base = supcon_loss(z, labels, 0.14).value;
    CHECK(base >= 0.0);

    // simultaneous permutation of rows and labels
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
    }
    Tensor zp(z.shape());
    std::vector<int> lp(n);
    for (std::size_t i = 0; i < n; ++i) {
      lp[i] = labels[perm[i]];
      for (std::size_t j = 0; j < 8; ++j) zp.at2(i, j) = z.at2(perm[i], j);
    }
    CHECK(std::fabs(supcon_loss(zp, lp, 0.14).value - base) <= 1e-9);

    // common rotation of all projections
    const auto q = random_rotation(rng, 8);
    CHECK(std::fabs(supcon_loss(rotate_rows(z, q), labels, 0.14).value - base) <= 1e-9);
  }
}

TEST_CASE("supcon gradient matches finite differences through normalization") {
  Rng rng(65);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 4;
    Tensor raw({n, 6});
    for (double& v : raw.values()) v = rng.normal();
    std::vector<int> labels = {0, 0, 1, 1};
    ScalarFn fn{
        [&](const Tensor& p) {
          return supcon_loss(l2_normalize_rows(p), labels, 0.14).value;
        },
        [&](const Tensor& p) {
          const Tensor z = l2_normalize_rows(p);
          const SupConResult r = supcon_loss(z, labels, 0.14);
          return l2_normalize_rows_backward(p, r.grad);
        },
    };
    CHECK(check_gradient(fn, raw, 1e-6, 1e-4).passed);
  }
}

TEST_CASE("combined objective honors the weighted-sum identity") {
  Rng rng(66);
  const std::size_t n = 6;
  Tensor logits({n});
  for (double& v : logits.values()) v = rng.normal();
  const Tensor z = random_unit_rows(rng, n, 8);
  std::vector<double> targets(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    targets[i] = rng.uniform();
    labels[i] = static_cast<int>(rng.uniform_int(2));
  }
  labels[0] = 0;
  labels[1] = 0;
  labels[2] = 1;
  labels[3] = 1;

  LossConfig cfg;
  const CombinedResult r = combined_objective(logits, targets, z, labels, cfg);
  CHECK(r.bundle.total ==
        doctest::Approx(r.bundle.focal + cfg.supcon_weight * r.bundle.supcon).epsilon(1e-15));
  CHECK(r.bundle.focal >= 0.0);
  CHECK(r.bundle.supcon >= 0.0);

  LossConfig no_supcon = cfg;
  no_supcon.supcon_weight = 0.0;
  const CombinedResult r0 = combined_objective(logits, targets, z, labels, no_supcon);
  CHECK(r0.bundle.total == r0.bundle.focal);
  for (double g : r0.grad_projections.values()) CHECK(g == 0.0);
}

TEST_CASE("combined objective degenerates to focal on a single-class batch") {
  Rng rng(67);
  const std::size_t n = 4;
  Tensor logits({n});
  for (double& v : logits.values()) v = rng.normal();
  const Tensor z = random_unit_rows(rng, n, 8);
  const std::vector<double> targets(n, 0.0);
  const std::vector<int> labels = {0, 0, 0, 0};
  // all one class: every anchor has positives, so use disjoint singleton
  // classes instead to exercise the degenerate path
  const std::vector<int> singletons = {0, 1, 2, 3};
  LossConfig cfg;
  const CombinedResult r = combined_objective(logits, targets, z, singletons, cfg);
  CHECK(r.bundle.supcon == 0.0);
  CHECK(r.bundle.total == r.bundle.focal);
  CHECK(r.bundle.supcon_degenerate);
}
