#include "padkit/losses.hpp"

#include <algorithm>
#include <cmath>

namespace padkit {

void LossConfig::validate() const {
  if (supcon_temperature <= 0.0) throw ConfigError("supcon_temperature must be positive");
  if (supcon_weight < 0.0) throw ConfigError("supcon_weight must be non-negative");
  if (probability_clamp <= 0.0 || probability_clamp >= 0.5) {
    throw ConfigError("probability_clamp must be in (0, 0.5)");
  }
  if (focal_alpha <= 0.0 || focal_alpha >= 1.0) throw ConfigError("focal_alpha must be in (0,1)");
  if (focal_gamma < 0.0) throw ConfigError("focal_gamma must be non-negative");
}

namespace {

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

ScalarLoss focal_loss(double logit, double target, const LossConfig& config) {
  if (target < 0.0 || target > 1.0) {
    throw DomainError("focal_loss target must be in [0,1], got " + std::to_string(target));
  }
  const double eps = config.probability_clamp;
  const double s = sigmoid(logit);
  const double p = std::min(1.0 - eps, std::max(eps, s));
  const double a = config.focal_alpha;
  const double g = config.focal_gamma;

  const double pos = a * std::pow(1.0 - p, g) * std::log(p);
  const double neg = (1.0 - a) * std::pow(p, g) * std::log(1.0 - p);
  ScalarLoss out;
  out.value = -(target * pos + (1.0 - target) * neg);

  double dpos = a * (std::pow(1.0 - p, g) / p -
                     (g > 0.0 ? g * std::pow(1.0 - p, g - 1.0) * std::log(p) : 0.0));
  double dneg = (1.0 - a) * ((g > 0.0 ? g * std::pow(p, g - 1.0) * std::log(1.0 - p) : 0.0) -
                             std::pow(p, g) / (1.0 - p));
  const double dloss_dp = -(target * dpos + (1.0 - target) * dneg);
  const double dp_dlogit = (s > eps && s < 1.0 - eps) ? s * (1.0 - s) : 0.0;
  out.grad = dloss_dp * dp_dlogit;
  return out;
}

BatchFocal focal_loss_batch(const Tensor& logits, const std::vector<double>& targets,
                            const LossConfig& config) {
  if (logits.size() != targets.size()) {
    throw DimensionError("focal_loss_batch: " + std::to_string(logits.size()) + " logits vs " +
                         std::to_string(targets.size()) + " targets");
  }
  BatchFocal out;
  out.grad_logits = Tensor({logits.size()});
  const double inv_n = 1.0 / static_cast<double>(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const ScalarLoss l = focal_loss(logits[i], targets[i], config);
    out.value += l.value * inv_n;
    out.grad_logits[i] = l.grad * inv_n;
  }
  return out;
}

SupConResult supcon_loss(const Tensor& projections, const std::vector<int>& labels,
                         double temperature) {
  if (projections.rank() != 2) throw DimensionError("supcon_loss expects an N x D matrix");
  const std::size_t n = projections.extent(0), d = projections.extent(1);
  if (n < 2) throw DomainError("supcon_loss needs at least 2 samples");
  if (labels.size() != n) {
    throw DimensionError("supcon_loss: " + std::to_string(n) + " projections vs " +
                         std::to_string(labels.size()) + " labels");
  }
  if (temperature <= 0.0) throw DomainError("supcon_loss temperature must be positive");

  // s_ij = <z_i, z_j> / T
  std::vector<double> sim(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < d; ++k) dot += projections.at2(i, k) * projections.at2(j, k);
      sim[i * n + j] = sim[j * n + i] = dot / temperature;
    }
  }

  SupConResult out;
  out.grad = Tensor({n, d});
  std::vector<double> ds(n * n, 0.0);

  std::size_t valid = 0;
  double total = 0.0;
  std::vector<std::size_t> anchors;
  for (std::size_t i = 0; i < n; ++i) {
    bool has_pos = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && labels[j] == labels[i]) {
        has_pos = true;
        break;
      }
    }
    if (has_pos) anchors.push_back(i);
  }
  valid = anchors.size();
  if (valid == 0) {
    out.degenerate = true;
    return out;
  }

  const double inv_m = 1.0 / static_cast<double>(valid);
  for (std::size_t i : anchors) {
    double mx = -1e300;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) mx = std::max(mx, sim[i * n + j]);
    }
    double pos_sum = 0.0, full_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double e = std::exp(sim[i * n + j] - mx);
      full_sum += e;
      if (labels[j] == labels[i]) pos_sum += e;
    }
    total += std::log(full_sum) - std::log(pos_sum);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double e = std::exp(sim[i * n + j] - mx);
      double g = e / full_sum;
      if (labels[j] == labels[i]) g -= e / pos_sum;
      ds[i * n + j] += g * inv_m;
    }
  }
  out.value = std::max(0.0, total * inv_m);  // clip -0.0 / roundoff at the identity case
  out.valid_anchor_count = static_cast<int>(valid);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double g = ds[i * n + j];
      if (g == 0.0) continue;
      for (std::size_t k = 0; k < d; ++k) {
        out.grad.at2(i, k) += g * projections.at2(j, k) / temperature;
        out.grad.at2(j, k) += g * projections.at2(i, k) / temperature;
      }
    }
  }
  return out;
}

CombinedResult combined_objective(const Tensor& logits, const std::vector<double>& focal_targets,
                                  const Tensor& projections, const std::vector<int>& supcon_labels,
                                  const LossConfig& config) {
  config.validate();
  const BatchFocal focal = focal_loss_batch(logits, focal_targets, config);
  SupConResult supcon;
  if (config.supcon_weight > 0.0) {
    supcon = supcon_loss(projections, supcon_labels, config.supcon_temperature);
  } else {
    // disabled term: plain focal training, projections carry no gradient
    supcon.grad = Tensor(projections.shape());
    supcon.degenerate = true;
  }

  CombinedResult out;
  out.bundle.focal = focal.value;
  out.bundle.supcon = supcon.value;
  out.bundle.total = focal.value + config.supcon_weight * supcon.value;
  out.bundle.valid_anchor_count = supcon.valid_anchor_count;
  out.bundle.supcon_degenerate = supcon.degenerate;
  out.grad_logits = focal.grad_logits;
  out.grad_projections = supcon.grad;
  for (double& v : out.grad_projections.values()) v *= config.supcon_weight;
  return out;
}

}  // namespace padkit
