#include "padkit/optim.hpp"

#include <cmath>

namespace padkit {

void OptimConfig::validate() const {
  if (!(floor_lr > 0.0) || !(floor_lr < peak_lr)) {
    throw ConfigError("need 0 < floor_lr < peak_lr");
  }
  if (warmup_fraction <= 0.0 || warmup_fraction >= 1.0) {
    throw ConfigError("warmup_fraction must be in (0,1)");
  }
  if (batch_size < 4 || batch_size % 2 != 0) {
    throw ConfigError("batch_size must be even and >= 4");
  }
  if (epochs == 0) throw ConfigError("epochs must be positive");
}

double lr_at(std::size_t step, std::size_t total_steps, const OptimConfig& config) {
  if (step >= total_steps) {
    throw DomainError("lr_at: step " + std::to_string(step) + " out of range [0, " +
                      std::to_string(total_steps) + ")");
  }
  const std::size_t warmup = static_cast<std::size_t>(
      std::ceil(config.warmup_fraction * static_cast<double>(total_steps)));
  if (step < warmup) {
    return config.peak_lr * static_cast<double>(step) / static_cast<double>(warmup);
  }
  const std::size_t span = total_steps - 1 - warmup;
  if (span == 0) return config.peak_lr;
  const double t = static_cast<double>(step - warmup) / static_cast<double>(span);
  return config.floor_lr +
         (config.peak_lr - config.floor_lr) * 0.5 * (1.0 + std::cos(3.14159265358979323846 * t));
}

AdamState AdamState::like(const std::vector<Tensor>& params) {
  AdamState s;
  for (const Tensor& p : params) {
    s.m.push_back(Tensor(p.shape()));
    s.v.push_back(Tensor(p.shape()));
  }
  return s;
}

void adamw_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads, AdamState& state,
                double lr, const OptimConfig& config) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw DimensionError("adamw_step: parameter/gradient/state count mismatch");
  }
  state.step++;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (!params[b].same_shape(grads[b])) {
      throw DimensionError("adamw_step: shape mismatch on block " + std::to_string(b));
    }
    if (!grads[b].all_finite()) {
      throw TrainingError("non-finite gradient in parameter block " + std::to_string(b));
    }
    Tensor& p = params[b];
    Tensor& m = state.m[b];
    Tensor& v = state.v[b];
    const Tensor& g = grads[b];
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] *= 1.0 - lr * config.weight_decay;
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p[i] -= lr * mhat / (std::sqrt(vhat) + config.adam_epsilon);
    }
  }
}

}  // namespace padkit
