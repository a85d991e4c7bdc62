#pragma once

#include <cstdint>
#include <vector>

#include "padkit/tensor.hpp"

namespace padkit {

struct OptimConfig {
  double peak_lr = 1.82e-4;
  double floor_lr = 6.8e-7;
  double warmup_fraction = 0.05;
  double weight_decay = 1.1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  std::uint64_t seed = 17;

  void validate() const;
};

// Linear ramp 0 -> peak over the first ceil(warmup_fraction * total)
// steps, then a single cosine cycle from peak to floor; lr at the last
// step is exactly floor_lr.
double lr_at(std::size_t step, std::size_t total_steps, const OptimConfig& config);

struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::size_t step = 0;

  static AdamState like(const std::vector<Tensor>& params);
};

// Decoupled weight decay: params *= (1 - lr * weight_decay), applied
// independently of the gradient update.
void adamw_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads, AdamState& state,
                double lr, const OptimConfig& config);

}  // namespace padkit
