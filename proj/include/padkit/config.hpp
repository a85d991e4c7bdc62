#pragma once

#include <cstdint>
#include <string>

#include "padkit/augment.hpp"
#include "padkit/losses.hpp"
#include "padkit/model.hpp"
#include "padkit/optim.hpp"
#include "padkit/synth.hpp"

namespace padkit {

// One JSON document with key groups; every knob defaults to the values
// the toolkit trains with out of the box.
struct RunConfig {
  SynthConfig synth;
  AugmentConfig augment;
  LossConfig loss;
  OptimConfig optim;
  ModelDims model;
  double tau_sim = 0.9;
  std::uint64_t seed = 17;
  std::string out_dir = "out";

  // Derived: keeps synth/optim seeds and model input in sync with the
  // top-level seed and image size.
  void finalize();
  void validate() const;
};

RunConfig load_run_config(const std::string& path);
std::string run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const std::string& text);

// FNV-1a over the canonical JSON dump.
std::uint64_t config_hash(const RunConfig& config);
std::string hash_hex(std::uint64_t hash);

}  // namespace padkit
