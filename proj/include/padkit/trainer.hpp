#pragma once

#include <map>
#include <string>
#include <vector>

#include "padkit/augment.hpp"
#include "padkit/data.hpp"
#include "padkit/losses.hpp"
#include "padkit/metrics.hpp"
#include "padkit/model.hpp"
#include "padkit/optim.hpp"
#include "padkit/pairmine.hpp"
#include "padkit/sampler.hpp"

namespace padkit {

struct EpochRecord {
  std::size_t epoch = 0;
  double mean_focal = 0.0;
  double mean_supcon = 0.0;
  double mean_total = 0.0;
  double val_eer = 0.0;
  double val_acer = 0.0;
  double lr_last = 0.0;
};

struct Checkpoint {
  ModelDims dims;
  std::vector<std::string> block_names;
  std::vector<Tensor> params;
  AdamState opt_state;
  std::size_t epoch = 0;
  double val_eer = 0.0;
  std::string rng_state;
  std::uint64_t config_hash = 0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

struct TrainResult {
  Checkpoint best;
  std::vector<EpochRecord> history;
  bool aborted = false;  // divergence stop; best holds the last good state
};

struct TrainInputs {
  const std::vector<Sample>* train_samples;
  const std::vector<TrainPair>* pairs;
  const std::vector<Sample>* validation;
  AugmentConfig augment;
  LossConfig loss;
  OptimConfig optim;
  ModelDims dims;
  std::uint64_t config_hash = 0;
  bool augment_lives = true;  // ablation switch
};

TrainResult train(const TrainInputs& inputs);

// Liveness scores (sigmoid of the classification logit) for a sample set.
ScoreSet score_samples(const ToyModel& model, const std::vector<Sample>& samples);

void write_history_jsonl(const std::vector<EpochRecord>& history, const std::string& path,
                         std::uint64_t config_hash, std::uint64_t seed);

}  // namespace padkit
