#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "padkit/config.hpp"
#include "padkit/metrics.hpp"
#include "padkit/pairmine.hpp"
#include "padkit/trainer.hpp"

namespace padkit {

struct SynthPaths {
  std::string manifest;
  std::string embeddings_jsonl;
  std::string embeddings_binary;
};

SynthPaths cmd_synth(const RunConfig& config);

FilterResult cmd_filter(const RunConfig& config, const std::string& manifest_path,
                        const std::string& embeddings_path, double tau_sim,
                        const std::string& pairs_out, const std::string& report_out);

struct TrainOverrides {
  bool use_supcon = true;
  bool augment_lives = true;
  bool use_cutmix = true;
};

struct TrainOutputs {
  TrainResult result;
  std::string checkpoint_path;
  std::string history_path;
  EvalReport validation_report;  // from the best checkpoint, threshold 0.5
};

// Full pipeline on synthetic data: generate, filter, train, checkpoint.
TrainOutputs cmd_train(const RunConfig& config, const TrainOverrides& overrides = {});

ToyModel model_from_checkpoint(const Checkpoint& ckpt);

// Held-out set from a seed-shifted generator run (disjoint identities).
std::vector<Sample> make_validation_set(const RunConfig& config);

EvalReport cmd_eval_checkpoint(const RunConfig& config, const std::string& checkpoint_path,
                               const std::string& manifest_path, const std::string& report_out,
                               bool force_hash = false);
EvalReport cmd_eval_scores(const std::string& scores_csv, const std::string& report_out);

struct SweepRow {
  double tau = 0.0;
  std::size_t dataset_size = 0;
  double acer = 0.0, acc = 0.0, auc = 0.0, eer = 0.0;
  bool failed = false;
  std::string error;
};

std::vector<SweepRow> cmd_sweep(const RunConfig& config, const std::vector<double>& grid,
                                const std::string& csv_out);

struct AblationRow {
  std::string setup;
  double mean_acer = 0.0, mean_acc = 0.0, mean_auc = 0.0;
  std::vector<double> acers;  // per seed
};

std::vector<AblationRow> cmd_ablate(const RunConfig& config, std::size_t k_seeds,
                                    const std::string& csv_out);

// Full finite-difference verification suite; returns true if all pass.
bool cmd_gradcheck(std::ostream& out);

}  // namespace padkit
