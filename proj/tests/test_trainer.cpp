#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include "doctest.h"
#include "padkit/optim.hpp"
#include "padkit/pairmine.hpp"
#include "padkit/synth.hpp"
#include "padkit/trainer.hpp"

using namespace padkit;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "padkit_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

struct TinySetup {
  SyntheticDataset data;
  std::vector<TrainPair> pairs;
  std::vector<Sample> validation;
  TrainInputs inputs;
};

TinySetup tiny_setup(std::uint64_t seed = 17, std::size_t epochs = 3) {
  TinySetup setup;
  SynthConfig synth;
  synth.n_identities = 6;
  synth.lives_per_identity = 3;
  synth.attacks_per_identity_per_category = {
      {AttackCategory::PixelLevel, 2},
      {AttackCategory::SemanticLevel, 2},
      {AttackCategory::Replay, 1},
  };
  synth.image_size = 8;
  synth.seed = seed;
  setup.data = generate_synthetic(synth);
  setup.pairs = filter_pairs(setup.data.samples, setup.data.embeddings, 0.9).pairs;

  SynthConfig val_cfg = synth;
  val_cfg.seed = seed + 1000;
  setup.validation = generate_synthetic(val_cfg).samples;

  setup.inputs.train_samples = &setup.data.samples;
  setup.inputs.pairs = &setup.pairs;
  setup.inputs.validation = &setup.validation;
  setup.inputs.optim.epochs = epochs;
  setup.inputs.optim.batch_size = 8;
  setup.inputs.optim.seed = seed;
  setup.inputs.dims.input = 8 * 8 * 3;
  setup.inputs.dims.hidden = 16;
  setup.inputs.dims.feature = 16;
  setup.inputs.dims.proj_hidden = 16;
  setup.inputs.dims.proj_out = 8;
  setup.inputs.config_hash = 0xABCD;
  return setup;
}

}  // namespace

TEST_CASE("learning-rate schedule endpoints are exact") {
  OptimConfig cfg;
  const std::size_t total = 200;
  const std::size_t warmup = 10;  // ceil(0.05 * 200)
  CHECK(lr_at(0, total, cfg) == 0.0);
  CHECK(lr_at(warmup, total, cfg) == 1.82e-4);
  CHECK(lr_at(total - 1, total, cfg) == 6.8e-7);
  CHECK_THROWS_AS(lr_at(total, total, cfg), DomainError);
}

TEST_CASE("learning-rate warmup is linear and the tail is monotone") {
  OptimConfig cfg;
  const std::size_t total = 400;
  const std::size_t warmup = 20;
  for (std::size_t s = 0; s < warmup; ++s) {
    CHECK(lr_at(s, total, cfg) ==
          doctest::Approx(cfg.peak_lr * static_cast<double>(s) / 20.0).epsilon(1e-15));
  }
  double prev = lr_at(warmup, total, cfg);
  for (std::size_t s = warmup + 1; s < total; ++s) {
    const double cur = lr_at(s, total, cfg);
    CHECK(cur <= prev);
    prev = cur;
  }
}

TEST_CASE("cosine midpoint is the endpoint average") {
  OptimConfig cfg;
  // total 101: warmup 6, span 94, so step 53 sits exactly halfway
  const double mid = lr_at(53, 101, cfg);
  CHECK(std::fabs(mid - (cfg.peak_lr + cfg.floor_lr) / 2.0) <= 1e-15);
}

TEST_CASE("adamw leaves parameters alone for zero gradient and zero decay") {
  OptimConfig cfg;
  cfg.weight_decay = 0.0;
  std::vector<Tensor> params = {Tensor({3}, {1.0, -2.0, 0.5})};
  const std::vector<Tensor> grads = {Tensor({3})};
  AdamState state = AdamState::like(params);
  adamw_step(params, grads, state, 1e-3, cfg);
  CHECK(params[0].values() == std::vector<double>{1.0, -2.0, 0.5});
}

TEST_CASE("adamw with zero gradient applies a pure multiplicative shrink") {
  OptimConfig cfg;
  cfg.weight_decay = 0.01;
  std::vector<Tensor> params = {Tensor({2}, {4.0, -8.0})};
  const std::vector<Tensor> grads = {Tensor({2})};
  AdamState state = AdamState::like(params);
  const double lr = 0.5;
  adamw_step(params, grads, state, lr, cfg);
  const double shrink = 1.0 - lr * cfg.weight_decay;
  CHECK(params[0][0] == 4.0 * shrink);
  CHECK(params[0][1] == -8.0 * shrink);
}

TEST_CASE("adamw trajectory matches an independent scalar reimplementation") {
  OptimConfig cfg;
  cfg.weight_decay = 0.004;
  std::vector<Tensor> params = {Tensor({1}, {1.5})};
  AdamState state = AdamState::like(params);

  double x = 1.5, m = 0.0, v = 0.0;
  const double lr = 0.05;
  for (int step = 1; step <= 10; ++step) {
    // objective f(x) = x^2, gradient 2x
    const std::vector<Tensor> grads = {Tensor({1}, {2.0 * params[0][0]})};
    adamw_step(params, grads, state, lr, cfg);

    const double g = 2.0 * x;
    x *= 1.0 - lr * cfg.weight_decay;
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
    const double mh = m / (1.0 - std::pow(cfg.beta1, step));
    const double vh = v / (1.0 - std::pow(cfg.beta2, step));
    x -= lr * mh / (std::sqrt(vh) + cfg.adam_epsilon);

    CHECK(std::fabs(params[0][0] - x) <= 1e-12);
  }
}

TEST_CASE("adamw rejects non-finite gradients naming the block") {
  OptimConfig cfg;
  std::vector<Tensor> params = {Tensor({1}, {1.0}), Tensor({1}, {2.0})};
  std::vector<Tensor> grads = {Tensor({1}, {0.0}), Tensor({1}, {0.0})};
  grads[1][0] = std::numeric_limits<double>::quiet_NaN();
  AdamState state = AdamState::like(params);
  try {
    adamw_step(params, grads, state, 1e-3, cfg);
    FAIL("expected TrainingError");
  } catch (const TrainingError& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("model projections are unit rows and the parameter budget holds") {
  ModelDims dims;
  Rng rng(17);
  const ToyModel model(dims, rng);
  CHECK(model.parameter_count() <= 100000);

  Tensor x({3, dims.input});
  Rng data_rng(5);
  for (double& v : x.values()) v = data_rng.uniform();
  const ToyModel::Forward fwd = model.forward(x);
  for (std::size_t i = 0; i < 3; ++i) {
    double norm = 0.0;
    for (std::size_t j = 0; j < dims.proj_out; ++j) {
      norm += fwd.projections.at2(i, j) * fwd.projections.at2(i, j);
    }
    CHECK(std::fabs(std::sqrt(norm) - 1.0) <= 1e-12);
  }
}

TEST_CASE("checkpoint save-load-save is byte identical") {
  TinySetup setup = tiny_setup();
  const TrainResult result = train(setup.inputs);
  const fs::path p1 = temp_file("ckpt_a.bin");
  const fs::path p2 = temp_file("ckpt_b.bin");
  save_checkpoint(result.best, p1.string());
  const Checkpoint loaded = load_checkpoint(p1.string());
  save_checkpoint(loaded, p2.string());
  CHECK(read_bytes(p1) == read_bytes(p2));
  CHECK(loaded.epoch == result.best.epoch);
  CHECK(loaded.val_eer == result.best.val_eer);
  CHECK(loaded.config_hash == result.best.config_hash);
  REQUIRE(loaded.params.size() == result.best.params.size());
  for (std::size_t i = 0; i < loaded.params.size(); ++i) {
    CHECK(loaded.params[i] == result.best.params[i]);
    CHECK(loaded.block_names[i] == result.best.block_names[i]);
  }
}

TEST_CASE("training is deterministic and selects the minimum-eer epoch") {
  TinySetup a = tiny_setup(23, 4);
  TinySetup b = tiny_setup(23, 4);
  const TrainResult ra = train(a.inputs);
  const TrainResult rb = train(b.inputs);

  REQUIRE(ra.history.size() == rb.history.size());
  for (std::size_t i = 0; i < ra.history.size(); ++i) {
    CHECK(ra.history[i].val_eer == rb.history[i].val_eer);
    CHECK(ra.history[i].mean_total == rb.history[i].mean_total);
  }
  for (std::size_t i = 0; i < ra.best.params.size(); ++i) {
    CHECK(ra.best.params[i] == rb.best.params[i]);
  }

  double min_eer = 1.0;
  std::size_t first_argmin = 0;
  for (const EpochRecord& rec : ra.history) {
    if (rec.val_eer < min_eer) {
      min_eer = rec.val_eer;
      first_argmin = rec.epoch;
    }
  }
  CHECK(ra.best.val_eer == min_eer);
  CHECK(ra.best.epoch == first_argmin);
}

TEST_CASE("training beats the no-skill validation error after the run") {
  TinySetup setup = tiny_setup(17, 3);
  const TrainResult result = train(setup.inputs);
  REQUIRE(!result.history.empty());
  CHECK(result.best.val_eer < 0.5);
}

TEST_CASE("history file embeds the config hash and one record per epoch") {
  TinySetup setup = tiny_setup(17, 3);
  const TrainResult result = train(setup.inputs);
  const fs::path path = temp_file("history_check.jsonl");
  write_history_jsonl(result.history, path.string(), setup.inputs.config_hash, 17);
  std::ifstream in(path);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    if (lines == 0) CHECK(line.find("config_hash") != std::string::npos);
    ++lines;
  }
  CHECK(lines == result.history.size() + 1);
}

TEST_CASE("train rejects empty inputs") {
  TinySetup setup = tiny_setup();
  std::vector<TrainPair> no_pairs;
  setup.inputs.pairs = &no_pairs;
  CHECK_THROWS_AS(train(setup.inputs), ConfigError);

  TinySetup setup2 = tiny_setup();
  std::vector<Sample> no_val;
  setup2.inputs.validation = &no_val;
  CHECK_THROWS_AS(train(setup2.inputs), ConfigError);
}
