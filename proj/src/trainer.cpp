#include "padkit/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <unordered_map>

#include "json.hpp"

namespace padkit {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<double> flatten_image(const Tensor& image) { return image.values(); }

Tensor batch_matrix(const std::vector<MixedSample>& batch, std::size_t input_dim) {
  Tensor x({batch.size(), input_dim});
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].image.size() != input_dim) {
      throw DimensionError("image size " + std::to_string(batch[i].image.size()) +
                           " does not match model input " + std::to_string(input_dim));
    }
    for (std::size_t j = 0; j < input_dim; ++j) x.at2(i, j) = batch[i].image[j];
  }
  return x;
}

AugmentConfig effective_augment(const TrainInputs& inputs) {
  AugmentConfig cfg = inputs.augment;
  if (!inputs.augment_lives) {
    // keep the draw pattern, neutralize every transform
    cfg.flip_prob = 0.0;
    cfg.brightness_contrast_range = 0.0;
    cfg.hue_sat_range = 0.0;
    cfg.gamma_min = cfg.gamma_max = 1.0;
    cfg.jpeg_quality_min = cfg.jpeg_quality_max = 100.0;
  }
  return cfg;
}

void write_string(std::ofstream& out, const std::string& s) {
  const std::uint32_t len = static_cast<std::uint32_t>(s.size());
  out.write(reinterpret_cast<const char*>(&len), 4);
  out.write(s.data(), len);
}

std::string read_string(std::ifstream& in) {
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), 4);
  std::string s(len, '\0');
  in.read(s.data(), len);
  return s;
}

void write_tensor_data(std::ofstream& out, const Tensor& t) {
  out.write(reinterpret_cast<const char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
}

void read_tensor_data(std::ifstream& in, Tensor& t) {
  in.read(reinterpret_cast<char*>(t.data()),
          static_cast<std::streamsize>(t.size() * sizeof(double)));
}

void write_shape(std::ofstream& out, const Tensor& t) {
  const std::uint32_t rank = static_cast<std::uint32_t>(t.rank());
  out.write(reinterpret_cast<const char*>(&rank), 4);
  for (std::size_t e : t.shape()) {
    const std::uint64_t v = e;
    out.write(reinterpret_cast<const char*>(&v), 8);
  }
}

std::vector<std::size_t> read_shape(std::ifstream& in) {
  std::uint32_t rank = 0;
  in.read(reinterpret_cast<char*>(&rank), 4);
  std::vector<std::size_t> shape(rank);
  for (std::uint32_t i = 0; i < rank; ++i) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    shape[i] = v;
  }
  return shape;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out.write("PDK1", 4);
  const std::uint32_t version = 1;
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&ckpt.config_hash), 8);
  const std::uint64_t epoch = ckpt.epoch;
  out.write(reinterpret_cast<const char*>(&epoch), 8);
  out.write(reinterpret_cast<const char*>(&ckpt.val_eer), 8);
  const std::uint64_t dims[5] = {ckpt.dims.input, ckpt.dims.hidden, ckpt.dims.feature,
                                 ckpt.dims.proj_hidden, ckpt.dims.proj_out};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  write_string(out, ckpt.rng_state);

  const std::uint32_t blocks = static_cast<std::uint32_t>(ckpt.params.size());
  out.write(reinterpret_cast<const char*>(&blocks), 4);
  for (std::size_t i = 0; i < ckpt.params.size(); ++i) {
    write_string(out, ckpt.block_names[i]);
    write_shape(out, ckpt.params[i]);
    write_tensor_data(out, ckpt.params[i]);
  }
  const std::uint64_t opt_step = ckpt.opt_state.step;
  out.write(reinterpret_cast<const char*>(&opt_step), 8);
  for (const Tensor& t : ckpt.opt_state.m) write_tensor_data(out, t);
  for (const Tensor& t : ckpt.opt_state.v) write_tensor_data(out, t);
  if (!out) throw IoError("write failure on checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::string(magic, 4) != "PDK1") throw ParseError("bad checkpoint magic: " + path);
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  if (version != 1) throw ParseError("unsupported checkpoint version");

  Checkpoint ckpt;
  in.read(reinterpret_cast<char*>(&ckpt.config_hash), 8);
  std::uint64_t epoch = 0;
  in.read(reinterpret_cast<char*>(&epoch), 8);
  ckpt.epoch = epoch;
  in.read(reinterpret_cast<char*>(&ckpt.val_eer), 8);
  std::uint64_t dims[5];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  ckpt.dims = {dims[0], dims[1], dims[2], dims[3], dims[4]};
  ckpt.rng_state = read_string(in);

  std::uint32_t blocks = 0;
  in.read(reinterpret_cast<char*>(&blocks), 4);
  for (std::uint32_t i = 0; i < blocks; ++i) {
    ckpt.block_names.push_back(read_string(in));
    Tensor t(read_shape(in));
    read_tensor_data(in, t);
    ckpt.params.push_back(std::move(t));
  }
  std::uint64_t opt_step = 0;
  in.read(reinterpret_cast<char*>(&opt_step), 8);
  ckpt.opt_state.step = opt_step;
  for (std::uint32_t i = 0; i < blocks; ++i) {
    Tensor t(ckpt.params[i].shape());
    read_tensor_data(in, t);
    ckpt.opt_state.m.push_back(std::move(t));
  }
  for (std::uint32_t i = 0; i < blocks; ++i) {
    Tensor t(ckpt.params[i].shape());
    read_tensor_data(in, t);
    ckpt.opt_state.v.push_back(std::move(t));
  }
  if (!in) throw ParseError("truncated checkpoint: " + path);
  return ckpt;
}

ScoreSet score_samples(const ToyModel& model, const std::vector<Sample>& samples) {
  ScoreSet scores;
  const std::size_t input_dim = model.dims().input;
  for (const Sample& s : samples) {
    if (!s.valid) continue;
    Tensor x({1, input_dim}, flatten_image(s.image));
    const ToyModel::Forward f = model.forward(x);
    scores.push(sigmoid(f.logits[0]), s.label);
  }
  return scores;
}

TrainResult train(const TrainInputs& inputs) {
  inputs.optim.validate();
  inputs.loss.validate();
  inputs.augment.validate();
  if (inputs.pairs->empty()) throw ConfigError("train: empty pair set");
  if (inputs.validation->empty()) throw ConfigError("train: empty validation set");

  std::unordered_map<std::string, const Sample*> by_id;
  for (const Sample& s : *inputs.train_samples) by_id[s.id] = &s;
  auto sample_of = [&](const std::string& id) -> const Sample& {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw IntegrityError("train: unknown sample id " + id);
    return *it->second;
  };

  const AugmentConfig aug = effective_augment(inputs);
  Rng stream(inputs.optim.seed);
  ToyModel model(inputs.dims, stream);

  std::vector<Tensor> params;
  for (std::size_t i = 0; i < model.block_count(); ++i) params.push_back(model.block(i));
  AdamState opt = AdamState::like(params);

  const std::size_t pair_take = (inputs.pairs->size() + 1) / 2;
  const std::size_t per_batch = inputs.optim.batch_size / 2;
  std::size_t batches_per_epoch = 0;
  for (std::size_t start = 0; start < pair_take; start += per_batch) {
    if (std::min(start + per_batch, pair_take) - start >= 2) ++batches_per_epoch;
  }
  if (batches_per_epoch == 0) throw ConfigError("train: too few pairs for one batch");
  const std::size_t total_steps = inputs.optim.epochs * batches_per_epoch;

  TrainResult result;
  bool have_best = false;
  std::size_t global_step = 0;

  for (std::size_t epoch = 0; epoch < inputs.optim.epochs; ++epoch) {
    const std::vector<PairedBatchPlan> plans =
        plan_epoch(*inputs.pairs, inputs.optim.batch_size, stream);

    EpochRecord rec;
    rec.epoch = epoch;
    bool diverged = false;
    for (const PairedBatchPlan& plan : plans) {
      std::vector<BatchSlot> slots;
      for (const std::string& id : plan.flat_order()) {
        const Sample& s = sample_of(id);
        slots.push_back({s.id, s.label, s.image});
      }
      const std::vector<MixedSample> mixed = apply_batch_policy(slots, aug, stream);

      Tensor x = batch_matrix(mixed, inputs.dims.input);
      const ToyModel::Forward fwd = model.forward(x);

      std::vector<double> focal_targets;
      std::vector<int> supcon_labels;
      for (const MixedSample& m : mixed) {
        focal_targets.push_back(m.focal_target);
        supcon_labels.push_back(m.supcon_label == Label::Live ? 1 : 0);
      }
      const CombinedResult loss =
          combined_objective(fwd.logits, focal_targets, fwd.projections, supcon_labels,
                             inputs.loss);
      if (!std::isfinite(loss.bundle.total)) {
        diverged = true;
        break;
      }
      rec.mean_focal += loss.bundle.focal;
      rec.mean_supcon += loss.bundle.supcon;
      rec.mean_total += loss.bundle.total;

      const std::vector<Tensor> grads =
          model.backward(fwd, loss.grad_logits, loss.grad_projections);
      const double lr = lr_at(global_step, total_steps, inputs.optim);
      rec.lr_last = lr;
      for (std::size_t i = 0; i < params.size(); ++i) params[i] = model.block(i);
      adamw_step(params, grads, opt, lr, inputs.optim);
      for (std::size_t i = 0; i < params.size(); ++i) model.block(i) = params[i];
      ++global_step;
    }
    if (diverged) {
      result.aborted = true;
      break;
    }
    const double inv = 1.0 / static_cast<double>(plans.size());
    rec.mean_focal *= inv;
    rec.mean_supcon *= inv;
    rec.mean_total *= inv;

    const ScoreSet val_scores = score_samples(model, *inputs.validation);
    rec.val_eer = eer(val_scores).value;
    rec.val_acer = acer_at(val_scores, 0.5).acer;
    result.history.push_back(rec);

    if (!have_best || rec.val_eer < result.best.val_eer) {
      have_best = true;
      result.best.dims = inputs.dims;
      result.best.block_names.clear();
      result.best.params.clear();
      for (std::size_t i = 0; i < model.block_count(); ++i) {
        result.best.block_names.push_back(model.block_name(i));
        result.best.params.push_back(model.block(i));
      }
      result.best.opt_state = opt;
      result.best.epoch = epoch;
      result.best.val_eer = rec.val_eer;
      result.best.rng_state = stream.serialize_state();
      result.best.config_hash = inputs.config_hash;
    }
  }
  if (!have_best) throw TrainingError("training diverged before completing one epoch");
  return result;
}

void write_history_jsonl(const std::vector<EpochRecord>& history, const std::string& path,
                         std::uint64_t config_hash, std::uint64_t seed) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write history: " + path);
  nlohmann::json header;
  header["config_hash"] = config_hash;
  header["seed"] = seed;
  out << header.dump() << "\n";
  for (const EpochRecord& r : history) {
    nlohmann::json obj;
    obj["epoch"] = r.epoch;
    obj["mean_focal"] = r.mean_focal;
    obj["mean_supcon"] = r.mean_supcon;
    obj["mean_total"] = r.mean_total;
    obj["val_eer"] = r.val_eer;
    obj["val_acer"] = r.val_acer;
    obj["lr_last"] = r.lr_last;
    out << obj.dump() << "\n";
  }
}

}  // namespace padkit
