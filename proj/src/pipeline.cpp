#include "padkit/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "padkit/gradcheck.hpp"
#include "padkit/synth.hpp"

namespace padkit {

namespace fs = std::filesystem;

SynthPaths cmd_synth(const RunConfig& config) {
  config.validate();
  fs::create_directories(config.out_dir);
  const SyntheticDataset data = generate_synthetic(config.synth);
  SynthPaths paths;
  paths.manifest = (fs::path(config.out_dir) / "manifest.jsonl").string();
  paths.embeddings_jsonl = (fs::path(config.out_dir) / "embeddings.jsonl").string();
  paths.embeddings_binary = (fs::path(config.out_dir) / "embeddings.bin").string();
  write_manifest(data.samples, paths.manifest);
  write_embeddings_jsonl(data.embeddings, paths.embeddings_jsonl);
  write_embeddings_binary(data.embeddings, paths.embeddings_binary);
  return paths;
}

FilterResult cmd_filter(const RunConfig& config, const std::string& manifest_path,
                        const std::string& embeddings_path, double tau_sim,
                        const std::string& pairs_out, const std::string& report_out) {
  const std::vector<Sample> samples = load_manifest(manifest_path);
  const EmbeddingLoadResult embeddings = load_embeddings_checked(embeddings_path, samples);
  FilterResult result = filter_pairs(samples, embeddings.store, tau_sim);
  if (!pairs_out.empty()) write_pairs_jsonl(result.pairs, pairs_out);
  if (!report_out.empty()) {
    write_filter_report(result.report, report_out, hash_hex(config_hash(config)));
  }
  return result;
}

std::vector<Sample> make_validation_set(const RunConfig& config) {
  SynthConfig val_cfg = config.synth;
  val_cfg.seed = config.synth.seed * 2654435761ULL + 101;  // disjoint identity draw
  return generate_synthetic(val_cfg).samples;
}

ToyModel model_from_checkpoint(const Checkpoint& ckpt) {
  return ToyModel::from_params(ckpt.dims, ckpt.block_names, ckpt.params);
}

TrainOutputs cmd_train(const RunConfig& config, const TrainOverrides& overrides) {
  config.validate();
  fs::create_directories(config.out_dir);

  const SyntheticDataset data = generate_synthetic(config.synth);
  const FilterResult filtered = filter_pairs(data.samples, data.embeddings, config.tau_sim);
  if (filtered.pairs.empty()) {
    throw DomainError("cmd_train: no pairs retained at tau_sim " + std::to_string(config.tau_sim));
  }
  const std::vector<Sample> validation = make_validation_set(config);

  TrainInputs inputs;
  inputs.train_samples = &data.samples;
  inputs.pairs = &filtered.pairs;
  inputs.validation = &validation;
  inputs.augment = config.augment;
  if (!overrides.use_cutmix) inputs.augment.cutmix_prob = 0.0;
  inputs.loss = config.loss;
  if (!overrides.use_supcon) inputs.loss.supcon_weight = 0.0;
  inputs.optim = config.optim;
  inputs.dims = config.model;
  inputs.config_hash = config_hash(config);
  inputs.augment_lives = overrides.augment_lives;

  TrainOutputs out;
  out.result = train(inputs);
  out.checkpoint_path = (fs::path(config.out_dir) / "checkpoint.bin").string();
  out.history_path = (fs::path(config.out_dir) / "history.jsonl").string();
  save_checkpoint(out.result.best, out.checkpoint_path);
  write_history_jsonl(out.result.history, out.history_path, inputs.config_hash, config.seed);

  const ToyModel best = model_from_checkpoint(out.result.best);
  const ScoreSet val_scores = score_samples(best, validation);
  out.validation_report = evaluate(val_scores, 0.5);
  return out;
}

EvalReport cmd_eval_checkpoint(const RunConfig& config, const std::string& checkpoint_path,
                               const std::string& manifest_path, const std::string& report_out,
                               bool force_hash) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  const std::uint64_t expected = config_hash(config);
  if (ckpt.config_hash != expected && !force_hash) {
    throw ConfigError("checkpoint config hash " + hash_hex(ckpt.config_hash) +
                      " conflicts with supplied config " + hash_hex(expected) +
                      " (pass --force to override)");
  }
  const ToyModel model = model_from_checkpoint(ckpt);
  const std::vector<Sample> samples = load_manifest(manifest_path);
  const ScoreSet scores = score_samples(model, samples);
  const EvalReport report = evaluate(scores, 0.5);
  if (!report_out.empty()) {
    write_eval_report(report, roc_polyline(scores), report_out, hash_hex(expected), config.seed);
    std::vector<std::string> ids;
    for (const Sample& s : samples) {
      if (s.valid) ids.push_back(s.id);
    }
    const fs::path scores_path = fs::path(report_out).parent_path() / "scores.csv";
    write_scores_csv(ids, scores, scores_path.string());
  }
  return report;
}

EvalReport cmd_eval_scores(const std::string& scores_csv, const std::string& report_out) {
  const ScoreSet scores = load_scores_csv(scores_csv);
  const EvalReport report = evaluate(scores, 0.5);
  if (!report_out.empty()) {
    write_eval_report(report, roc_polyline(scores), report_out, "ingested-scores", 0);
  }
  return report;
}

std::vector<SweepRow> cmd_sweep(const RunConfig& config, const std::vector<double>& grid,
                                const std::string& csv_out) {
  config.validate();
  fs::create_directories(config.out_dir);
  const SyntheticDataset data = generate_synthetic(config.synth);
  const std::vector<Sample> validation = make_validation_set(config);

  std::vector<SweepRow> rows;
  for (double tau : grid) {
    SweepRow row;
    row.tau = tau;
    try {
      const FilterResult filtered = filter_pairs(data.samples, data.embeddings, tau);
      row.dataset_size = filtered.pairs.size();
      if (filtered.pairs.empty()) throw DomainError("no pairs retained");

      TrainInputs inputs;
      inputs.train_samples = &data.samples;
      inputs.pairs = &filtered.pairs;
      inputs.validation = &validation;
      inputs.augment = config.augment;
      inputs.loss = config.loss;
      inputs.optim = config.optim;
      inputs.dims = config.model;
      inputs.config_hash = config_hash(config);
      const TrainResult trained = train(inputs);

      const ToyModel best = model_from_checkpoint(trained.best);
      const EvalReport report = evaluate(score_samples(best, validation), 0.5);
      row.acer = report.acer;
      row.acc = report.accuracy;
      row.auc = report.auc;
      row.eer = report.eer;
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }

  if (!csv_out.empty()) {
    std::ofstream out(csv_out);
    if (!out) throw IoError("cannot write sweep csv: " + csv_out);
    out << "# config_hash=" << hash_hex(config_hash(config)) << " seed=" << config.seed << "\n";
    out << "tau,dataset_size,acer,acc,auc,eer\n";
    out << std::setprecision(10);
    for (const SweepRow& row : rows) {
      if (row.failed) {
        out << row.tau << ",ERROR,,,,\n";
      } else {
        out << row.tau << "," << row.dataset_size << "," << row.acer << "," << row.acc << ","
            << row.auc << "," << row.eer << "\n";
      }
    }
  }
  return rows;
}

std::vector<AblationRow> cmd_ablate(const RunConfig& config, std::size_t k_seeds,
                                    const std::string& csv_out) {
  config.validate();
  fs::create_directories(config.out_dir);
  struct Setup {
    const char* name;
    TrainOverrides overrides;
  };
  const Setup setups[] = {
      {"full", {true, true, true}},
      {"wo_supcon", {false, true, true}},
      {"wo_lives_augs", {true, false, true}},
  };

  std::vector<AblationRow> rows;
  for (const Setup& setup : setups) {
    AblationRow row;
    row.setup = setup.name;
    for (std::size_t k = 0; k < k_seeds; ++k) {
      RunConfig cell = config;
      cell.seed = config.seed + k;
      cell.out_dir =
          (fs::path(config.out_dir) / ("ablate_" + row.setup + "_" + std::to_string(k))).string();
      cell.finalize();
      const TrainOutputs out = cmd_train(cell, setup.overrides);
      row.acers.push_back(out.validation_report.acer);
      row.mean_acer += out.validation_report.acer;
      row.mean_acc += out.validation_report.accuracy;
      row.mean_auc += out.validation_report.auc;
    }
    const double inv = 1.0 / static_cast<double>(k_seeds);
    row.mean_acer *= inv;
    row.mean_acc *= inv;
    row.mean_auc *= inv;
    rows.push_back(std::move(row));
  }

  if (!csv_out.empty()) {
    std::ofstream out(csv_out);
    if (!out) throw IoError("cannot write ablation csv: " + csv_out);
    out << "# config_hash=" << hash_hex(config_hash(config)) << " seed=" << config.seed
        << " k=" << k_seeds << "\n";
    out << "setup,mean_acer,mean_acc,mean_auc\n";
    out << std::setprecision(10);
    for (const AblationRow& row : rows) {
      out << row.setup << "," << row.mean_acer << "," << row.mean_acc << "," << row.mean_auc
          << "\n";
    }
  }
  return rows;
}

namespace {

Tensor pack_params(const ToyModel& model) {
  std::size_t total = 0;
  for (std::size_t b = 0; b < model.block_count(); ++b) total += model.block(b).size();
  Tensor flat({total});
  std::size_t at = 0;
  for (std::size_t b = 0; b < model.block_count(); ++b) {
    const Tensor& blk = model.block(b);
    for (std::size_t i = 0; i < blk.size(); ++i) flat[at++] = blk[i];
  }
  return flat;
}

void unpack_params(ToyModel& model, const Tensor& flat) {
  std::size_t at = 0;
  for (std::size_t b = 0; b < model.block_count(); ++b) {
    Tensor& blk = model.block(b);
    for (std::size_t i = 0; i < blk.size(); ++i) blk[i] = flat[at++];
  }
}

struct CheckCase {
  std::string name;
  GradCheckReport report;
};

GradCheckReport worst_of(const GradCheckReport& a, const GradCheckReport& b) {
  GradCheckReport w = a.max_rel_error >= b.max_rel_error ? a : b;
  w.passed = a.passed && b.passed;
  return w;
}

}  // namespace

bool cmd_gradcheck(std::ostream& out) {
  bool all_passed = true;
  std::vector<CheckCase> cases;
  LossConfig loss_cfg;

  // affine, 100 seeded random 3x4 cases, grads wrt all three arguments
  {
    Rng rng(11);
    GradCheckReport worst{};
    worst.passed = true;
    for (int rep = 0; rep < 100; ++rep) {
      Tensor x({3, 4}), w({4, 2}), b({2}), seed({3, 2});
      for (double& v : x.values()) v = rng.normal();
      for (double& v : w.values()) v = rng.normal();
      for (double& v : b.values()) v = rng.normal();
      for (double& v : seed.values()) v = rng.normal();
      auto value_of = [&](const Tensor& xi, const Tensor& wi, const Tensor& bi) {
        const Tensor y = affine(xi, wi, bi);
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += seed[i] * y[i];
        return s;
      };
      ScalarFn wrt_x{[&](const Tensor& p) { return value_of(p, w, b); },
                     [&](const Tensor& p) { return affine_backward(p, w, seed).input; }};
      ScalarFn wrt_w{[&](const Tensor& p) { return value_of(x, p, b); },
                     [&](const Tensor& p) { return affine_backward(x, p, seed).weight; }};
      ScalarFn wrt_b{[&](const Tensor& p) { return value_of(x, w, p); },
                     [&](const Tensor&) { return affine_backward(x, w, seed).bias; }};
      worst = worst_of(worst, check_gradient(wrt_x, x, 1e-6, 1e-6));
      worst = worst_of(worst, check_gradient(wrt_w, w, 1e-6, 1e-6));
      worst = worst_of(worst, check_gradient(wrt_b, b, 1e-6, 1e-6));
    }
    cases.push_back({"affine", worst});
  }

  // rectify away from the kink
  {
    Rng rng(12);
    GradCheckReport worst{};
    worst.passed = true;
    for (int rep = 0; rep < 100; ++rep) {
      Tensor x({8}), seed({8});
      for (double& v : x.values()) {
        v = rng.uniform(0.01, 1.0) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
      }
      for (double& v : seed.values()) v = rng.normal();
      ScalarFn fn{[&](const Tensor& p) {
                    const Tensor y = rectify(p);
                    double s = 0.0;
                    for (std::size_t i = 0; i < y.size(); ++i) s += seed[i] * y[i];
                    return s;
                  },
                  [&](const Tensor& p) { return rectify_backward(p, seed); }};
      worst = worst_of(worst, check_gradient(fn, x, 1e-6, 1e-6));
    }
    cases.push_back({"rectify", worst});
  }

  // l2_normalize on 128-d vectors
  {
    Rng rng(13);
    GradCheckReport worst{};
    worst.passed = true;
    for (int rep = 0; rep < 100; ++rep) {
      Tensor x({128}), seed({128});
      for (double& v : x.values()) v = rng.normal();
      for (double& v : seed.values()) v = rng.normal();
      ScalarFn fn{[&](const Tensor& p) {
                    const Tensor y = l2_normalize(p);
                    double s = 0.0;
                    for (std::size_t i = 0; i < y.size(); ++i) s += seed[i] * y[i];
                    return s;
                  },
                  [&](const Tensor& p) { return l2_normalize_backward(p, seed); }};
      worst = worst_of(worst, check_gradient(fn, x, 1e-6, 1e-5));
    }
    cases.push_back({"l2_normalize", worst});
  }

  // focal loss wrt logit
  {
    Rng rng(14);
    GradCheckReport worst{};
    worst.passed = true;
    for (int rep = 0; rep < 100; ++rep) {
      Tensor logit({1});
      logit[0] = rng.uniform(-4.0, 4.0);
      const double target = rng.bernoulli(0.5) ? (rng.bernoulli(0.5) ? 1.0 : 0.0) : rng.uniform();
      ScalarFn fn{[&](const Tensor& p) { return focal_loss(p[0], target, loss_cfg).value; },
                  [&](const Tensor& p) {
                    Tensor g({1});
                    g[0] = focal_loss(p[0], target, loss_cfg).grad;
                    return g;
                  }};
      worst = worst_of(worst, check_gradient(fn, logit, 1e-6, 1e-4));
    }
    cases.push_back({"focal_loss", worst});
  }

  // supcon through row normalization, wrt raw projections
  {
    Rng rng(15);
    GradCheckReport worst{};
    worst.passed = true;
    for (int rep = 0; rep < 100; ++rep) {
      const std::size_t n = 4 + rng.uniform_int(3), d = 6;
      Tensor raw({n, d});
      for (double& v : raw.values()) v = rng.normal();
      std::vector<int> labels(n);
      for (int& l : labels) l = static_cast<int>(rng.uniform_int(2));
      ScalarFn fn{[&](const Tensor& p) {
                    return supcon_loss(l2_normalize_rows(p), labels, loss_cfg.supcon_temperature)
                        .value;
                  },
                  [&](const Tensor& p) {
                    const SupConResult r =
                        supcon_loss(l2_normalize_rows(p), labels, loss_cfg.supcon_temperature);
                    return l2_normalize_rows_backward(p, r.grad);
                  }};
      worst = worst_of(worst, check_gradient(fn, raw, 1e-6, 1e-4));
    }
    cases.push_back({"supcon_loss", worst});
  }

  // combined objective through a sub-2k-parameter model
  {
    Rng rng(16);
    GradCheckReport worst{};
    worst.passed = true;
    const ModelDims dims{12, 6, 6, 5, 4};
    for (int rep = 0; rep < 100; ++rep) {
      ToyModel model;
      const std::size_t batch = 6;
      Tensor x({batch, dims.input});
      std::vector<double> targets(batch);
      std::vector<int> labels(batch);
      // resample cases whose rectifier pre-activations sit within the
      // finite-difference step of the kink
      for (std::uint64_t attempt = 0;; ++attempt) {
        Rng init = rng.split(static_cast<std::uint64_t>(rep) * 1000 + attempt);
        model = ToyModel(dims, init);
        for (double& v : x.values()) v = init.uniform();
        for (std::size_t i = 0; i < batch; ++i) {
          labels[i] = i < batch / 2 ? 0 : 1;
          targets[i] = init.bernoulli(0.3) ? init.uniform() : static_cast<double>(labels[i]);
        }
        const ToyModel::Forward probe = model.forward(x);
        double margin = 1e300;
        for (const Tensor* pre : {&probe.h1_pre, &probe.h2_pre, &probe.p1_pre}) {
          for (std::size_t i = 0; i < pre->size(); ++i) {
            margin = std::min(margin, std::fabs((*pre)[i]));
          }
        }
        if (margin > 1e-4) break;
      }
      auto objective = [&](const Tensor& flat) {
        ToyModel probe = model;
        unpack_params(probe, flat);
        const ToyModel::Forward f = probe.forward(x);
        return combined_objective(f.logits, targets, f.projections, labels, loss_cfg)
            .bundle.total;
      };
      ScalarFn fn{objective, [&](const Tensor& flat) {
                    ToyModel probe = model;
                    unpack_params(probe, flat);
                    const ToyModel::Forward f = probe.forward(x);
                    const CombinedResult r =
                        combined_objective(f.logits, targets, f.projections, labels, loss_cfg);
                    const std::vector<Tensor> grads =
                        probe.backward(f, r.grad_logits, r.grad_projections);
                    std::size_t total = 0;
                    for (const Tensor& g : grads) total += g.size();
                    Tensor flat_grad({total});
                    std::size_t at = 0;
                    for (const Tensor& g : grads) {
                      for (std::size_t i = 0; i < g.size(); ++i) flat_grad[at++] = g[i];
                    }
                    return flat_grad;
                  }};
      worst = worst_of(worst, check_gradient(fn, pack_params(model), 1e-6, 1e-4));
    }
    cases.push_back({"combined_objective", worst});
  }

  for (const CheckCase& c : cases) {
    out << (c.report.passed ? "PASS" : "FAIL") << "  " << c.name
        << "  max_rel_error=" << c.report.max_rel_error << "\n";
    all_passed = all_passed && c.report.passed;
  }
  return all_passed;
}

}  // namespace padkit
