#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "padkit/pipeline.hpp"

namespace {

using namespace padkit;

RunConfig resolve_config(const std::string& config_path) {
  RunConfig config;
  if (!config_path.empty()) {
    config = load_run_config(config_path);
  }
  return config;
}

void print_filter_table(const FilterResult& result) {
  std::cout << "category            before   after\n";
  for (const auto& [cat, count] : result.report.categories) {
    std::string name = category_name(cat);
    name.resize(20, ' ');
    std::cout << name << count.before << "\t " << count.after << "\n";
  }
  std::cout << "live                " << result.report.live_before << "\t "
            << result.report.live_retained << "\n";
  std::cout << "pairs retained: " << result.pairs.size() << " at tau_sim "
            << result.report.tau_sim << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unified physical/digital face-attack detection toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  std::string out_dir_override;
  app.add_option("--config", config_path, "JSON config file")->capture_default_str();
  app.add_option("--seed", seed_override, "override config seed")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--out", out_dir_override, "output directory override");

  auto* synth = app.add_subcommand("synth", "generate a seeded synthetic dataset");
  auto* filter = app.add_subcommand("filter", "mine attack-live pairs and filter by similarity");
  auto* sweep = app.add_subcommand("sweep", "train/evaluate across a similarity-threshold grid");
  auto* train = app.add_subcommand("train", "train the detector on mined pairs");
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint or a scores file");
  auto* ablate = app.add_subcommand("ablate", "run the component ablation grid");
  auto* gradcheck = app.add_subcommand("gradcheck", "run the finite-difference verification suite");

  std::string manifest_path, embeddings_path, pairs_out, report_out;
  double tau = 0.9;
  bool tau_set = false;
  filter->add_option("--manifest", manifest_path, "manifest.jsonl path")->required();
  filter->add_option("--embeddings", embeddings_path, "embeddings path (jsonl or binary)")
      ->required();
  filter->add_option("--tau", tau, "cosine similarity threshold")
      ->each([&](const std::string&) { tau_set = true; });
  filter->add_option("--pairs-out", pairs_out, "pairs.jsonl output path");
  filter->add_option("--report-out", report_out, "report.json output path");

  double sweep_lo = 0.84, sweep_hi = 0.91, sweep_step = 0.01;
  std::string sweep_out = "sweep.csv";
  sweep->add_option("--from", sweep_lo, "grid start")->capture_default_str();
  sweep->add_option("--to", sweep_hi, "grid end (inclusive)")->capture_default_str();
  sweep->add_option("--step", sweep_step, "grid step")->capture_default_str();
  sweep->add_option("--csv", sweep_out, "output CSV path")->capture_default_str();

  bool no_supcon = false, no_lives_augs = false, no_cutmix = false;
  train->add_flag("--no-supcon", no_supcon, "drop the contrastive term");
  train->add_flag("--no-lives-augs", no_lives_augs, "drop live-only augmentations");
  train->add_flag("--no-cutmix", no_cutmix, "disable CutMix");

  std::string eval_checkpoint, eval_manifest, eval_scores, eval_report = "report.json";
  bool force = false;
  eval->add_option("--checkpoint", eval_checkpoint, "checkpoint.bin path");
  eval->add_option("--manifest", eval_manifest, "manifest to score");
  eval->add_option("--scores", eval_scores, "pre-computed scores.csv to ingest");
  eval->add_option("--report-out", eval_report, "report.json output path")->capture_default_str();
  eval->add_flag("--force", force, "ignore config-hash mismatch");

  std::size_t ablate_k = 1;
  std::string ablate_out = "ablation.csv";
  ablate->add_option("--seeds", ablate_k, "number of seeds per setup")->capture_default_str();
  ablate->add_option("--csv", ablate_out, "output CSV path")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig config = resolve_config(config_path);
    if (seed_set) config.seed = seed_override;
    if (!out_dir_override.empty()) config.out_dir = out_dir_override;
    if (tau_set) config.tau_sim = tau;
    config.finalize();

    if (app.got_subcommand(synth)) {
      const SynthPaths paths = cmd_synth(config);
      std::cout << "wrote " << paths.manifest << "\n"
                << "wrote " << paths.embeddings_jsonl << "\n"
                << "wrote " << paths.embeddings_binary << "\n";
    } else if (app.got_subcommand(filter)) {
      const FilterResult result =
          cmd_filter(config, manifest_path, embeddings_path, config.tau_sim, pairs_out,
                     report_out);
      print_filter_table(result);
    } else if (app.got_subcommand(sweep)) {
      std::vector<double> grid;
      for (double t = sweep_lo; t <= sweep_hi + 1e-12; t += sweep_step) grid.push_back(t);
      const std::vector<SweepRow> rows = cmd_sweep(config, grid, sweep_out);
      std::cout << "tau,dataset_size,acer,acc,auc,eer\n";
      for (const SweepRow& row : rows) {
        if (row.failed) {
          std::cout << row.tau << ",ERROR: " << row.error << "\n";
        } else {
          std::cout << row.tau << "," << row.dataset_size << "," << row.acer << "," << row.acc
                    << "," << row.auc << "," << row.eer << "\n";
        }
      }
    } else if (app.got_subcommand(train)) {
      TrainOverrides overrides;
      overrides.use_supcon = !no_supcon;
      overrides.augment_lives = !no_lives_augs;
      overrides.use_cutmix = !no_cutmix;
      const TrainOutputs out = cmd_train(config, overrides);
      std::cout << "best epoch " << out.result.best.epoch << " val_eer "
                << out.result.best.val_eer << "\n"
                << "val acer " << out.validation_report.acer << " acc "
                << out.validation_report.accuracy << " auc " << out.validation_report.auc << "\n"
                << "wrote " << out.checkpoint_path << "\n"
                << "wrote " << out.history_path << "\n";
    } else if (app.got_subcommand(eval)) {
      EvalReport report;
      if (!eval_scores.empty()) {
        report = cmd_eval_scores(eval_scores, eval_report);
      } else if (!eval_checkpoint.empty() && !eval_manifest.empty()) {
        report = cmd_eval_checkpoint(config, eval_checkpoint, eval_manifest, eval_report, force);
      } else {
        std::cerr << "eval needs either --scores or both --checkpoint and --manifest\n";
        return 2;
      }
      std::cout << "acer " << report.acer << " apcer " << report.apcer << " bpcer "
                << report.bpcer << " eer " << report.eer << " acc " << report.accuracy << " auc "
                << report.auc << "\n";
    } else if (app.got_subcommand(ablate)) {
      const std::vector<AblationRow> rows = cmd_ablate(config, ablate_k, ablate_out);
      std::cout << "setup,mean_acer,mean_acc,mean_auc\n";
      for (const AblationRow& row : rows) {
        std::cout << row.setup << "," << row.mean_acer << "," << row.mean_acc << ","
                  << row.mean_auc << "\n";
      }
    } else if (app.got_subcommand(gradcheck)) {
      if (!cmd_gradcheck(std::cout)) return 4;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IntegrityError& e) {
    std::cerr << "data integrity error: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "data integrity error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
