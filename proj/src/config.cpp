#include "padkit/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace padkit {

using nlohmann::json;

void RunConfig::finalize() {
  synth.seed = seed;
  optim.seed = seed;
  model.input = synth.image_size * synth.image_size * 3;
}

void RunConfig::validate() const {
  synth.validate();
  augment.validate();
  loss.validate();
  optim.validate();
  if (tau_sim < -1.0 || tau_sim > 1.0) throw ConfigError("tau_sim must be in [-1,1]");
}

namespace {

json synth_to_json(const SynthConfig& c) {
  json attacks = json::object();
  for (const auto& [cat, count] : c.attacks_per_identity_per_category) {
    attacks[category_name(cat)] = count;
  }
  return json{{"n_identities", c.n_identities},
              {"lives_per_identity", c.lives_per_identity},
              {"attacks_per_identity_per_category", attacks},
              {"image_size", c.image_size},
              {"embedding_dim", c.embedding_dim},
              {"identity_spread", c.identity_spread},
              {"attack_offset", c.attack_offset},
              {"noise_scale", c.noise_scale},
              {"orphan_attack_fraction", c.orphan_attack_fraction},
              {"seed", c.seed}};
}

void synth_from_json(const json& j, SynthConfig& c) {
  if (j.contains("n_identities")) c.n_identities = j["n_identities"];
  if (j.contains("lives_per_identity")) c.lives_per_identity = j["lives_per_identity"];
  if (j.contains("attacks_per_identity_per_category")) {
    c.attacks_per_identity_per_category.clear();
    for (const auto& [name, count] : j["attacks_per_identity_per_category"].items()) {
      c.attacks_per_identity_per_category[category_from_name(name)] = count;
    }
  }
  if (j.contains("image_size")) c.image_size = j["image_size"];
  if (j.contains("embedding_dim")) c.embedding_dim = j["embedding_dim"];
  if (j.contains("identity_spread")) c.identity_spread = j["identity_spread"];
  if (j.contains("attack_offset")) c.attack_offset = j["attack_offset"];
  if (j.contains("noise_scale")) c.noise_scale = j["noise_scale"];
  if (j.contains("orphan_attack_fraction")) c.orphan_attack_fraction = j["orphan_attack_fraction"];
  if (j.contains("seed")) c.seed = j["seed"];
}

json augment_to_json(const AugmentConfig& c) {
  return json{{"flip_prob", c.flip_prob},
              {"brightness_contrast_range", c.brightness_contrast_range},
              {"hue_sat_range", c.hue_sat_range},
              {"gamma_min", c.gamma_min},
              {"gamma_max", c.gamma_max},
              {"jpeg_quality_min", c.jpeg_quality_min},
              {"jpeg_quality_max", c.jpeg_quality_max},
              {"cutmix_prob", c.cutmix_prob},
              {"cutmix_alpha", c.cutmix_alpha}};
}

void augment_from_json(const json& j, AugmentConfig& c) {
  if (j.contains("flip_prob")) c.flip_prob = j["flip_prob"];
  if (j.contains("brightness_contrast_range"))
    c.brightness_contrast_range = j["brightness_contrast_range"];
  if (j.contains("hue_sat_range")) c.hue_sat_range = j["hue_sat_range"];
  if (j.contains("gamma_min")) c.gamma_min = j["gamma_min"];
  if (j.contains("gamma_max")) c.gamma_max = j["gamma_max"];
  if (j.contains("jpeg_quality_min")) c.jpeg_quality_min = j["jpeg_quality_min"];
  if (j.contains("jpeg_quality_max")) c.jpeg_quality_max = j["jpeg_quality_max"];
  if (j.contains("cutmix_prob")) c.cutmix_prob = j["cutmix_prob"];
  if (j.contains("cutmix_alpha")) c.cutmix_alpha = j["cutmix_alpha"];
}

json loss_to_json(const LossConfig& c) {
  return json{{"focal_alpha", c.focal_alpha},
              {"focal_gamma", c.focal_gamma},
              {"supcon_temperature", c.supcon_temperature},
              {"supcon_weight", c.supcon_weight},
              {"probability_clamp", c.probability_clamp}};
}

void loss_from_json(const json& j, LossConfig& c) {
  if (j.contains("focal_alpha")) c.focal_alpha = j["focal_alpha"];
  if (j.contains("focal_gamma")) c.focal_gamma = j["focal_gamma"];
  if (j.contains("supcon_temperature")) c.supcon_temperature = j["supcon_temperature"];
  if (j.contains("supcon_weight")) c.supcon_weight = j["supcon_weight"];
  if (j.contains("probability_clamp")) c.probability_clamp = j["probability_clamp"];
}

json optim_to_json(const OptimConfig& c) {
  return json{{"peak_lr", c.peak_lr},
              {"floor_lr", c.floor_lr},
              {"warmup_fraction", c.warmup_fraction},
              {"weight_decay", c.weight_decay},
              {"beta1", c.beta1},
              {"beta2", c.beta2},
              {"adam_epsilon", c.adam_epsilon},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"seed", c.seed}};
}

void optim_from_json(const json& j, OptimConfig& c) {
  if (j.contains("peak_lr")) c.peak_lr = j["peak_lr"];
  if (j.contains("floor_lr")) c.floor_lr = j["floor_lr"];
  if (j.contains("warmup_fraction")) c.warmup_fraction = j["warmup_fraction"];
  if (j.contains("weight_decay")) c.weight_decay = j["weight_decay"];
  if (j.contains("beta1")) c.beta1 = j["beta1"];
  if (j.contains("beta2")) c.beta2 = j["beta2"];
  if (j.contains("adam_epsilon")) c.adam_epsilon = j["adam_epsilon"];
  if (j.contains("epochs")) c.epochs = j["epochs"];
  if (j.contains("batch_size")) c.batch_size = j["batch_size"];
  if (j.contains("seed")) c.seed = j["seed"];
}

json model_to_json(const ModelDims& c) {
  return json{{"hidden", c.hidden},
              {"feature", c.feature},
              {"proj_hidden", c.proj_hidden},
              {"proj_out", c.proj_out}};
}

void model_from_json(const json& j, ModelDims& c) {
  if (j.contains("hidden")) c.hidden = j["hidden"];
  if (j.contains("feature")) c.feature = j["feature"];
  if (j.contains("proj_hidden")) c.proj_hidden = j["proj_hidden"];
  if (j.contains("proj_out")) c.proj_out = j["proj_out"];
}

}  // namespace

std::string run_config_to_json(const RunConfig& config) {
  json j;
  j["seed"] = config.seed;
  j["tau_sim"] = config.tau_sim;
  j["out_dir"] = config.out_dir;
  j["synth"] = synth_to_json(config.synth);
  j["augment"] = augment_to_json(config.augment);
  j["loss"] = loss_to_json(config.loss);
  j["optim"] = optim_to_json(config.optim);
  j["model"] = model_to_json(config.model);
  return j.dump(2);
}

RunConfig run_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  RunConfig config;
  try {
    if (j.contains("seed")) config.seed = j["seed"];
    if (j.contains("tau_sim")) config.tau_sim = j["tau_sim"];
    if (j.contains("out_dir")) config.out_dir = j["out_dir"];
    if (j.contains("synth")) synth_from_json(j["synth"], config.synth);
    if (j.contains("augment")) augment_from_json(j["augment"], config.augment);
    if (j.contains("loss")) loss_from_json(j["loss"], config.loss);
    if (j.contains("optim")) optim_from_json(j["optim"], config.optim);
    if (j.contains("model")) model_from_json(j["model"], config.model);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  config.finalize();
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return run_config_from_json(ss.str());
}

std::uint64_t config_hash(const RunConfig& config) {
  // out_dir is where results land, not what they are; keep it out of the
  // hash so runs into different directories stay byte-identical
  RunConfig canonical = config;
  canonical.out_dir.clear();
  const std::string text = run_config_to_json(canonical);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t hash) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[hash & 0xF];
    hash >>= 4;
  }
  return s;
}

}  // namespace padkit
