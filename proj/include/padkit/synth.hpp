#pragma once

#include <map>

#include "padkit/data.hpp"
#include "padkit/rng.hpp"

namespace padkit {

struct SynthConfig {
  std::size_t n_identities = 40;
  std::size_t lives_per_identity = 6;
  std::map<AttackCategory, std::size_t> attacks_per_identity_per_category = {
      {AttackCategory::PixelLevel, 4},   {AttackCategory::SemanticLevel, 3},
      {AttackCategory::VideoDriven, 2},  {AttackCategory::FaceSwap, 2},
      {AttackCategory::AttributeEdit, 1}, {AttackCategory::Replay, 1},
      {AttackCategory::Cutouts, 1},      {AttackCategory::Print, 1},
  };
  std::size_t image_size = 16;
  std::size_t embedding_dim = 512;
  double identity_spread = 1.0;
  double attack_offset = 1.0;
  double noise_scale = 0.05;
  double orphan_attack_fraction = 0.5;
  std::uint64_t seed = 17;

  void validate() const;
};

struct SyntheticDataset {
  std::vector<Sample> samples;
  EmbeddingStore embeddings;
};

// Categories whose synthetic embeddings stay near the identity's live
// cluster; the rest are generated far from every live center.
bool is_identity_preserving(AttackCategory c);

SyntheticDataset generate_synthetic(const SynthConfig& config);

}  // namespace padkit
