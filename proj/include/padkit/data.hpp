#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "padkit/tensor.hpp"

namespace padkit {

enum class AttackCategory {
  PixelLevel,
  SemanticLevel,
  VideoDriven,
  FaceSwap,
  AttributeEdit,
  Replay,
  Cutouts,
  Print,
  Live,
};

inline constexpr AttackCategory kAllCategories[] = {
    AttackCategory::PixelLevel, AttackCategory::SemanticLevel, AttackCategory::VideoDriven,
    AttackCategory::FaceSwap,   AttackCategory::AttributeEdit, AttackCategory::Replay,
    AttackCategory::Cutouts,    AttackCategory::Print,         AttackCategory::Live,
};

std::string category_name(AttackCategory c);
AttackCategory category_from_name(const std::string& name);

enum class Label { Live, Attack };

struct Sample {
  std::string id;
  std::string identity;
  Label label = Label::Attack;
  AttackCategory category = AttackCategory::PixelLevel;
  bool valid = true;
  Tensor image;  // H x W x 3, values in [0,1]

  bool is_live() const { return label == Label::Live; }
};

// Embedding store keyed by sample id; all vectors share one dimension.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  explicit EmbeddingStore(std::size_t dim) : dim_(dim) {}

  void insert(const std::string& id, std::vector<double> vector);
  const std::vector<double>& at(const std::string& id) const;
  bool contains(const std::string& id) const { return vectors_.count(id) > 0; }
  std::size_t size() const { return vectors_.size(); }
  std::size_t dim() const { return dim_; }
  // Sorted by id.
  const std::map<std::string, std::vector<double>>& records() const { return vectors_; }

  bool operator==(const EmbeddingStore& other) const {
    return dim_ == other.dim_ && vectors_ == other.vectors_;
  }

 private:
  std::size_t dim_ = 0;
  std::map<std::string, std::vector<double>> vectors_;
};

// Manifest I/O: JSONL, one sample per line.  Images are stored inline as
// pixel arrays unless written with image_dir set, in which case each
// image goes to a raw f32 sidecar file referenced by relative path.
std::vector<Sample> load_manifest(const std::string& path);
void write_manifest(const std::vector<Sample>& samples, const std::string& path);

struct EmbeddingLoadResult {
  EmbeddingStore store;
  std::size_t stale_count = 0;  // ids absent from the manifest, when given
};

EmbeddingStore load_embeddings(const std::string& path);
EmbeddingLoadResult load_embeddings_checked(const std::string& path,
                                            const std::vector<Sample>& manifest);
void write_embeddings_jsonl(const EmbeddingStore& store, const std::string& path);
void write_embeddings_binary(const EmbeddingStore& store, const std::string& path);

}  // namespace padkit
