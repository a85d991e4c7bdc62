#pragma once

#include <map>
#include <string>
#include <vector>

#include "padkit/data.hpp"

namespace padkit {

struct TrainPair {
  std::string attack_id;
  std::string live_id;
  double similarity = 0.0;

  bool operator==(const TrainPair& other) const {
    return attack_id == other.attack_id && live_id == other.live_id &&
           similarity == other.similarity;
  }
};

struct CategoryCount {
  std::size_t before = 0;
  std::size_t after = 0;
};

struct FilterReport {
  std::map<AttackCategory, CategoryCount> categories;
  std::size_t live_before = 0;
  std::size_t live_retained = 0;  // lives matched by at least one retained attack
  double tau_sim = 0.0;
};

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

struct BestMatch {
  std::string live_id;
  double similarity;
};

// Argmax over the live set; ties broken by lexicographically smallest id.
BestMatch best_live_match(const std::string& attack_id, const EmbeddingStore& embeddings,
                          const std::vector<std::string>& live_ids);

struct FilterResult {
  std::vector<TrainPair> pairs;  // sorted by attack_id
  FilterReport report;
};

// Keeps an attack iff sim(attack, best live) > tau_sim, strictly.
// Only valid samples participate.
FilterResult filter_pairs(const std::vector<Sample>& samples, const EmbeddingStore& embeddings,
                          double tau_sim);

void write_pairs_jsonl(const std::vector<TrainPair>& pairs, const std::string& path);
std::vector<TrainPair> load_pairs_jsonl(const std::string& path);
void write_filter_report(const FilterReport& report, const std::string& path,
                         const std::string& config_hash);

}  // namespace padkit
