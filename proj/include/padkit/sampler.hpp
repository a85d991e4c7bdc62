#pragma once

#include <map>
#include <string>
#include <vector>

#include "padkit/pairmine.hpp"
#include "padkit/rng.hpp"

namespace padkit {

// One batch: B/2 (attack, live) pair slots.  Flat sample order is all
// attacks followed by their matched lives, so the live at flat position
// B/2 + i is the mined match of the attack at position i.
struct PairedBatchPlan {
  std::vector<std::pair<std::string, std::string>> slots;

  std::size_t sample_count() const { return 2 * slots.size(); }
  std::vector<std::string> flat_order() const;
};

// A nominal epoch draws ceil(|pairs|/2) pairs without replacement and
// chunks them into batches of batch_size/2 pairs.  A trailing chunk
// smaller than 2 pairs (4 samples) is dropped.
std::vector<PairedBatchPlan> plan_epoch(const std::vector<TrainPair>& pairs,
                                        std::size_t batch_size, Rng& rng);

std::map<std::string, std::size_t> oversampling_histogram(
    const std::vector<PairedBatchPlan>& plans);

void write_plans_jsonl(const std::vector<PairedBatchPlan>& plans, const std::string& path);

}  // namespace padkit
