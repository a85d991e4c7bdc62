#include "padkit/sampler.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"

namespace padkit {

std::vector<std::string> PairedBatchPlan::flat_order() const {
  std::vector<std::string> order;
  order.reserve(sample_count());
  for (const auto& [attack_id, live_id] : slots) order.push_back(attack_id);
  for (const auto& [attack_id, live_id] : slots) order.push_back(live_id);
  return order;
}

std::vector<PairedBatchPlan> plan_epoch(const std::vector<TrainPair>& pairs,
                                        std::size_t batch_size, Rng& rng) {
  if (batch_size < 4 || batch_size % 2 != 0) {
    throw ConfigError("batch_size must be even and >= 4, got " + std::to_string(batch_size));
  }
  if (pairs.empty()) throw ConfigError("plan_epoch: empty pair set");

  // Fisher-Yates over indices, then take the first ceil(n/2).
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    const std::size_t j = rng.uniform_int(i + 1);
    std::swap(order[i], order[j]);
  }
  const std::size_t take = (pairs.size() + 1) / 2;
  const std::size_t per_batch = batch_size / 2;

  std::vector<PairedBatchPlan> plans;
  for (std::size_t start = 0; start < take; start += per_batch) {
    const std::size_t end = std::min(start + per_batch, take);
    if (end - start < 2) break;  // trailing chunk under 4 samples
    PairedBatchPlan plan;
    for (std::size_t i = start; i < end; ++i) {
      const TrainPair& p = pairs[order[i]];
      plan.slots.emplace_back(p.attack_id, p.live_id);
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

std::map<std::string, std::size_t> oversampling_histogram(
    const std::vector<PairedBatchPlan>& plans) {
  std::map<std::string, std::size_t> counts;
  for (const PairedBatchPlan& plan : plans) {
    for (const auto& [attack_id, live_id] : plan.slots) counts[live_id]++;
  }
  return counts;
}

void write_plans_jsonl(const std::vector<PairedBatchPlan>& plans, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write plans: " + path);
  for (const PairedBatchPlan& plan : plans) {
    nlohmann::json obj;
    nlohmann::json slots = nlohmann::json::array();
    for (const auto& [attack_id, live_id] : plan.slots) {
      slots.push_back({{"attack_id", attack_id}, {"live_id", live_id}});
    }
    obj["slots"] = slots;
    out << obj.dump() << "\n";
  }
}

}  // namespace padkit
