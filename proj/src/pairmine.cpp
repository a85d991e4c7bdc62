#include "padkit/pairmine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "json.hpp"

namespace padkit {

using nlohmann::json;

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw DimensionError("cosine_similarity dimension mismatch: " + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw DomainError("cosine_similarity on zero-norm vector");
  const double sim = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::min(1.0, std::max(-1.0, sim));
}

BestMatch best_live_match(const std::string& attack_id, const EmbeddingStore& embeddings,
                          const std::vector<std::string>& live_ids) {
  if (live_ids.empty()) throw DomainError("best_live_match: empty live set");
  const std::vector<double>& a = embeddings.at(attack_id);
  BestMatch best{"", -2.0};
  for (const std::string& lid : live_ids) {
    const double sim = cosine_similarity(a, embeddings.at(lid));
    if (sim > best.similarity || (sim == best.similarity && lid < best.live_id)) {
      best = {lid, sim};
    }
  }
  return best;
}

FilterResult filter_pairs(const std::vector<Sample>& samples, const EmbeddingStore& embeddings,
                          double tau_sim) {
  if (tau_sim < -1.0 || tau_sim > 1.0) throw ConfigError("tau_sim must be in [-1,1]");

  std::vector<std::string> live_ids;
  std::vector<const Sample*> attacks;
  for (const Sample& s : samples) {
    if (!s.valid) continue;
    if (s.is_live()) {
      live_ids.push_back(s.id);
    } else {
      attacks.push_back(&s);
    }
  }
  if (live_ids.empty()) throw DomainError("filter_pairs: no valid live samples");
  std::sort(live_ids.begin(), live_ids.end());

  FilterResult result;
  result.report.tau_sim = tau_sim;
  result.report.live_before = live_ids.size();
  for (AttackCategory c : kAllCategories) {
    if (c != AttackCategory::Live) result.report.categories[c];
  }

  std::set<std::string> matched_lives;
  for (const Sample* a : attacks) {
    result.report.categories[a->category].before++;
    const BestMatch m = best_live_match(a->id, embeddings, live_ids);
    if (m.similarity > tau_sim) {
      result.pairs.push_back({a->id, m.live_id, m.similarity});
      result.report.categories[a->category].after++;
      matched_lives.insert(m.live_id);
    }
  }
  result.report.live_retained = matched_lives.size();
  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const TrainPair& x, const TrainPair& y) { return x.attack_id < y.attack_id; });
  return result;
}

void write_pairs_jsonl(const std::vector<TrainPair>& pairs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write pairs: " + path);
  for (const TrainPair& p : pairs) {
    json obj;
    obj["attack_id"] = p.attack_id;
    obj["live_id"] = p.live_id;
    obj["similarity"] = p.similarity;
    out << obj.dump() << "\n";
  }
}

std::vector<TrainPair> load_pairs_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pairs: " + path);
  std::vector<TrainPair> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      json obj = json::parse(line);
      pairs.push_back({obj.at("attack_id").get<std::string>(),
                       obj.at("live_id").get<std::string>(),
                       obj.at("similarity").get<double>()});
    } catch (const json::exception& e) {
      throw ParseError("pairs parse error at line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return pairs;
}

void write_filter_report(const FilterReport& report, const std::string& path,
                         const std::string& config_hash) {
  json obj;
  obj["tau_sim"] = report.tau_sim;
  obj["config_hash"] = config_hash;
  json cats = json::object();
  std::size_t total_before = 0, total_after = 0;
  for (const auto& [cat, count] : report.categories) {
    cats[category_name(cat)] = {{"before", count.before}, {"after", count.after}};
    total_before += count.before;
    total_after += count.after;
  }
  obj["categories"] = cats;
  obj["total_attacks_before"] = total_before;
  obj["total_pairs"] = total_after;
  obj["live_before"] = report.live_before;
  obj["live_retained"] = report.live_retained;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report: " + path);
  out << obj.dump(2) << "\n";
}

}  // namespace padkit
