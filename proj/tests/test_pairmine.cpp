#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "padkit/pairmine.hpp"
#include "padkit/rng.hpp"
#include "padkit/synth.hpp"

using namespace padkit;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "padkit_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<double> random_vec(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  for (double& x : v) x = rng.normal();
  return v;
}

// Exhaustive scan reference for the argmax with lexicographic tie-break.
BestMatch brute_force_match(const std::string& attack_id, const EmbeddingStore& embeddings,
                            const std::vector<std::string>& live_ids) {
  std::vector<std::string> sorted = live_ids;
  std::sort(sorted.begin(), sorted.end());
  BestMatch best{"", -2.0};
  for (const std::string& id : sorted) {
    const double s = cosine_similarity(embeddings.at(attack_id), embeddings.at(id));
    if (s > best.similarity) best = {id, s};
  }
  return best;
}

Sample make_sample(const std::string& id, Label label, AttackCategory cat, bool valid = true) {
  Sample s;
  s.id = id;
  s.identity = "x";
  s.label = label;
  s.category = cat;
  s.valid = valid;
  return s;
}

}  // namespace

TEST_CASE("cosine similarity basics") {
  const std::vector<double> v{0.3, -1.2, 4.0};
  CHECK(cosine_similarity(v, v) == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> e1(8, 0.0), e2(8, 0.0);
  e1[0] = 1.0;
  e2[1] = 1.0;
  CHECK(cosine_similarity(e1, e2) == doctest::Approx(0.0).epsilon(1e-15));

  std::vector<double> a(8, 0.0), b(8, 0.0);
  a[0] = 1.0;
  a[1] = 1.0;
  b[0] = 1.0;
  CHECK(cosine_similarity(a, b) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("cosine similarity error cases and clamping") {
  CHECK_THROWS_AS(cosine_similarity({0.0, 0.0}, {1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(cosine_similarity({1.0, 0.0}, {1.0, 0.0, 0.0}), DimensionError);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> a = random_vec(rng, 16);
    const double s = cosine_similarity(a, a);
    CHECK(s <= 1.0);
    CHECK(s >= -1.0);
  }
}

TEST_CASE("best_live_match trivial cases") {
  EmbeddingStore store;
  store.insert("atk", {1.0, 0.0});
  store.insert("live_a", {0.0, 1.0});
  CHECK(best_live_match("atk", store, {"live_a"}).live_id == "live_a");

  store.insert("live_b", {2.0, 0.0});  // same direction as the attack
  const BestMatch m = best_live_match("atk", store, {"live_a", "live_b"});
  CHECK(m.live_id == "live_b");
  CHECK(m.similarity == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(best_live_match("atk", store, {}), DomainError);
}

TEST_CASE("best_live_match breaks ties lexicographically") {
  EmbeddingStore store;
  store.insert("atk", {1.0, 0.0});
  store.insert("live_z", {3.0, 0.0});
  store.insert("live_a", {5.0, 0.0});  // same cosine as live_z
  const BestMatch m = best_live_match("atk", store, {"live_z", "live_a"});
  CHECK(m.live_id == "live_a");
}

TEST_CASE("best_live_match equals exhaustive scan on random instances") {
  Rng rng(29);
  for (int inst = 0; inst < 20; ++inst) {
    EmbeddingStore store;
    std::vector<std::string> lives;
    for (int i = 0; i < 200; ++i) {
      const std::string id = "live_" + std::to_string(1000 + i);
      store.insert(id, random_vec(rng, 12));
      lives.push_back(id);
    }
    for (int i = 0; i < 50; ++i) {
      const std::string id = "atk_" + std::to_string(i);
      store.insert(id, random_vec(rng, 12));
      const BestMatch got = best_live_match(id, store, lives);
      const BestMatch want = brute_force_match(id, store, lives);
      CHECK(got.live_id == want.live_id);
      CHECK(got.similarity == want.similarity);
    }
  }
}

TEST_CASE("filter_pairs threshold extremes") {
  EmbeddingStore store;
  store.insert("live_0", {1.0, 0.0});
  store.insert("atk_0", {1.0, 0.1});
  store.insert("atk_1", {-1.0, 0.01});
  std::vector<Sample> samples = {
      make_sample("live_0", Label::Live, AttackCategory::Live),
      make_sample("atk_0", Label::Attack, AttackCategory::PixelLevel),
      make_sample("atk_1", Label::Attack, AttackCategory::Replay),
  };

  CHECK(filter_pairs(samples, store, -1.0).pairs.size() == 2);
  const FilterResult at_one = filter_pairs(samples, store, 1.0);
  CHECK(at_one.pairs.empty());
  CHECK(at_one.report.categories.at(AttackCategory::PixelLevel).before == 1);
}

TEST_CASE("filter_pairs uses a strict inequality at the boundary") {
  EmbeddingStore store;
  store.insert("live_0", {1.0, 0.0});
  store.insert("atk_0", {1.0, 0.0});  // similarity exactly 1.0
  std::vector<Sample> samples = {
      make_sample("live_0", Label::Live, AttackCategory::Live),
      make_sample("atk_0", Label::Attack, AttackCategory::PixelLevel),
  };
  CHECK(filter_pairs(samples, store, 1.0).pairs.empty());
  CHECK(filter_pairs(samples, store, 0.999).pairs.size() == 1);
}

TEST_CASE("filter_pairs skips invalid samples and requires lives") {
  EmbeddingStore store;
  store.insert("live_0", {1.0, 0.0});
  store.insert("atk_0", {1.0, 0.0});
  std::vector<Sample> samples = {
      make_sample("live_0", Label::Live, AttackCategory::Live),
      make_sample("atk_0", Label::Attack, AttackCategory::PixelLevel, /*valid=*/false),
  };
  const FilterResult res = filter_pairs(samples, store, -1.0);
  CHECK(res.pairs.empty());
  CHECK(res.report.categories.at(AttackCategory::PixelLevel).before == 0);

  std::vector<Sample> no_lives = {make_sample("atk_0", Label::Attack, AttackCategory::PixelLevel)};
  CHECK_THROWS_AS(filter_pairs(no_lives, store, 0.0), DomainError);
}

TEST_CASE("filter_pairs monotonicity and nesting over thresholds") {
  SynthConfig cfg;
  cfg.n_identities = 8;
  const SyntheticDataset data = generate_synthetic(cfg);

  std::set<std::pair<std::string, std::string>> previous;
  bool first = true;
  for (double tau = 0.84; tau <= 0.911; tau += 0.01) {
    const FilterResult res = filter_pairs(data.samples, data.embeddings, tau);
    std::set<std::pair<std::string, std::string>> current;
    for (const TrainPair& p : res.pairs) current.insert({p.attack_id, p.live_id});
    if (!first) {
      CHECK(current.size() <= previous.size());
      for (const auto& pair : current) CHECK(previous.count(pair) == 1);
    }
    previous = std::move(current);
    first = false;
  }
}

TEST_CASE("filter_pairs scale invariance under positive embedding scaling") {
  Rng rng(31);
  SynthConfig cfg;
  cfg.n_identities = 4;
  const SyntheticDataset data = generate_synthetic(cfg);
  EmbeddingStore scaled(data.embeddings.dim());
  for (const auto& [id, vec] : data.embeddings.records()) {
    const double factor = rng.uniform(0.1, 10.0);
    std::vector<double> v = vec;
    for (double& x : v) x *= factor;
    scaled.insert(id, v);
  }
  const FilterResult a = filter_pairs(data.samples, data.embeddings, 0.9);
  const FilterResult b = filter_pairs(data.samples, scaled, 0.9);
  REQUIRE(a.pairs.size() == b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    CHECK(a.pairs[i].attack_id == b.pairs[i].attack_id);
    CHECK(a.pairs[i].live_id == b.pairs[i].live_id);
  }
}

TEST_CASE("filter report conserves counts") {
  SynthConfig cfg;
  cfg.n_identities = 6;
  const SyntheticDataset data = generate_synthetic(cfg);
  const FilterResult res = filter_pairs(data.samples, data.embeddings, 0.9);

  std::size_t valid_attacks = 0;
  for (const Sample& s : data.samples) {
    if (s.valid && !s.is_live()) ++valid_attacks;
  }
  std::size_t before_sum = 0, after_sum = 0;
  for (const auto& [cat, count] : res.report.categories) {
    CHECK(count.after <= count.before);
    before_sum += count.before;
    after_sum += count.after;
  }
  CHECK(before_sum == valid_attacks);
  CHECK(after_sum == res.pairs.size());

  std::set<std::string> matched_lives;
  for (const TrainPair& p : res.pairs) matched_lives.insert(p.live_id);
  CHECK(res.report.live_retained == matched_lives.size());
}

TEST_CASE("pairs are sorted by attack id and round-trip through jsonl") {
  SynthConfig cfg;
  cfg.n_identities = 4;
  const SyntheticDataset data = generate_synthetic(cfg);
  const FilterResult res = filter_pairs(data.samples, data.embeddings, 0.9);
  REQUIRE(!res.pairs.empty());
  for (std::size_t i = 1; i < res.pairs.size(); ++i) {
    CHECK(res.pairs[i - 1].attack_id < res.pairs[i].attack_id);
  }
  const fs::path path = temp_file("pairs_roundtrip.jsonl");
  write_pairs_jsonl(res.pairs, path.string());
  const std::vector<TrainPair> loaded = load_pairs_jsonl(path.string());
  CHECK(loaded == res.pairs);
}

TEST_CASE("every emitted pair is an argmax match") {
  SynthConfig cfg;
  cfg.n_identities = 5;
  const SyntheticDataset data = generate_synthetic(cfg);
  const FilterResult res = filter_pairs(data.samples, data.embeddings, 0.5);
  std::vector<std::string> lives;
  for (const Sample& s : data.samples) {
    if (s.valid && s.is_live()) lives.push_back(s.id);
  }
  for (const TrainPair& p : res.pairs) {
    const BestMatch want = brute_force_match(p.attack_id, data.embeddings, lives);
    CHECK(p.live_id == want.live_id);
    CHECK(p.similarity == want.similarity);
    CHECK(p.similarity > 0.5);
  }
}
