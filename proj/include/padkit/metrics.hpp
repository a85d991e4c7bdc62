#pragma once

#include <string>
#include <vector>

#include "padkit/data.hpp"

namespace padkit {

// Scores are "liveness": higher means more live.  Positive class = live.
struct ScoreSet {
  std::vector<double> scores;
  std::vector<Label> labels;

  std::size_t size() const { return scores.size(); }
  void push(double score, Label label) {
    scores.push_back(score);
    labels.push_back(label);
  }
};

struct Counts {
  std::size_t tp = 0;  // live predicted live
  std::size_t fp = 0;  // attack predicted live
  std::size_t tn = 0;  // attack predicted attack
  std::size_t fn = 0;  // live predicted attack
};

struct EvalReport {
  double threshold = 0.0;
  double apcer = 0.0;
  double bpcer = 0.0;
  double acer = 0.0;
  double eer = 0.0;
  double eer_threshold = 0.0;
  double accuracy = 0.0;
  double auc = 0.0;
  Counts counts;
};

// Predict live iff score >= threshold.
Counts confusion_at(const ScoreSet& scores, double threshold);

struct AcerTriple {
  double apcer;
  double bpcer;
  double acer;
};
AcerTriple acer_at(const ScoreSet& scores, double threshold);

struct EerResult {
  double value;
  double threshold;
};
// FAR = FRR operating point, linearly interpolated between adjacent
// swept thresholds when no exact crossing exists.
EerResult eer(const ScoreSet& scores);

// Rank-based AUC with half credit for ties.
double auc(const ScoreSet& scores);

double accuracy_at(const ScoreSet& scores, double threshold);

EvalReport evaluate(const ScoreSet& scores, double threshold);

struct RocPoint {
  double far;
  double tpr;  // 1 - FRR
};
std::vector<RocPoint> roc_polyline(const ScoreSet& scores);

void write_eval_report(const EvalReport& report, const std::vector<RocPoint>& roc,
                       const std::string& path, const std::string& config_hash,
                       std::uint64_t seed);
// scores.csv: header "id,score,label", label in {live, attack}.
ScoreSet load_scores_csv(const std::string& path);
void write_scores_csv(const std::vector<std::string>& ids, const ScoreSet& scores,
                      const std::string& path);

}  // namespace padkit
