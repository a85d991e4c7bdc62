#include "padkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace padkit {

namespace {

void require_both_classes(const ScoreSet& scores, const char* op) {
  bool has_live = false, has_attack = false;
  for (Label l : scores.labels) {
    if (l == Label::Live) has_live = true;
    else has_attack = true;
  }
  if (!has_live) throw DomainError(std::string(op) + ": no live samples in score set");
  if (!has_attack) throw DomainError(std::string(op) + ": no attack samples in score set");
}

}  // namespace

Counts confusion_at(const ScoreSet& scores, double threshold) {
  Counts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted_live = scores.scores[i] >= threshold;
    if (scores.labels[i] == Label::Live) {
      predicted_live ? ++c.tp : ++c.fn;
    } else {
      predicted_live ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

AcerTriple acer_at(const ScoreSet& scores, double threshold) {
  require_both_classes(scores, "acer_at");
  const Counts c = confusion_at(scores, threshold);
  const double apcer = static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
  const double bpcer = static_cast<double>(c.fn) / static_cast<double>(c.fn + c.tp);
  return {apcer, bpcer, (apcer + bpcer) / 2.0};
}

EerResult eer(const ScoreSet& scores) {
  require_both_classes(scores, "eer");

  std::vector<double> thresholds(scores.scores.begin(), scores.scores.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  // one threshold above every score: everything predicted attack
  thresholds.push_back(std::nextafter(thresholds.back(), std::numeric_limits<double>::infinity()));

  // As the threshold rises FAR falls and FRR rises.
  double prev_far = 0.0, prev_frr = 0.0, prev_t = 0.0;
  bool have_prev = false;
  for (double t : thresholds) {
    const AcerTriple a = acer_at(scores, t);
    const double far = a.apcer, frr = a.bpcer;
    if (far == frr) return {far, t};
    if (have_prev && prev_far > prev_frr && far < frr) {
      // interpolate both rates linearly to their crossing
      const double num = prev_far - prev_frr;
      const double den = (prev_far - prev_frr) + (frr - far);
      const double u = num / den;
      return {prev_far + u * (far - prev_far), prev_t + u * (t - prev_t)};
    }
    prev_far = far;
    prev_frr = frr;
    prev_t = t;
    have_prev = true;
  }
  // FAR starts at 1 and ends at 0, so a crossing always exists.
  throw EvaluationError("eer: no crossing found");
}

double auc(const ScoreSet& scores) {
  require_both_classes(scores, "auc");
  const std::size_t n = scores.size();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores.scores[a] < scores.scores[b];
  });

  // mid-ranks for ties
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores.scores[idx[j]] == scores.scores[idx[i]]) ++j;
    const double mid = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0 + 1.0;
    for (std::size_t k = i; k < j; ++k) rank[idx[k]] = mid;
    i = j;
  }

  double rank_sum_live = 0.0;
  std::size_t n_live = 0, n_attack = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (scores.labels[k] == Label::Live) {
      rank_sum_live += rank[k];
      ++n_live;
    } else {
      ++n_attack;
    }
  }
  const double nl = static_cast<double>(n_live);
  return (rank_sum_live - nl * (nl + 1.0) / 2.0) / (nl * static_cast<double>(n_attack));
}

double accuracy_at(const ScoreSet& scores, double threshold) {
  const Counts c = confusion_at(scores, threshold);
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(scores.size());
}

EvalReport evaluate(const ScoreSet& scores, double threshold) {
  EvalReport report;
  report.threshold = threshold;
  const AcerTriple a = acer_at(scores, threshold);
  report.apcer = a.apcer;
  report.bpcer = a.bpcer;
  report.acer = a.acer;
  const EerResult e = eer(scores);
  report.eer = e.value;
  report.eer_threshold = e.threshold;
  report.accuracy = accuracy_at(scores, threshold);
  report.auc = auc(scores);
  report.counts = confusion_at(scores, threshold);
  return report;
}

std::vector<RocPoint> roc_polyline(const ScoreSet& scores) {
  std::vector<double> thresholds(scores.scores.begin(), scores.scores.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  std::vector<RocPoint> roc;
  roc.push_back({1.0, 1.0});
  for (double t : thresholds) {
    const AcerTriple a = acer_at(scores, t);
    roc.push_back({a.apcer, 1.0 - a.bpcer});
  }
  roc.push_back({0.0, 0.0});
  return roc;
}

void write_eval_report(const EvalReport& report, const std::vector<RocPoint>& roc,
                       const std::string& path, const std::string& config_hash,
                       std::uint64_t seed) {
  nlohmann::json obj;
  obj["config_hash"] = config_hash;
  obj["seed"] = seed;
  obj["threshold"] = report.threshold;
  obj["apcer"] = report.apcer;
  obj["bpcer"] = report.bpcer;
  obj["acer"] = report.acer;
  obj["eer"] = report.eer;
  obj["eer_threshold"] = report.eer_threshold;
  obj["accuracy"] = report.accuracy;
  obj["auc"] = report.auc;
  obj["counts"] = {{"tp", report.counts.tp},
                   {"fp", report.counts.fp},
                   {"tn", report.counts.tn},
                   {"fn", report.counts.fn}};
  nlohmann::json points = nlohmann::json::array();
  for (const RocPoint& p : roc) points.push_back({p.far, p.tpr});
  obj["roc"] = points;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report: " + path);
  out << obj.dump(2) << "\n";
}

ScoreSet load_scores_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scores: " + path);
  ScoreSet scores;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("id,", 0) == 0) continue;  // header
    std::istringstream ss(line);
    std::string id, score_str, label_str;
    if (!std::getline(ss, id, ',') || !std::getline(ss, score_str, ',') ||
        !std::getline(ss, label_str)) {
      throw ParseError("scores.csv parse error at line " + std::to_string(lineno));
    }
    Label label;
    if (label_str == "live") {
      label = Label::Live;
    } else if (label_str == "attack") {
      label = Label::Attack;
    } else {
      throw ParseError("scores.csv unknown label '" + label_str + "' at line " +
                       std::to_string(lineno));
    }
    try {
      scores.push(std::stod(score_str), label);
    } catch (const std::exception&) {
      throw ParseError("scores.csv bad score at line " + std::to_string(lineno));
    }
  }
  return scores;
}

void write_scores_csv(const std::vector<std::string>& ids, const ScoreSet& scores,
                      const std::string& path) {
  if (ids.size() != scores.size()) throw DimensionError("write_scores_csv size mismatch");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scores: " + path);
  out << "id,score,label\n";
  out.precision(17);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out << ids[i] << "," << scores.scores[i] << ","
        << (scores.labels[i] == Label::Live ? "live" : "attack") << "\n";
  }
}

}  // namespace padkit
