#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "padkit/config.hpp"
#include "padkit/losses.hpp"
#include "padkit/metrics.hpp"
#include "padkit/optim.hpp"
#include "padkit/pairmine.hpp"
#include "padkit/pipeline.hpp"

namespace py = pybind11;
using namespace padkit;

namespace {

ScoreSet make_score_set(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) {
    throw DimensionError("scores and labels must have equal length");
  }
  ScoreSet s;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    s.push(scores[i], labels[i] ? Label::Live : Label::Attack);
  }
  return s;
}

Tensor make_projection_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw DomainError("empty projection matrix");
  const std::size_t n = rows.size(), d = rows[0].size();
  Tensor m({n, d});
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != d) throw DimensionError("ragged projection matrix");
    for (std::size_t j = 0; j < d; ++j) m.at2(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "face-attack detection toolkit core";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<IntegrityError>(m, "IntegrityError");

  m.def("cosine_similarity", &cosine_similarity, py::arg("a"), py::arg("b"));

  m.def(
      "focal_loss",
      [](double logit, double target, double alpha, double gamma) {
        LossConfig cfg;
        cfg.focal_alpha = alpha;
        cfg.focal_gamma = gamma;
        const ScalarLoss l = focal_loss(logit, target, cfg);
        return py::make_tuple(l.value, l.grad);
      },
      py::arg("logit"), py::arg("target"), py::arg("alpha") = 0.5, py::arg("gamma") = 0.7,
      "Binary focal loss; returns (value, d_value/d_logit).");

  m.def(
      "supcon_loss",
      [](const std::vector<std::vector<double>>& projections, const std::vector<int>& labels,
         double temperature) {
        const SupConResult r =
            supcon_loss(make_projection_matrix(projections), labels, temperature);
        std::vector<std::vector<double>> grad(projections.size());
        for (std::size_t i = 0; i < projections.size(); ++i) {
          grad[i].resize(projections[i].size());
          for (std::size_t j = 0; j < grad[i].size(); ++j) grad[i][j] = r.grad.at2(i, j);
        }
        return py::make_tuple(r.value, grad, r.valid_anchor_count);
      },
      py::arg("projections"), py::arg("labels"), py::arg("temperature") = 0.14,
      "Supervised contrastive loss over unit-norm rows; returns (value, grad, anchors).");

  m.def(
      "eer",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        const EerResult r = eer(make_score_set(scores, labels));
        return py::make_tuple(r.value, r.threshold);
      },
      py::arg("scores"), py::arg("labels"), "Labels: 1 = live, 0 = attack.");

  m.def(
      "auc",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        return auc(make_score_set(scores, labels));
      },
      py::arg("scores"), py::arg("labels"));

  m.def(
      "acer",
      [](const std::vector<double>& scores, const std::vector<int>& labels, double threshold) {
        const AcerTriple a = acer_at(make_score_set(scores, labels), threshold);
        return py::make_tuple(a.apcer, a.bpcer, a.acer);
      },
      py::arg("scores"), py::arg("labels"), py::arg("threshold") = 0.5);

  m.def(
      "lr_at",
      [](std::size_t step, std::size_t total_steps, double peak_lr, double floor_lr,
         double warmup_fraction) {
        OptimConfig cfg;
        cfg.peak_lr = peak_lr;
        cfg.floor_lr = floor_lr;
        cfg.warmup_fraction = warmup_fraction;
        return lr_at(step, total_steps, cfg);
      },
      py::arg("step"), py::arg("total_steps"), py::arg("peak_lr") = 1.82e-4,
      py::arg("floor_lr") = 6.8e-7, py::arg("warmup_fraction") = 0.05);

  m.def(
      "run_train",
      [](const std::string& config_json) {
        RunConfig config = run_config_from_json(config_json);
        const TrainOutputs out = cmd_train(config);
        py::dict d;
        d["best_epoch"] = out.result.best.epoch;
        d["val_eer"] = out.result.best.val_eer;
        d["val_acer"] = out.validation_report.acer;
        d["val_auc"] = out.validation_report.auc;
        d["val_accuracy"] = out.validation_report.accuracy;
        d["checkpoint_path"] = out.checkpoint_path;
        d["history_path"] = out.history_path;
        return d;
      },
      py::arg("config_json"), "Full synthetic pipeline: generate, mine pairs, train, evaluate.");

  m.def("gradcheck_all", []() {
    std::ostringstream sink;
    return cmd_gradcheck(sink);
  });

  m.def("default_config_json", []() { return run_config_to_json(RunConfig{}); });
}
