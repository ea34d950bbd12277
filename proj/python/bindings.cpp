#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "rbal/campaign.hpp"
#include "rbal/decision.hpp"
#include "rbal/errors.hpp"
#include "rbal/experiment.hpp"
#include "rbal/gmm.hpp"
#include "rbal/metrics.hpp"
#include "rbal/mrvm.hpp"
#include "rbal/stream.hpp"

namespace py = pybind11;
using namespace rbal;

namespace {

Belief to_belief(const Eigen::VectorXd& weights) { return Belief::normalized(weights); }

LabelledSet labelled(const Eigen::MatrixXd& x, const std::vector<int>& y, int class_count) {
  LabelledSet data;
  data.features = x;
  data.labels = y;
  data.class_count = class_count;
  return data;
}

DecisionProcess process_or_default(const DecisionProcess* dp) {
  return dp != nullptr ? *dp : DecisionProcess::z24_default();
}

py::dict record_dict(const RunRecord& record) {
  const auto n = static_cast<Eigen::Index>(record.steps.size());
  Eigen::MatrixXd beliefs(n, record.class_count);
  std::vector<int> t, action, oracle, predicted, truth;
  std::vector<double> evpi_values;
  std::vector<bool> queried;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = record.steps[static_cast<std::size_t>(i)];
    beliefs.row(i) = s.belief.transpose();
    t.push_back(s.t);
    evpi_values.push_back(s.evpi);
    queried.push_back(s.queried);
    action.push_back(s.action.index);
    oracle.push_back(s.oracle_action.index);
    predicted.push_back(s.predicted_label);
    truth.push_back(s.true_label);
  }
  auto curve = [](const std::vector<CurvePoint>& c) {
    std::vector<std::pair<int, double>> out;
    for (const auto& p : c) out.emplace_back(p.query_count, p.value);
    return out;
  };
  py::dict d;
  d["t"] = t;
  d["belief"] = beliefs;
  d["evpi"] = evpi_values;
  d["queried"] = queried;
  d["action"] = action;
  d["oracle_action"] = oracle;
  d["pred_label"] = predicted;
  d["true_label"] = truth;
  d["total_queries"] = record.total_queries();
  d["decision_accuracy"] = decision_accuracy(record);
  d["accuracy_curve"] = curve(record.accuracy_curve);
  d["f1_curve"] = curve(record.f1_curve);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Risk-based active learning: decision analysis, mRVM and GMM classifiers, campaigns";

  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<DegenerateTraining>(m, "DegenerateTraining", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<DecisionProcess>(m, "DecisionProcess")
      .def_static("z24_default", &DecisionProcess::z24_default)
      .def_static(
          "from_json",
          [](const std::string& text, bool renormalize) {
            return DecisionProcess::from_json(nlohmann::json::parse(text), renormalize);
          },
          py::arg("text"), py::arg("renormalize") = false)
      .def("to_json", [](const DecisionProcess& dp) { return dp.to_json().dump(); })
      .def_property_readonly("inspection_cost", &DecisionProcess::inspection_cost)
      .def_property_readonly("state_count", &DecisionProcess::state_count)
      .def_property_readonly("action_count", &DecisionProcess::action_count)
      .def("with_inspection_cost", &DecisionProcess::with_inspection_cost, py::arg("cost"));

  m.def(
      "expected_utility",
      [](const Eigen::VectorXd& b, int action, const DecisionProcess* dp) {
        return expected_utility(to_belief(b), Action{action}, process_or_default(dp));
      },
      py::arg("belief"), py::arg("action"), py::arg("dp") = py::none());
  m.def(
      "meu",
      [](const Eigen::VectorXd& b, const DecisionProcess* dp) {
        const Decision d = meu(to_belief(b), process_or_default(dp));
        return std::make_pair(d.action.index, d.expected_utility);
      },
      py::arg("belief"), py::arg("dp") = py::none(), "(best action index, expected utility)");
  m.def(
      "meu_perfect_info",
      [](const Eigen::VectorXd& b, const DecisionProcess* dp) {
        return meu_perfect_info(to_belief(b), process_or_default(dp));
      },
      py::arg("belief"), py::arg("dp") = py::none());
  m.def(
      "evpi",
      [](const Eigen::VectorXd& b, const DecisionProcess* dp) {
        return evpi(to_belief(b), process_or_default(dp));
      },
      py::arg("belief"), py::arg("dp") = py::none());
  m.def(
      "should_query",
      [](double value, const DecisionProcess* dp) {
        return should_query(value, process_or_default(dp));
      },
      py::arg("evpi"), py::arg("dp") = py::none());
  m.def(
      "decide",
      [](const Eigen::VectorXd& b, const DecisionProcess* dp) {
        return decide(to_belief(b), process_or_default(dp)).index;
      },
      py::arg("belief"), py::arg("dp") = py::none());

  m.def(
      "generate_stream",
      [](std::uint64_t seed, const std::optional<std::string>& config_json) {
        GeneratorConfig g = config_json ? GeneratorConfig::from_json(nlohmann::json::parse(*config_json))
                                        : GeneratorConfig::z24_analog();
        g.seed = seed;
        const MonitoringStream s = generate_z24_analog(g);
        return std::make_pair(s.features, s.labels);
      },
      py::arg("seed") = 0, py::arg("config_json") = py::none(),
      "Synthetic Z24-analog stream as (features n x 4, labels 1..4)");
  m.def(
      "assign_labels",
      [](int rows, int damage_start, const std::vector<std::pair<int, int>>& cold) {
        std::vector<IndexRange> ranges;
        for (auto [b, e] : cold) ranges.push_back({b, e});
        return assign_labels(rows, damage_start, ranges);
      },
      py::arg("row_count"), py::arg("damage_start_index"), py::arg("cold_ranges"));

  py::class_<MrvmModel>(m, "MrvmModel")
      .def("predict_proba", &MrvmModel::predict_proba_rows, py::arg("x"))
      .def(
          "predict_label",
          [](const MrvmModel& model, const Eigen::VectorXd& x) { return model.predict_label(x).index; },
          py::arg("x"))
      .def_property_readonly("relevant_count", &MrvmModel::relevant_count)
      .def_readonly("active_indices", &MrvmModel::active_indices)
      .def_readonly("weights", &MrvmModel::weights)
      .def_readonly("scales", &MrvmModel::scales)
      .def_property_readonly("iterations", [](const MrvmModel& mo) { return mo.diagnostics.iterations; })
      .def_property_readonly("converged", [](const MrvmModel& mo) { return mo.diagnostics.converged; })
      .def_property_readonly("objective_trace",
                             [](const MrvmModel& mo) { return mo.diagnostics.objective_trace; })
      .def("to_json", [](const MrvmModel& mo) { return mo.to_json().dump(); });

  m.def(
      "train_mrvm",
      [](const Eigen::MatrixXd& x, const std::vector<int>& y, int variant, int class_count,
         int max_iterations, double tolerance, int quadrature_nodes, bool allow_single_class) {
        TrainConfig cfg;
        if (variant != 1 && variant != 2) throw ContractError("variant must be 1 or 2");
        cfg.variant = variant == 1 ? MrvmVariant::kConstructive : MrvmVariant::kPruning;
        cfg.max_iterations = max_iterations;
        cfg.tolerance = tolerance;
        cfg.quadrature_nodes = quadrature_nodes;
        cfg.allow_single_class = allow_single_class;
        return train(labelled(x, y, class_count), cfg);
      },
      py::arg("x"), py::arg("y"), py::arg("variant") = 2, py::arg("class_count") = 4,
      py::arg("max_iterations") = 200, py::arg("tolerance") = 1e-4, py::arg("quadrature_nodes") = 64,
      py::arg("allow_single_class") = false,
      "Train mRVM1 (variant=1) or mRVM2 (variant=2); labels are 1-based");

  py::class_<GmmModel>(m, "GmmModel")
      .def("predict_proba", &GmmModel::predict_proba_rows, py::arg("x"))
      .def("class_prior", &GmmModel::class_prior)
      .def("to_json", [](const GmmModel& g) { return g.to_json().dump(); });
  m.def(
      "gmm_fit",
      [](const Eigen::MatrixXd& x, const std::vector<int>& y, int class_count) {
        const LabelledSet data = labelled(x, y, class_count);
        return gmm_fit(data, GmmPrior::weakly_informative(data));
      },
      py::arg("x"), py::arg("y"), py::arg("class_count") = 4);

  m.def(
      "run_campaign",
      [](const Eigen::MatrixXd& features, const std::vector<int>& labels, const std::string& classifier,
         int initial_labelled_count, const DecisionProcess* dp, std::uint64_t seed,
         bool record_curves, bool single_class_training) {
        MonitoringStream stream{features, labels};
        CampaignConfig c;
        c.classifier = classifier_from_string(classifier);
        c.initial_labelled_count = initial_labelled_count;
        c.decision_process = process_or_default(dp);
        c.seed = seed;
        c.record_curves = record_curves;
        c.single_class_training = single_class_training;
        RunRecord record;
        {
          py::gil_scoped_release release;
          record = run_campaign(stream, c);
        }
        return record_dict(record);
      },
      py::arg("features"), py::arg("labels"), py::arg("classifier") = "mrvm2",
      py::arg("initial_labelled_count") = 10, py::arg("dp") = py::none(), py::arg("seed") = 0,
      py::arg("record_curves") = true, py::arg("single_class_training") = true);

  m.def("macro_f1", [](const std::vector<int>& p, const std::vector<int>& t, int k) { return macro_f1(p, t, k); },
        py::arg("predicted"), py::arg("truth"), py::arg("class_count"));
  m.def("percentile", &percentile, py::arg("values"), py::arg("p"));

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const ExperimentConfig config = ExperimentConfig::from_json(nlohmann::json::parse(config_json));
        Manifest manifest;
        {
          py::gil_scoped_release release;
          manifest = run_experiment(config);
        }
        return manifest.to_json().dump();
      },
      py::arg("config_json"), "Run an experiment from its JSON config; returns the manifest JSON");
}
