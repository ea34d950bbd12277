#include "rbal/campaign.hpp"

#include <nlohmann/json.hpp>

#include "rbal/errors.hpp"
#include "rbal/metrics.hpp"

namespace rbal {

const char* to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kGmm: return "gmm";
    case ClassifierKind::kMrvm1: return "mrvm1";
    case ClassifierKind::kMrvm2: return "mrvm2";
  }
  return "gmm";
}

ClassifierKind classifier_from_string(const std::string& name) {
  if (name == "gmm") return ClassifierKind::kGmm;
  if (name == "mrvm1") return ClassifierKind::kMrvm1;
  if (name == "mrvm2") return ClassifierKind::kMrvm2;
  throw ConfigError("unknown classifier: " + name + " (expected gmm, mrvm1 or mrvm2)");
}

BeliefModel::BeliefModel(ClassifierKind kind, const LabelledSet& seed_set,
                         const CampaignConfig& config)
    : kind_(kind), class_count_(seed_set.class_count), train_(config.train) {
  train_.variant = kind == ClassifierKind::kMrvm1 ? MrvmVariant::kConstructive
                                                  : MrvmVariant::kPruning;
  train_.seed = config.seed;
  train_.allow_single_class = config.single_class_training;
  kernel_setup_.standardization = Standardizer::fit(seed_set.features);
  switch (config.kernel_kind) {
    case KernelKind::kRbf:
      kernel_setup_.kernel = KernelSpec::rbf(
          config.kernel_width.value_or(median_pairwise_distance(
              kernel_setup_.standardization.apply(seed_set.features))));
      break;
    case KernelKind::kLinear:
      kernel_setup_.kernel = KernelSpec::linear();
      break;
    case KernelKind::kPolynomial:
      kernel_setup_.kernel = KernelSpec::polynomial(config.polynomial_degree,
                                                    config.polynomial_offset);
      break;
  }
  kernel_setup_.kernel.validate();
  gmm_prior_ = GmmPrior::weakly_informative(seed_set);
}

void BeliefModel::fit(const LabelledSet& data) {
  if (kind_ == ClassifierKind::kGmm) {
    gmm_ = gmm_fit(data, gmm_prior_);
    fallback_ = false;
    return;
  }
  try {
    MrvmModel model = train(data, train_, kernel_setup_);
    fallback_ = model.diagnostics.degenerate;
    mrvm_ = std::move(model);
  } catch (const DegenerateTraining&) {
    fallback_ = true;
  } catch (const NumericalError&) {
    fallback_ = true;
  }
}

Belief BeliefModel::belief(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (fallback_) return Belief::uniform(class_count_);
  if (kind_ == ClassifierKind::kGmm) return gmm_->predict_proba(x);
  return mrvm_->predict_proba(x);
}

Eigen::MatrixXd BeliefModel::beliefs(const FeatureMatrix& x) const {
  if (fallback_) return Eigen::MatrixXd::Constant(x.rows(), class_count_, 1.0 / class_count_);
  if (kind_ == ClassifierKind::kGmm) return gmm_->predict_proba_rows(x);
  return mrvm_->predict_proba_rows(x);
}

nlohmann::json BeliefModel::checkpoint() const {
  nlohmann::json doc{{"classifier", to_string(kind_)}, {"fallback", fallback_}};
  if (!fallback_) {
    doc["model"] = kind_ == ClassifierKind::kGmm ? gmm_->to_json() : mrvm_->to_json();
  }
  return doc;
}

namespace {

void append(LabelledSet& data, const Eigen::Ref<const Eigen::RowVectorXd>& x, int label) {
  const auto n = data.features.rows();
  data.features.conservativeResize(n + 1, x.size());
  data.features.row(n) = x;
  data.labels.push_back(label);
}

void record_milestone(RunRecord& record, const BeliefModel& model, const MonitoringStream& stream,
                      const DecisionProcess& dp, const std::vector<Action>& oracle,
                      int query_count) {
  const Eigen::MatrixXd beliefs = model.beliefs(stream.features);
  std::vector<Action> chosen(static_cast<std::size_t>(stream.size()));
  std::vector<int> predicted(static_cast<std::size_t>(stream.size()));
  for (Eigen::Index i = 0; i < stream.size(); ++i) {
    const Belief b = Belief::normalized(beliefs.row(i).transpose());
    chosen[static_cast<std::size_t>(i)] = decide(b, dp);
    predicted[static_cast<std::size_t>(i)] = b.argmax().index;
  }
  record.accuracy_curve.push_back({query_count, decision_accuracy(chosen, oracle)});
  record.f1_curve.push_back({query_count, macro_f1(predicted, stream.labels, record.class_count)});
}

}  // namespace

RunRecord run_campaign(const MonitoringStream& stream, const CampaignConfig& config) {
  const auto length = static_cast<int>(stream.size());
  if (length == 0) throw ContractError("run_campaign: empty stream");
  if (static_cast<int>(stream.labels.size()) != length)
    throw ContractError("run_campaign: one label per observation required");
  if (config.initial_labelled_count < 1 || config.initial_labelled_count >= length)
    throw ContractError("run_campaign: initial_labelled_count must lie in [1, stream length)");
  const auto& dp = config.decision_process;
  const int classes = dp.state_count();
  for (int label : stream.labels)
    if (label < 1 || label > classes) throw ContractError("run_campaign: label outside 1..K");

  LabelledSet labelled;
  labelled.class_count = classes;
  labelled.features = stream.features.topRows(config.initial_labelled_count);
  labelled.labels.assign(stream.labels.begin(), stream.labels.begin() + config.initial_labelled_count);

  BeliefModel model(config.classifier, labelled, config);
  model.fit(labelled);

  std::vector<Action> oracle(static_cast<std::size_t>(length));
  for (int t = 0; t < length; ++t)
    oracle[static_cast<std::size_t>(t)] =
        decide(Belief::one_hot(HealthState{stream.labels[static_cast<std::size_t>(t)]}, classes), dp);

  RunRecord record;
  record.class_count = classes;
  record.initial_labelled_count = config.initial_labelled_count;
  record.stream_length = length;
  int queries = config.initial_labelled_count;
  if (config.record_curves) record_milestone(record, model, stream, dp, oracle, queries);

  for (int t = config.initial_labelled_count; t < length; ++t) {
    const auto x = stream.features.row(t);
    const int truth = stream.labels[static_cast<std::size_t>(t)];
    StepRecord step;
    step.t = t;
    step.fallback = model.using_fallback();
    const Belief belief = model.belief(x.transpose());
    step.belief = belief.probs();
    step.evpi = evpi(belief, dp);
    step.queried = should_query(step.evpi, dp);
    step.predicted_label = belief.argmax().index;
    step.true_label = truth;
    step.oracle_action = oracle[static_cast<std::size_t>(t)];
    if (step.queried) {
      // Inspection reveals y_t before d_t is taken.
      step.action = decide(Belief::one_hot(HealthState{truth}, classes), dp);
      append(labelled, x, truth);
      model.fit(labelled);
      ++queries;
      if (config.record_curves) record_milestone(record, model, stream, dp, oracle, queries);
    } else {
      step.action = decide(belief, dp);
    }
    record.steps.push_back(std::move(step));
  }
  record.final_model = model.checkpoint();
  return record;
}

}  // namespace rbal
