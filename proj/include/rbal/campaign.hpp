#pragma once

// Risk-based active learning over a monitoring stream.  For each arriving
// observation the classifier belief feeds the decision process; when the
// expected value of perfect information exceeds the inspection cost the true
// state is inspected, added to the labelled set, the classifier retrained,
// and the decision taken with the revealed state.

#include <cstdint>
#include <optional>
#include <string>

#include "rbal/decision.hpp"
#include "rbal/gmm.hpp"
#include "rbal/mrvm.hpp"
#include "rbal/record.hpp"
#include "rbal/stream.hpp"

namespace rbal {

enum class ClassifierKind { kGmm, kMrvm1, kMrvm2 };

const char* to_string(ClassifierKind kind);
ClassifierKind classifier_from_string(const std::string& name);

struct CampaignConfig {
  ClassifierKind classifier = ClassifierKind::kMrvm2;
  int initial_labelled_count = 10;
  DecisionProcess decision_process = DecisionProcess::z24_default();
  TrainConfig train;  // variant is taken from classifier
  KernelKind kernel_kind = KernelKind::kRbf;
  // Unset: median pairwise distance of the standardized seed set.
  std::optional<double> kernel_width;
  int polynomial_degree = 2;
  double polynomial_offset = 1.0;
  std::uint64_t seed = 0;
  // mRVMs fit one-class labelled sets; off restores refuse-and-fall-back.
  bool single_class_training = true;
  // Whole-stream decision accuracy and f1 after every (re)training.
  bool record_curves = true;
};

// A classifier that may be unable to train; it then answers with the
// uniform belief.
class BeliefModel {
 public:
  BeliefModel(ClassifierKind kind, const LabelledSet& seed_set, const CampaignConfig& config);

  void fit(const LabelledSet& data);
  bool using_fallback() const { return fallback_; }

  Belief belief(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::MatrixXd beliefs(const FeatureMatrix& x) const;  // n x K
  nlohmann::json checkpoint() const;

 private:
  ClassifierKind kind_;
  int class_count_;
  TrainConfig train_;
  KernelSetup kernel_setup_;
  GmmPrior gmm_prior_;
  std::optional<MrvmModel> mrvm_;
  std::optional<GmmModel> gmm_;
  bool fallback_ = true;
};

RunRecord run_campaign(const MonitoringStream& stream, const CampaignConfig& config);

}  // namespace rbal
