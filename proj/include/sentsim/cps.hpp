#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sentsim/perception.hpp"
#include "sentsim/reality.hpp"
#include "sentsim/simspace.hpp"
#include "sentsim/taggers.hpp"

namespace sentsim::cps {

using core::ConflictInput;
using core::EpistemicTag;
using core::GateParams;
using core::SensorySignal;
using perception::EncoderParams;
using perception::InterpretationScores;
using perception::PerceptualRepresentation;
using simspace::SimilarityProfile;
using simspace::SimilaritySpace;

// P(S): FloorOne returns max(alpha*s + sum(beta_i*c_i), 1); CapOne the min
// variant. Conflict vectors enter through their mean.
double assertoric_priority(double s_strength,
                           const std::vector<ConflictInput>& conflicts,
                           const GateParams& g);

struct Competitor {
  std::string source_id;
  InterpretationScores scores;
  EpistemicTag tag;
};

struct TraceEntry {
  std::string input_id;  // "<source>/<hypothesis>"
  double score = 0.0;
  double tag = 0.0;
};

struct DecisionOutcome {
  std::string chosen;         // winning hypothesis
  std::string chosen_source;  // source that carried it
  Vec weighted_scores;        // aligned with trace
  std::vector<TraceEntry> trace;
};

// Global argmax of score*tag over every (source, hypothesis) pair; ties go
// to the lexicographically smaller "<source>/<hypothesis>" key.
DecisionOutcome decide(const std::vector<Competitor>& competitors);

struct UtilitySpec {
  std::vector<std::string> action_ids;
  // bucket -> action -> utility; every bucket row covers every action
  std::map<std::string, std::map<std::string, double>> utility;
};

void validate_utility(const UtilitySpec& u);

std::string select_action(const UtilitySpec& u, const std::string& bucket,
                          const DecisionOutcome& inputs);

// Categorical stand-in the decision layer works with. Only the label, tag,
// profile and the representation's id are reachable; raw signal values are
// not stored at all.
class ProxyObject {
 public:
  const std::string& label() const { return label_; }
  const EpistemicTag& tag() const { return tag_; }
  const SimilarityProfile& profile() const { return profile_; }
  const std::string& rep_ref() const { return rep_ref_; }

 private:
  friend ProxyObject bind_proxy(const PerceptualRepresentation&,
                                const EpistemicTag&, const std::string&,
                                const SimilarityProfile&);
  ProxyObject() = default;
  std::string label_;
  EpistemicTag tag_;
  SimilarityProfile profile_;
  std::string rep_ref_;
};

ProxyObject bind_proxy(const PerceptualRepresentation& rep,
                       const EpistemicTag& tag, const std::string& label,
                       const SimilarityProfile& profile);

enum class TagCombine { Product, Min, Mean };

const char* tag_combine_name(TagCombine c);
TagCombine tag_combine_from_name(const std::string& s);

// The taggers a channel runs each step. Absent taggers abstain; if none
// fires the combined reliability is 1.
struct TaggerSet {
  std::optional<EncoderParams> supervised;
  std::optional<taggers::TemporalPredictor> temporal;
  std::optional<taggers::BayesianScorer> bayes;  // latent = belief mean
  TagCombine combine = TagCombine::Product;
  // store the predicted rep instead of a distrusted observation
  bool history_repair = true;
  double repair_threshold = 0.5;
};

struct ChannelConfig {
  std::string channel_id;
  EncoderParams encoder;
  EncoderParams head;  // rep -> one score per hypothesis
  std::vector<std::string> hypotheses;
  EncoderParams decoder;  // rep -> reality-variable value
  std::string variable_id;
  GateParams gate;
  std::vector<std::string> conflict_sources;  // aligned with gate.betas
  SimilaritySpace space;
  std::vector<PerceptualRepresentation> references;
  Vec prototype;
  TaggerSet taggers;
  // ablation hook: a frozen profile served instead of computing one
  std::optional<SimilarityProfile> external_profile_table;
};

// Scores a configured pair of hypotheses from the belief norm: the second
// hypothesis gets sigmoid((||mean|| - threshold)/width), the first its
// complement.
struct RealityCompetitorRule {
  bool enabled = false;
  std::string variable_id;
  std::vector<std::string> hypotheses;  // exactly two
  double threshold = 0.3;
  double width = 0.05;
  double reliability = 1.0;
};

struct SilencingConfig {
  bool enabled = false;  // ablation: contradicted percepts are muted
  double threshold = 1.0;
};

struct AgentConfig {
  std::vector<ChannelConfig> channels;
  reality::FusionPolicy fusion;
  UtilitySpec utility;
  RealityCompetitorRule reality_competitor;
  SilencingConfig silencing;
  double r_assertoric = 10.0;
};

void validate_agent_config(const AgentConfig& cfg);

struct Agent {
  AgentConfig cfg;
  core::RealityBelief belief;
  std::map<std::string, std::deque<PerceptualRepresentation>> history;
};

Agent make_agent(AgentConfig cfg);

const ChannelConfig& channel_of(const Agent& agent,
                                const std::string& channel_id);

struct StepTrace {
  long long t = 0;
  std::string channel;
  std::string rep_id;
  Vec rep;
  SimilarityProfile profile;
  bool profile_deferred = false;
  std::map<std::string, double> tagger_reliabilities;
  double combined_reliability = 1.0;
  double s_strength = 0.0;
  std::vector<ConflictInput> conflicts;
  double priority = 1.0;
  Vec decoded;
  double conflict_measure = 0.0;  // against the pre-update belief
  std::string percept_choice;    // within-channel argmax hypothesis
  bool percept_silenced = false;
  DecisionOutcome decision;
  std::string action;
  std::string proxy_label;
  std::map<std::string, core::Estimate> belief_after;
};

struct StepOutcome {
  Agent agent;
  std::string action;
  StepTrace trace;
};

StepOutcome step(const Agent& agent, const SensorySignal& obs);

// Audit hook: replaces the generated conflict inputs with injected ones.
StepOutcome step_with_conflicts(const Agent& agent, const SensorySignal& obs,
                                const std::vector<ConflictInput>& injected);

}  // namespace sentsim::cps
