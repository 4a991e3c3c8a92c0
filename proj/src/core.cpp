#include "sentsim/core.hpp"

#include <algorithm>
#include <cmath>

namespace sentsim::core {

const char* origin_name(Origin o) {
  switch (o) {
    case Origin::External: return "external";
    case Origin::InternallyGenerated: return "internal";
    case Origin::Unknown: return "unknown";
  }
  return "unknown";
}

Origin origin_from_name(const std::string& s) {
  if (s == "external") return Origin::External;
  if (s == "internal") return Origin::InternallyGenerated;
  if (s == "unknown") return Origin::Unknown;
  raise(Err::InvalidSpec, "unknown origin label '" + s + "'");
}

void validate_signal(const SensorySignal& s) {
  require(!s.values.empty(), Err::EmptyVector,
          "signal on channel '" + s.channel_id + "'");
  require(vecmath::all_finite(s.values), Err::NonFiniteValues,
          "signal on channel '" + s.channel_id + "'");
  require(s.t >= 0, Err::InvalidSpec, "negative time step");
}

void validate_conflict(const ConflictInput& c) {
  require(vecmath::all_finite(c.values), Err::NonFiniteValues,
          "conflict source '" + c.source_id + "'");
  require(c.weight_hint >= 0.0, Err::NegativeParams,
          "conflict weight_hint for '" + c.source_id + "'");
}

void validate_gate(const GateParams& g) {
  require(std::isfinite(g.alpha) && g.alpha >= 0.0, Err::NegativeParams,
          "gate alpha");
  for (double b : g.betas)
    require(std::isfinite(b) && b >= 0.0, Err::NegativeParams, "gate beta");
}

bool gate_is_assertoric(const GateParams& g, double r_assertoric) {
  double max_beta = 0.0;
  for (double b : g.betas) max_beta = std::max(max_beta, b);
  return g.alpha >= r_assertoric * max_beta;
}

EpistemicTag make_tag(double reliability, const std::string& tagger_id,
                      const std::string& subject) {
  require(subject.size() > 0, Err::EmptySubject, "tag by '" + tagger_id + "'");
  require(std::isfinite(reliability) && reliability >= 0.0 &&
              reliability <= 1.0,
          Err::ReliabilityOutOfRange,
          "got " + std::to_string(reliability) + " from '" + tagger_id + "'");
  return EpistemicTag{reliability, tagger_id, subject};
}

void validate_belief(const RealityBelief& z) {
  for (const auto& [id, est] : z.estimates) {
    require(est.precision > 0.0, Err::NonPositivePrecision, "variable " + id);
    require(vecmath::all_finite(est.mean), Err::NonFiniteValues,
            "variable " + id);
  }
}

}  // namespace sentsim::core
