#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sentsim/error.hpp"
#include "sentsim/rng.hpp"
#include "sentsim/vecmath.hpp"

namespace sentsim::core {

// Ground-truth provenance of a signal. Signals delivered to the agent
// always carry Unknown; External/InternallyGenerated live only in
// environment-side ground-truth records used for scoring.
enum class Origin { External, InternallyGenerated, Unknown };

const char* origin_name(Origin o);
Origin origin_from_name(const std::string& s);

struct SensorySignal {
  std::string channel_id;
  long long t = 0;  // discrete time step, >= 0
  Vec values;
  Origin origin = Origin::Unknown;
};

// ok iff values are finite and non-empty and t >= 0.
void validate_signal(const SensorySignal& s);

struct ConflictInput {
  std::string source_id;
  Vec values;
  double weight_hint = 0.0;
};

void validate_conflict(const ConflictInput& c);

enum class ClampMode { FloorOne, CapOne };

struct GateParams {
  double alpha = 1.0;               // priority coefficient for the signal
  std::vector<double> betas;        // one weight per conflict source
  ClampMode clamp_mode = ClampMode::FloorOne;
};

void validate_gate(const GateParams& g);

// An assertoric configuration requires alpha to dominate every conflict
// weight by at least the given ratio.
bool gate_is_assertoric(const GateParams& g, double r_assertoric);

struct EpistemicTag {
  double reliability = 0.0;  // in [0, 1]
  std::string tagger_id;
  std::string subject;       // rep_id of the tagged representation
};

// Out-of-range reliability is rejected, never clamped.
EpistemicTag make_tag(double reliability, const std::string& tagger_id,
                      const std::string& subject);

struct Estimate {
  Vec mean;
  double precision = 1.0;  // inverse variance, > 0
};

struct RealityBelief {
  long long t = 0;
  std::map<std::string, Estimate> estimates;  // variable_id -> estimate
};

void validate_belief(const RealityBelief& z);

}  // namespace sentsim::core
