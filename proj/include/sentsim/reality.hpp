#pragma once

#include <string>
#include <vector>

#include "sentsim/core.hpp"

namespace sentsim::reality {

using core::EpistemicTag;
using core::Estimate;
using core::RealityBelief;

struct FusionPolicy {
  double adopt_threshold = 0.95;
  double ignore_threshold = 0.05;
  double reliability_to_precision_gain = 1.0;
};

void validate_policy(const FusionPolicy& p);

// Precision-weighted Gaussian fusion:
//   mean' = (p1*m1 + p2*v) / (p1 + p2),  precision' = p1 + p2.
Estimate fuse(const Estimate& prior, const Estimate& obs);

struct Percept {
  std::string variable_id;
  Vec value;  // decoded variable value
  EpistemicTag tag;
};

// Three-regime update, one regime per percept by its tag:
//   reliability >= adopt_threshold  -> replace (precision = reliability*gain)
//   reliability <= ignore_threshold -> belief untouched
//   otherwise                       -> fuse (obs precision = reliability*gain)
// Unknown variables are created by the adopt/fuse branches unless strict.
// t increments by one per call.
RealityBelief update(const RealityBelief& z, const std::vector<Percept>& percepts,
                     const FusionPolicy& policy, bool strict = false);

// Standardized divergence |value - mean| * sqrt(precision) (L2 over dims).
double conflict(const RealityBelief& z, const std::string& variable_id,
                const Vec& value);

bool has_variable(const RealityBelief& z, const std::string& variable_id);

}  // namespace sentsim::reality
