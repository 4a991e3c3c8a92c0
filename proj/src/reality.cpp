#include "sentsim/reality.hpp"

#include <cmath>

namespace sentsim::reality {

void validate_policy(const FusionPolicy& p) {
  require(p.adopt_threshold >= 0.0 && p.adopt_threshold <= 1.0 &&
              p.ignore_threshold >= 0.0 && p.ignore_threshold <= 1.0,
          Err::InvalidSpec, "fusion thresholds must lie in [0,1]");
  require(p.ignore_threshold < p.adopt_threshold, Err::InvalidSpec,
          "ignore_threshold must be below adopt_threshold");
  require(p.reliability_to_precision_gain > 0.0, Err::InvalidSpec,
          "precision gain must be positive");
}

Estimate fuse(const Estimate& prior, const Estimate& obs) {
  require(prior.precision > 0.0 && obs.precision > 0.0,
          Err::NonPositivePrecision, "fuse");
  require(prior.mean.size() == obs.mean.size(), Err::DimensionMismatch,
          "fuse operand dims");
  Estimate out;
  out.precision = prior.precision + obs.precision;
  out.mean.resize(prior.mean.size());
  for (std::size_t i = 0; i < prior.mean.size(); ++i)
    out.mean[i] =
        (prior.precision * prior.mean[i] + obs.precision * obs.mean[i]) /
        out.precision;
  return out;
}

RealityBelief update(const RealityBelief& z, const std::vector<Percept>& percepts,
                     const FusionPolicy& policy, bool strict) {
  validate_policy(policy);
  RealityBelief out = z;
  out.t = z.t + 1;
  for (const auto& p : percepts) {
    require(vecmath::all_finite(p.value), Err::NonFiniteValues,
            "percept for " + p.variable_id);
    const double r = p.tag.reliability;
    auto it = out.estimates.find(p.variable_id);
    if (it == out.estimates.end()) {
      require(!strict, Err::UnknownVariable, p.variable_id);
      if (r <= policy.ignore_threshold) continue;
      out.estimates[p.variable_id] =
          Estimate{p.value, r * policy.reliability_to_precision_gain};
      continue;
    }
    if (r >= policy.adopt_threshold) {
      it->second =
          Estimate{p.value, r * policy.reliability_to_precision_gain};
    } else if (r <= policy.ignore_threshold) {
      // untouched
    } else {
      it->second = fuse(it->second,
                        Estimate{p.value,
                                 r * policy.reliability_to_precision_gain});
    }
  }
  core::validate_belief(out);
  return out;
}

bool has_variable(const RealityBelief& z, const std::string& variable_id) {
  return z.estimates.count(variable_id) > 0;
}

double conflict(const RealityBelief& z, const std::string& variable_id,
                const Vec& value) {
  auto it = z.estimates.find(variable_id);
  require(it != z.estimates.end(), Err::UnknownVariable, variable_id);
  require(value.size() == it->second.mean.size(), Err::DimensionMismatch,
          "conflict value dims");
  return vecmath::l2_dist(value, it->second.mean) *
         std::sqrt(it->second.precision);
}

}  // namespace sentsim::reality
