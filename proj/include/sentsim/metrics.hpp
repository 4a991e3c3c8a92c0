#pragma once

#include <algorithm>
#include <vector>

#include "sentsim/error.hpp"
#include "sentsim/vecmath.hpp"

namespace sentsim::metrics {

// Probability that a random positive outscores a random negative
// (Mann-Whitney form, ties counted half).
inline double auc(const Vec& positives, const Vec& negatives) {
  require(!positives.empty() && !negatives.empty(), Err::EmptyRecords,
          "auc needs both classes");
  double u = 0.0;
  for (double p : positives)
    for (double n : negatives) {
      if (p > n)
        u += 1.0;
      else if (p == n)
        u += 0.5;
    }
  return u / (static_cast<double>(positives.size()) *
              static_cast<double>(negatives.size()));
}

// Fraction of correct binary predictions at a 0.5 threshold.
inline double accuracy(const Vec& scores, const std::vector<int>& labels) {
  require(scores.size() == labels.size() && !scores.empty(),
          Err::SizeMismatch, "accuracy");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if ((scores[i] >= 0.5 ? 1 : 0) == labels[i]) ++hit;
  return static_cast<double>(hit) / static_cast<double>(scores.size());
}

}  // namespace sentsim::metrics
