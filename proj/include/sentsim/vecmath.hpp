#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace sentsim {

using Vec = std::vector<double>;

namespace vecmath {

inline bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double sq_dist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double l2_norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double l2_dist(const Vec& a, const Vec& b) {
  return std::sqrt(sq_dist(a, b));
}

inline double mean(const Vec& a) {
  if (a.empty()) return 0.0;
  double s = 0.0;
  for (double x : a) s += x;
  return s / static_cast<double>(a.size());
}

inline double rms(const Vec& a) {
  if (a.empty()) return 0.0;
  return std::sqrt(dot(a, a) / static_cast<double>(a.size()));
}

inline Vec add(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec scale(const Vec& a, double c) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

inline Vec concat(const Vec& a, const Vec& b) {
  Vec r;
  r.reserve(a.size() + b.size());
  r.insert(r.end(), a.begin(), a.end());
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace vecmath
}  // namespace sentsim
