#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace sentsim::core {

// FNV-1a, used for stream derivation and config hashing.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Named deterministic random stream. Two streams constructed with the same
// (seed, stream_id) produce bit-identical draw sequences; distinct stream
// ids decorrelate. Draws are derived from raw mt19937_64 output only, so
// sequences do not depend on the standard library's distribution
// implementations.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string stream_id)
      : seed_(seed), stream_id_(std::move(stream_id)),
        engine_(seed ^ fnv1a64(stream_id_)) {}

  std::uint64_t seed() const { return seed_; }
  const std::string& stream_id() const { return stream_id_; }

  // Child stream for an independent purpose; same seed, derived id.
  RngStream derive(const std::string& sub) const {
    return RngStream(seed_, stream_id_ + "/" + sub);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    // rejection sampling keeps the draw unbiased
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller; the second value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  std::vector<double> normal_vec(std::size_t n, double mean, double sd) {
    std::vector<double> v(n);
    for (auto& x : v) x = normal(mean, sd);
    return v;
  }

  std::vector<double> uniform_vec(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::string stream_id_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sentsim::core
