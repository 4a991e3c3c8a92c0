#include "sentsim/envs.hpp"

#include <cmath>

namespace sentsim::envs {

using core::RngStream;

const char* env_kind_name(EnvKind k) {
  switch (k) {
    case EnvKind::Noisy: return "noisy";
    case EnvKind::Illusion: return "illusion";
    case EnvKind::Hallucination: return "hallucination";
    case EnvKind::CrossModal: return "crossmodal";
  }
  return "noisy";
}

EnvKind env_kind_from_name(const std::string& s) {
  if (s == "noisy") return EnvKind::Noisy;
  if (s == "illusion") return EnvKind::Illusion;
  if (s == "hallucination") return EnvKind::Hallucination;
  if (s == "crossmodal") return EnvKind::CrossModal;
  raise(Err::InvalidSpec, "unknown env kind '" + s + "'");
}

void validate_spec(const EnvSpec& spec) {
  require(spec.horizon >= 1, Err::InvalidSpec, "horizon must be >= 1");
  require(spec.sigma >= 0.0 && std::isfinite(spec.sigma), Err::InvalidSpec,
          "sigma must be >= 0");
  require(spec.measure_sigma >= 0.0 && std::isfinite(spec.measure_sigma),
          Err::InvalidSpec, "measure_sigma must be >= 0");
  require(spec.rate >= 0.0 && spec.rate <= 1.0, Err::InvalidSpec,
          "rate must lie in [0,1]");
  require(!spec.latent.empty() && vecmath::all_finite(spec.latent),
          Err::InvalidSpec, "latent");
  if (spec.kind == EnvKind::Illusion)
    require(spec.latent.size() >= 2, Err::InvalidSpec,
            "illusion needs two lengths");
}

namespace {

SensorySignal signal(const std::string& channel, long long t, Vec values) {
  return SensorySignal{channel, t, std::move(values), Origin::Unknown};
}

Episode gen_noisy(const EnvSpec& spec) {
  Episode ep;
  ep.spec = spec;
  RngStream rng(spec.seed, "env/noisy");
  for (long long t = 0; t < spec.horizon; ++t) {
    Vec obs = spec.latent;
    for (double& x : obs) x += spec.sigma > 0.0 ? rng.normal(0.0, spec.sigma) : 0.0;
    ep.observations.push_back({signal("obs", t, obs)});
    ep.ground_truth.push_back({spec.latent, {{"obs", Origin::External}}});
  }
  return ep;
}

Episode gen_illusion(const EnvSpec& spec) {
  Episode ep;
  ep.spec = spec;
  RngStream rng(spec.seed, "env/illusion");
  const double l1 = spec.latent[0];
  const double l2 = spec.latent[1];
  for (long long t = 0; t < spec.horizon; ++t) {
    Vec percept{l1 + spec.bias, l2 - spec.bias};
    if (spec.sigma > 0.0)
      for (double& x : percept) x += rng.normal(0.0, spec.sigma);
    Vec measure{l1, l2};
    if (spec.measure_sigma > 0.0)
      for (double& x : measure) x += rng.normal(0.0, spec.measure_sigma);
    ep.observations.push_back(
        {signal("percept", t, percept), signal("measure", t, measure)});
    ep.ground_truth.push_back({{l1, l2},
                               {{"percept", Origin::External},
                                {"measure", Origin::External}}});
  }
  return ep;
}

Episode gen_hallucination(const EnvSpec& spec) {
  Episode ep;
  ep.spec = spec;
  RngStream rng(spec.seed, "env/hallucination");
  for (long long t = 0; t < spec.horizon; ++t) {
    const Vec latent{std::sin(0.1 * static_cast<double>(t)),
                     std::cos(0.1 * static_cast<double>(t))};
    const bool inject = rng.uniform() < spec.rate;
    Vec obs;
    Origin origin;
    if (inject) {
      obs = {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
      origin = Origin::InternallyGenerated;
    } else {
      obs = latent;
      if (spec.sigma > 0.0)
        for (double& x : obs) x += rng.normal(0.0, spec.sigma);
      origin = Origin::External;
    }
    ep.observations.push_back({signal("stream", t, obs)});
    ep.ground_truth.push_back({latent, {{"stream", origin}}});
  }
  return ep;
}

Vec apply_map(const std::vector<Vec>& m, const Vec& x) {
  Vec out(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) out[i] += m[i][j] * x[j];
  return out;
}

Episode gen_crossmodal(const EnvSpec& spec) {
  Episode ep;
  ep.spec = spec;
  RngStream rng(spec.seed, "env/crossmodal");
  for (long long t = 0; t < spec.horizon; ++t) {
    const Vec latent = rng.normal_vec(2, 0.0, 1.0);
    Vec a = apply_map(cross_modal_map_a(), latent);
    Vec b = apply_map(cross_modal_map_b(), latent);
    if (spec.sigma > 0.0) {
      for (double& x : a) x += rng.normal(0.0, spec.sigma);
      for (double& x : b) x += rng.normal(0.0, spec.sigma);
    }
    Origin origin_b = Origin::External;
    if (rng.uniform() < spec.rate) {
      // modality b reports something unrelated to the shared latent
      b = apply_map(cross_modal_map_b(), rng.normal_vec(2, 0.0, 1.0));
      if (spec.sigma > 0.0)
        for (double& x : b) x += rng.normal(0.0, spec.sigma);
      origin_b = Origin::InternallyGenerated;
    }
    ep.observations.push_back(
        {signal("mod_a", t, a), signal("mod_b", t, b)});
    ep.ground_truth.push_back({latent,
                               {{"mod_a", Origin::External},
                                {"mod_b", origin_b}}});
  }
  return ep;
}

}  // namespace

const std::vector<Vec>& cross_modal_map_a() {
  static const std::vector<Vec> m{{1.0, 0.4}, {-0.2, 0.9}};
  return m;
}

const std::vector<Vec>& cross_modal_map_b() {
  static const std::vector<Vec> m{{0.7, -0.5}, {0.3, 0.8}};
  return m;
}

Episode gen_episode(const EnvSpec& spec) {
  validate_spec(spec);
  switch (spec.kind) {
    case EnvKind::Noisy: return gen_noisy(spec);
    case EnvKind::Illusion: return gen_illusion(spec);
    case EnvKind::Hallucination: return gen_hallucination(spec);
    case EnvKind::CrossModal: return gen_crossmodal(spec);
  }
  raise(Err::InvalidSpec, "unhandled env kind");
}

std::vector<std::vector<SensorySignal>> replay(const Episode& episode,
                                               long long from, long long to) {
  const auto horizon = static_cast<long long>(episode.observations.size());
  require(from >= 0 && to >= from && to <= horizon, Err::RangeOutOfBounds,
          "[" + std::to_string(from) + "," + std::to_string(to) + ") of " +
              std::to_string(horizon));
  return {episode.observations.begin() + from, episode.observations.begin() + to};
}

}  // namespace sentsim::envs
