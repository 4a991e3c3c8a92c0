#include <doctest.h>

#include <cmath>

#include "sentsim/envs.hpp"
#include "test_util.hpp"

using namespace sentsim;
using namespace sentsim::envs;
using core::Origin;
using testutil::err_of;

TEST_CASE("noiseless noisy env emits the latent exactly") {
  EnvSpec spec;
  spec.kind = EnvKind::Noisy;
  spec.horizon = 5;
  spec.latent = {1.0, -2.5};
  auto ep = gen_episode(spec);
  REQUIRE(ep.observations.size() == 5);
  for (const auto& step : ep.observations) {
    REQUIRE(step.size() == 1);
    CHECK(step[0].channel_id == "obs");
    CHECK(step[0].values == Vec{1.0, -2.5});
    CHECK(step[0].origin == Origin::Unknown);
  }
  for (const auto& gt : ep.ground_truth)
    CHECK(gt.origins.at("obs") == Origin::External);
}

TEST_CASE("illusion env applies opposite constant biases") {
  EnvSpec spec;
  spec.kind = EnvKind::Illusion;
  spec.horizon = 10;
  spec.bias = 0.3;
  spec.latent = {1.0, 1.0};
  spec.measure_sigma = 0.0;
  auto ep = gen_episode(spec);
  for (long long t = 0; t < 10; ++t) {
    const auto& step = ep.observations[static_cast<std::size_t>(t)];
    REQUIRE(step.size() == 2);
    CHECK(step[0].channel_id == "percept");
    CHECK(step[0].values == Vec{1.3, 0.7});
    CHECK(step[1].channel_id == "measure");
    CHECK(step[1].values == Vec{1.0, 1.0});
    // true difference is zero at every step
    const auto& gt = ep.ground_truth[static_cast<std::size_t>(t)];
    CHECK(gt.latent[0] - gt.latent[1] == 0.0);
  }
}

TEST_CASE("illusion bias never decays over the horizon") {
  EnvSpec spec;
  spec.kind = EnvKind::Illusion;
  spec.horizon = 200;
  spec.bias = 0.3;
  spec.latent = {1.0, 1.0};
  auto ep = gen_episode(spec);
  for (const auto& step : ep.observations)
    CHECK(step[0].values[0] - step[0].values[1] ==
          doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("hallucination env injects at the configured rate") {
  EnvSpec spec;
  spec.kind = EnvKind::Hallucination;
  spec.horizon = 1000;
  spec.seed = 11;
  spec.rate = 0.2;
  spec.sigma = 0.05;
  auto ep = gen_episode(spec);
  int injected = 0;
  for (const auto& gt : ep.ground_truth)
    if (gt.origins.at("stream") == Origin::InternallyGenerated) ++injected;
  // binomial(1000, 0.2): 0.03 is about 2.4 standard deviations
  CHECK(std::abs(injected / 1000.0 - 0.2) < 0.03);
}

TEST_CASE("hallucination latent follows the unit circle") {
  EnvSpec spec;
  spec.kind = EnvKind::Hallucination;
  spec.horizon = 50;
  spec.rate = 0.0;
  spec.sigma = 0.0;
  auto ep = gen_episode(spec);
  for (std::size_t t = 0; t < 50; ++t) {
    CHECK(vecmath::l2_norm(ep.ground_truth[t].latent) ==
          doctest::Approx(1.0));
    CHECK(ep.observations[t][0].values == ep.ground_truth[t].latent);
  }
}

TEST_CASE("crossmodal env mixes one latent into two channels") {
  EnvSpec spec;
  spec.kind = EnvKind::CrossModal;
  spec.horizon = 100;
  spec.seed = 7;
  spec.sigma = 0.0;
  spec.rate = 0.0;
  auto ep = gen_episode(spec);
  const auto& A = cross_modal_map_a();
  const auto& B = cross_modal_map_b();
  for (std::size_t t = 0; t < 100; ++t) {
    const Vec& z = ep.ground_truth[t].latent;
    const auto& a = ep.observations[t][0];
    const auto& b = ep.observations[t][1];
    CHECK(a.channel_id == "mod_a");
    CHECK(b.channel_id == "mod_b");
    for (int i = 0; i < 2; ++i) {
      CHECK(a.values[static_cast<std::size_t>(i)] ==
            doctest::Approx(A[static_cast<std::size_t>(i)][0] * z[0] +
                            A[static_cast<std::size_t>(i)][1] * z[1]));
      CHECK(b.values[static_cast<std::size_t>(i)] ==
            doctest::Approx(B[static_cast<std::size_t>(i)][0] * z[0] +
                            B[static_cast<std::size_t>(i)][1] * z[1]));
    }
  }
}

TEST_CASE("crossmodal corruption labels modality b internal") {
  EnvSpec spec;
  spec.kind = EnvKind::CrossModal;
  spec.horizon = 1000;
  spec.seed = 7;
  spec.sigma = 0.05;
  spec.rate = 0.3;
  auto ep = gen_episode(spec);
  int internal = 0;
  for (const auto& gt : ep.ground_truth) {
    CHECK(gt.origins.at("mod_a") == Origin::External);
    if (gt.origins.at("mod_b") == Origin::InternallyGenerated) ++internal;
  }
  CHECK(internal > 230);
  CHECK(internal < 370);
}

TEST_CASE("identical specs generate bit-identical episodes") {
  EnvSpec spec;
  spec.kind = EnvKind::Hallucination;
  spec.horizon = 300;
  spec.seed = 42;
  spec.rate = 0.15;
  spec.sigma = 0.05;
  auto a = gen_episode(spec);
  auto b = gen_episode(spec);
  REQUIRE(a.observations.size() == b.observations.size());
  for (std::size_t t = 0; t < a.observations.size(); ++t) {
    CHECK(a.observations[t][0].values == b.observations[t][0].values);
    CHECK(a.ground_truth[t].origins == b.ground_truth[t].origins);
  }
}

TEST_CASE("replay re-emits the requested range deterministically") {
  EnvSpec spec;
  spec.kind = EnvKind::Noisy;
  spec.horizon = 10;
  spec.seed = 3;
  spec.sigma = 0.5;
  auto ep = gen_episode(spec);

  auto full = replay(ep, 0, 10);
  REQUIRE(full.size() == 10);
  for (std::size_t t = 0; t < 10; ++t)
    CHECK(full[t][0].values == ep.observations[t][0].values);

  CHECK(replay(ep, 4, 4).empty());

  auto once = replay(ep, 2, 7);
  auto twice = replay(ep, 2, 7);
  REQUIRE(once.size() == 5);
  for (std::size_t t = 0; t < 5; ++t)
    CHECK(once[t][0].values == twice[t][0].values);

  CHECK(err_of([&] { replay(ep, 5, 11); }) == Err::RangeOutOfBounds);
  CHECK(err_of([&] { replay(ep, -1, 3); }) == Err::RangeOutOfBounds);
}

TEST_CASE("spec validation rejects bad parameters") {
  EnvSpec spec;
  spec.horizon = 0;
  CHECK(err_of([&] { gen_episode(spec); }) == Err::InvalidSpec);
  spec.horizon = 1;
  spec.sigma = -0.1;
  CHECK(err_of([&] { gen_episode(spec); }) == Err::InvalidSpec);
  spec.sigma = 0.0;
  spec.rate = 1.5;
  CHECK(err_of([&] { gen_episode(spec); }) == Err::InvalidSpec);
  spec.rate = 0.0;
  spec.kind = EnvKind::Illusion;
  spec.latent = {1.0};  // needs two lengths
  CHECK(err_of([&] { gen_episode(spec); }) == Err::InvalidSpec);
  CHECK(err_of([] { env_kind_from_name("quantum"); }) == Err::InvalidSpec);
}
