#include <doctest.h>

#include <cmath>

#include "sentsim/simspace.hpp"
#include "test_util.hpp"

using namespace sentsim;
using namespace sentsim::simspace;
using core::RngStream;
using perception::PerceptualRepresentation;
using testutil::err_of;

namespace {

PerceptualRepresentation rep(const std::string& id, const Vec& v) {
  PerceptualRepresentation r;
  r.rep_id = id;
  r.vector = v;
  return r;
}

// ring plus chords, deterministic weights
SimilaritySpace graph20() {
  std::vector<GraphEdge> edges;
  RngStream rng(17, "graph20");
  for (int i = 0; i < 20; ++i)
    edges.push_back({i, (i + 1) % 20, rng.uniform(0.5, 2.0)});
  for (int i = 0; i < 10; ++i)
    edges.push_back({i, i + 10, rng.uniform(0.5, 3.0)});
  return make_graph("g20", 20, edges);
}

}  // namespace

TEST_CASE("euclidean distance basics") {
  auto space = make_continuous("plane", 2);
  CHECK(distance(space, {0, 0}, {3, 4}) == doctest::Approx(5.0));
  CHECK(distance(space, {1.5, -2.0}, {1.5, -2.0}) == 0.0);
}

TEST_CASE("graph shortest path on a small path graph") {
  auto space = make_graph("path", 3, {{0, 1, 1.0}, {1, 2, 2.0}});
  CHECK(distance(space, {0}, {2}) == doctest::Approx(3.0));
  CHECK(distance(space, {1}, {1}) == 0.0);
  CHECK(distance(space, {2}, {0}) == doctest::Approx(3.0));
}

TEST_CASE("invalid points are rejected") {
  auto plane = make_continuous("plane", 2);
  CHECK(err_of([&] { distance(plane, {1.0}, {0.0, 0.0}); }) ==
        Err::PointNotInSpace);
  CHECK(err_of([&] { distance(plane, {std::nan(""), 0.0}, {0.0, 0.0}); }) ==
        Err::PointNotInSpace);

  auto path = make_graph("path", 3, {{0, 1, 1.0}, {1, 2, 2.0}});
  CHECK(err_of([&] { distance(path, {5.0}, {0.0}); }) == Err::PointNotInSpace);
  CHECK(err_of([&] { distance(path, {0.5}, {1.0}); }) == Err::PointNotInSpace);
}

TEST_CASE("graph validation") {
  CHECK(err_of([] { make_graph("d", 4, {{0, 1, 1.0}, {2, 3, 1.0}}); }) ==
        Err::DisconnectedGraph);
  CHECK(err_of([] { make_graph("w", 2, {{0, 1, 0.0}}); }) == Err::InvalidSpec);
  CHECK(err_of([] { make_graph("r", 2, {{0, 5, 1.0}}); }) == Err::InvalidSpec);
  // a continuous space must pair with the Euclidean metric
  SimilaritySpace s;
  s.space_id = "bad";
  s.kind = SpaceKind::Continuous;
  s.metric = MetricKind::GraphShortestPath;
  s.dim = 2;
  CHECK(err_of([&] { validate_space(s); }) == Err::InvalidSpec);
}

TEST_CASE("similarity profile distances") {
  auto space = make_continuous("plane", 2);
  auto subject = rep("s", {0, 0});
  auto profile = similarity_profile(
      space, subject, {rep("a", {0, 0}), rep("b", {1, 0})});
  CHECK(profile.subject == "s");
  CHECK(profile.reference_ids == std::vector<std::string>{"a", "b"});
  CHECK(profile.distances == Vec{0.0, 1.0});
}

TEST_CASE("profile entry for a matching reference is the minimum") {
  auto space = make_continuous("plane", 2);
  auto subject = rep("s", {2, 3});
  auto profile = similarity_profile(
      space, subject,
      {rep("a", {5, 5}), rep("b", {2, 3}), rep("c", {-1, 0})});
  CHECK(profile.distances[1] == 0.0);
  for (double d : profile.distances) CHECK(profile.distances[1] <= d);
}

TEST_CASE("color fixture orders pink before blue relative to red") {
  // rgb-ish vectors: pink sits near red, blue far away
  auto space = make_continuous("rgb", 3);
  auto red = rep("red", {1.0, 0.0, 0.0});
  auto profile = similarity_profile(
      space, red,
      {rep("pink", {1.0, 0.6, 0.7}), rep("blue", {0.0, 0.0, 1.0})});
  CHECK(profile.distances[0] < profile.distances[1]);
}

TEST_CASE("empty reference set is rejected") {
  auto space = make_continuous("plane", 2);
  CHECK(err_of([&] { similarity_profile(space, rep("s", {0, 0}), {}); }) ==
        Err::EmptyReferenceSet);
}

TEST_CASE("profile entries equal pairwise distance exactly") {
  auto space = make_continuous("r4", 4);
  RngStream rng(23, "profile-prop");
  for (int trial = 0; trial < 50; ++trial) {
    auto subject = rep("s", rng.normal_vec(4, 0.0, 2.0));
    std::vector<PerceptualRepresentation> refs;
    for (int i = 0; i < 5; ++i)
      refs.push_back(rep("r" + std::to_string(i), rng.normal_vec(4, 0.0, 2.0)));
    auto profile = similarity_profile(space, subject, refs);
    for (std::size_t i = 0; i < refs.size(); ++i)
      CHECK(profile.distances[i] ==
            distance(space, subject.vector, refs[i].vector));
  }
}

TEST_CASE("euclidean metric axioms hold on sampled triples") {
  auto space = make_continuous("r4", 4);
  RngStream rng(31, "metric");
  auto report = validate_metric(space, 1000, rng);
  CHECK(report.n_triples == 1000);
  CHECK(report.clean(1e-9));
}

TEST_CASE("graph metric axioms hold on all triples of a 20-node graph") {
  auto space = graph20();
  RngStream rng(31, "metric");
  auto report = validate_metric(space, 3, rng);
  CHECK(report.n_triples == 8000);
  CHECK(report.clean(1e-9));
}

TEST_CASE("validate_metric needs at least 3 samples") {
  auto space = make_continuous("plane", 2);
  RngStream rng(1, "m");
  CHECK(err_of([&] { validate_metric(space, 2, rng); }) == Err::InvalidSpec);
}

TEST_CASE("signed difference fixture violates symmetry") {
  // the literal unnormed difference is not a metric; keep it as a fixture
  RngStream rng(41, "signed");
  auto sample = [](RngStream& r) { return Vec{r.normal(0.0, 1.0)}; };
  auto signed_diff = [](const Vec& a, const Vec& b) { return a[0] - b[0]; };
  auto report = check_metric_axioms(sample, signed_diff, 200, rng);
  CHECK(report.max_symmetry_violation > 0.1);
  CHECK(report.max_identity_violation == 0.0);
}

TEST_CASE("rdm structure and self comparison") {
  auto space = make_continuous("plane", 2);
  std::vector<PerceptualRepresentation> items{
      rep("a", {0, 0}), rep("b", {1, 0}), rep("c", {0, 2}),
      rep("d", {-1, 1})};
  auto r = rdm(space, items);
  REQUIRE(r.matrix.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(r.matrix[i][i] == 0.0);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(r.matrix[i][j] == r.matrix[j][i]);
      CHECK(r.matrix[i][j] >= 0.0);
    }
  }
  CHECK(compare_rdm(r, r) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rdm comparison is scale invariant and symmetric") {
  auto space = make_continuous("r3", 3);
  RngStream rng(51, "rdm");
  std::vector<PerceptualRepresentation> items1, items2;
  for (int i = 0; i < 6; ++i) {
    items1.push_back(rep("x" + std::to_string(i), rng.normal_vec(3, 0.0, 1.0)));
    items2.push_back(rep("y" + std::to_string(i), rng.normal_vec(3, 0.0, 1.0)));
  }
  auto r1 = rdm(space, items1);
  auto r2 = rdm(space, items2);

  auto scaled = r1;
  for (auto& row : scaled.matrix)
    for (double& v : row) v *= 2.0;
  CHECK(compare_rdm(r1, scaled) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(compare_rdm(r1, r2) == doctest::Approx(compare_rdm(r2, r1)));
}

TEST_CASE("rdm comparison error cases") {
  auto space = make_continuous("plane", 2);
  std::vector<PerceptualRepresentation> three{
      rep("a", {0, 0}), rep("b", {1, 0}), rep("c", {0, 1})};
  std::vector<PerceptualRepresentation> four = three;
  four.push_back(rep("d", {2, 2}));
  auto r3 = rdm(space, three);
  auto r4 = rdm(space, four);
  CHECK(err_of([&] { compare_rdm(r3, r4); }) == Err::SizeMismatch);

  // all off-diagonal entries equal -> no variance in the upper triangle
  Rdm re;
  re.item_ids = {"a", "b", "c"};
  re.matrix = {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
  CHECK(err_of([&] { compare_rdm(re, r3); }) == Err::ZeroVariance);
}

TEST_CASE("independent random rdms stay weakly correlated") {
  // pinned fixture: these 100 seed pairs were screened once; the bound is
  // a property of the fixture, not of arbitrary seeds
  auto space = make_continuous("r8", 8);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    RngStream ra(2040, "rdm-a/" + std::to_string(k));
    RngStream rb(2040, "rdm-b/" + std::to_string(k));
    std::vector<PerceptualRepresentation> ia, ib;
    for (int i = 0; i < 10; ++i) {
      ia.push_back(rep("a" + std::to_string(i), ra.normal_vec(8, 0.0, 1.0)));
      ib.push_back(rep("b" + std::to_string(i), rb.normal_vec(8, 0.0, 1.0)));
    }
    worst = std::max(worst, std::abs(compare_rdm(rdm(space, ia), rdm(space, ib))));
  }
  MESSAGE("max |corr| over 100 pinned pairs: ", worst);
  CHECK(worst < 0.5);
}

TEST_CASE("rdm csv layout") {
  auto space = make_continuous("plane", 2);
  auto r = rdm(space, {rep("a", {0, 0}), rep("b", {3, 4})});
  CHECK(rdm_to_csv(r) == "a,b\n0,5\n5,0\n");
}
