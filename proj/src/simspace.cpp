#include "sentsim/simspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace sentsim::simspace {

SimilaritySpace make_continuous(const std::string& space_id, int dim) {
  SimilaritySpace s;
  s.space_id = space_id;
  s.kind = SpaceKind::Continuous;
  s.metric = MetricKind::Euclidean;
  s.dim = dim;
  validate_space(s);
  return s;
}

SimilaritySpace make_graph(const std::string& space_id, int nodes,
                           const std::vector<GraphEdge>& edges) {
  SimilaritySpace s;
  s.space_id = space_id;
  s.kind = SpaceKind::Graph;
  s.metric = MetricKind::GraphShortestPath;
  s.nodes = nodes;
  s.edges = edges;
  validate_space(s);
  return s;
}

static std::vector<std::vector<std::pair<int, double>>> adjacency(
    const SimilaritySpace& space) {
  std::vector<std::vector<std::pair<int, double>>> adj(
      static_cast<std::size_t>(space.nodes));
  for (const auto& e : space.edges) {
    adj[static_cast<std::size_t>(e.a)].emplace_back(e.b, e.w);
    adj[static_cast<std::size_t>(e.b)].emplace_back(e.a, e.w);
  }
  return adj;
}

static Vec dijkstra(const SimilaritySpace& space, int source) {
  const auto adj = adjacency(space);
  Vec dist(static_cast<std::size_t>(space.nodes),
           std::numeric_limits<double>::infinity());
  dist[static_cast<std::size_t>(source)] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  pq.emplace(0.0, source);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    for (auto [v, w] : adj[static_cast<std::size_t>(u)]) {
      double nd = d + w;
      if (nd < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = nd;
        pq.emplace(nd, v);
      }
    }
  }
  return dist;
}

void validate_space(const SimilaritySpace& space) {
  if (space.kind == SpaceKind::Continuous) {
    require(space.metric == MetricKind::Euclidean, Err::InvalidSpec,
            "continuous space '" + space.space_id + "' needs Euclidean");
    require(space.dim > 0, Err::InvalidSpec,
            "space '" + space.space_id + "' dim must be positive");
    return;
  }
  require(space.metric == MetricKind::GraphShortestPath, Err::InvalidSpec,
          "graph space '" + space.space_id + "' needs shortest-path metric");
  require(space.nodes > 0, Err::InvalidSpec, "graph needs nodes");
  for (const auto& e : space.edges) {
    require(e.a >= 0 && e.a < space.nodes && e.b >= 0 && e.b < space.nodes,
            Err::InvalidSpec, "edge endpoint out of range");
    require(e.w > 0.0 && std::isfinite(e.w), Err::InvalidSpec,
            "edge weights must be positive");
  }
  const Vec d = dijkstra(space, 0);
  for (double x : d)
    require(std::isfinite(x), Err::DisconnectedGraph,
            "space '" + space.space_id + "'");
}

static int node_of(const SimilaritySpace& space, const Vec& p) {
  require(p.size() == 1, Err::PointNotInSpace,
          "graph point must be a single node index");
  double v = p[0];
  require(std::isfinite(v) && v == std::floor(v) && v >= 0.0 &&
              v < static_cast<double>(space.nodes),
          Err::PointNotInSpace, "node index " + std::to_string(v));
  return static_cast<int>(v);
}

double distance(const SimilaritySpace& space, const Vec& a, const Vec& b) {
  if (space.kind == SpaceKind::Continuous) {
    require(static_cast<int>(a.size()) == space.dim &&
                static_cast<int>(b.size()) == space.dim,
            Err::PointNotInSpace,
            "expected dim " + std::to_string(space.dim));
    require(vecmath::all_finite(a) && vecmath::all_finite(b),
            Err::PointNotInSpace, "non-finite point");
    return vecmath::l2_dist(a, b);
  }
  const int na = node_of(space, a);
  const int nb = node_of(space, b);
  const double d = dijkstra(space, na)[static_cast<std::size_t>(nb)];
  require(std::isfinite(d), Err::DisconnectedGraph, space.space_id);
  return d;
}

SimilarityProfile similarity_profile(
    const SimilaritySpace& space, const PerceptualRepresentation& subject,
    const std::vector<PerceptualRepresentation>& references) {
  require(!references.empty(), Err::EmptyReferenceSet,
          "profile for " + subject.rep_id);
  SimilarityProfile sp;
  sp.subject = subject.rep_id;
  for (const auto& ref : references) {
    sp.reference_ids.push_back(ref.rep_id);
    sp.distances.push_back(distance(space, subject.vector, ref.vector));
  }
  return sp;
}

MetricReport check_metric_axioms(
    const std::function<Vec(RngStream&)>& sample_point,
    const std::function<double(const Vec&, const Vec&)>& dist, int n_samples,
    RngStream& rng) {
  require(n_samples >= 3, Err::InvalidSpec, "need at least 3 samples");
  MetricReport rep;
  for (int i = 0; i < n_samples; ++i) {
    const Vec a = sample_point(rng);
    const Vec b = sample_point(rng);
    const Vec c = sample_point(rng);
    const double dab = dist(a, b);
    const double dba = dist(b, a);
    const double dac = dist(a, c);
    const double dbc = dist(b, c);
    rep.max_identity_violation =
        std::max(rep.max_identity_violation, std::abs(dist(a, a)));
    rep.max_symmetry_violation =
        std::max(rep.max_symmetry_violation, std::abs(dab - dba));
    rep.max_triangle_violation =
        std::max(rep.max_triangle_violation, dac - dab - dbc);
    ++rep.n_triples;
  }
  rep.max_triangle_violation = std::max(rep.max_triangle_violation, 0.0);
  return rep;
}

static MetricReport check_graph_all_triples(const SimilaritySpace& space) {
  const auto n = static_cast<std::size_t>(space.nodes);
  std::vector<Vec> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = dijkstra(space, static_cast<int>(i));
  MetricReport rep;
  for (std::size_t a = 0; a < n; ++a) {
    rep.max_identity_violation =
        std::max(rep.max_identity_violation, std::abs(d[a][a]));
    for (std::size_t b = 0; b < n; ++b) {
      rep.max_symmetry_violation =
          std::max(rep.max_symmetry_violation, std::abs(d[a][b] - d[b][a]));
      for (std::size_t c = 0; c < n; ++c) {
        rep.max_triangle_violation = std::max(rep.max_triangle_violation,
                                              d[a][c] - d[a][b] - d[b][c]);
        ++rep.n_triples;
      }
    }
  }
  rep.max_triangle_violation = std::max(rep.max_triangle_violation, 0.0);
  return rep;
}

MetricReport validate_metric(const SimilaritySpace& space, int n_samples,
                             RngStream& rng) {
  require(n_samples >= 3, Err::InvalidSpec, "need at least 3 samples");
  validate_space(space);
  if (space.kind == SpaceKind::Graph) return check_graph_all_triples(space);
  const int dim = space.dim;
  auto sample = [dim](RngStream& r) { return r.normal_vec(static_cast<std::size_t>(dim), 0.0, 1.0); };
  auto dist = [&space](const Vec& a, const Vec& b) {
    return distance(space, a, b);
  };
  return check_metric_axioms(sample, dist, n_samples, rng);
}

Rdm rdm(const SimilaritySpace& space,
        const std::vector<PerceptualRepresentation>& items) {
  Rdm r;
  const std::size_t n = items.size();
  r.matrix.assign(n, Vec(n, 0.0));
  for (const auto& it : items) r.item_ids.push_back(it.rep_id);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = distance(space, items[i].vector, items[j].vector);
      r.matrix[i][j] = d;
      r.matrix[j][i] = d;
    }
  return r;
}

static Vec upper_triangle(const Rdm& r) {
  Vec v;
  for (std::size_t i = 0; i < r.matrix.size(); ++i)
    for (std::size_t j = i + 1; j < r.matrix.size(); ++j)
      v.push_back(r.matrix[i][j]);
  return v;
}

double compare_rdm(const Rdm& r1, const Rdm& r2) {
  require(r1.item_ids.size() == r2.item_ids.size(), Err::SizeMismatch,
          std::to_string(r1.item_ids.size()) + " vs " +
              std::to_string(r2.item_ids.size()) + " items");
  const Vec u = upper_triangle(r1);
  const Vec v = upper_triangle(r2);
  const double mu = vecmath::mean(u);
  const double mv = vecmath::mean(v);
  double suv = 0.0, suu = 0.0, svv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    suv += (u[i] - mu) * (v[i] - mv);
    suu += (u[i] - mu) * (u[i] - mu);
    svv += (v[i] - mv) * (v[i] - mv);
  }
  require(suu > 0.0 && svv > 0.0, Err::ZeroVariance, "degenerate RDM");
  return suv / std::sqrt(suu * svv);
}

std::string rdm_to_csv(const Rdm& r) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < r.item_ids.size(); ++i)
    os << (i ? "," : "") << r.item_ids[i];
  os << "\n";
  for (const auto& row : r.matrix) {
    for (std::size_t j = 0; j < row.size(); ++j)
      os << (j ? "," : "") << row[j];
    os << "\n";
  }
  return os.str();
}

}  // namespace sentsim::simspace
