#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sentsim/perception.hpp"

namespace sentsim::simspace {

using core::RngStream;
using perception::PerceptualRepresentation;

enum class SpaceKind { Continuous, Graph };
enum class MetricKind { Euclidean, GraphShortestPath };

struct GraphEdge {
  int a = 0;
  int b = 0;
  double w = 1.0;
};

// A representation space with a well-defined metric. Continuous spaces hold
// dim-vectors under the Euclidean metric; graph spaces hold node indices
// (a point is a 1-vector carrying the integer index) under weighted
// shortest-path distance.
struct SimilaritySpace {
  std::string space_id;
  SpaceKind kind = SpaceKind::Continuous;
  MetricKind metric = MetricKind::Euclidean;
  int dim = 0;                   // Continuous
  int nodes = 0;                 // Graph
  std::vector<GraphEdge> edges;  // Graph
};

SimilaritySpace make_continuous(const std::string& space_id, int dim);
SimilaritySpace make_graph(const std::string& space_id, int nodes,
                           const std::vector<GraphEdge>& edges);

// Continuous requires Euclidean; Graph requires GraphShortestPath, positive
// edge weights, and a connected graph.
void validate_space(const SimilaritySpace& space);

double distance(const SimilaritySpace& space, const Vec& a, const Vec& b);

struct SimilarityProfile {
  std::string subject;                     // rep_id
  std::vector<std::string> reference_ids;  // rep_ids
  Vec distances;
};

SimilarityProfile similarity_profile(
    const SimilaritySpace& space, const PerceptualRepresentation& subject,
    const std::vector<PerceptualRepresentation>& references);

struct MetricReport {
  std::size_t n_triples = 0;
  double max_identity_violation = 0.0;  // |d(a,a)|
  double max_symmetry_violation = 0.0;  // |d(a,b) - d(b,a)|
  double max_triangle_violation = 0.0;  // d(a,c) - d(a,b) - d(b,c), clamped at 0
  bool clean(double tol = 1e-9) const {
    return max_identity_violation <= tol && max_symmetry_violation <= tol &&
           max_triangle_violation <= tol;
  }
};

// Generic axiom checker over an arbitrary distance function; used both by
// validate_metric and by negative fixtures (e.g. a signed difference).
MetricReport check_metric_axioms(
    const std::function<Vec(RngStream&)>& sample_point,
    const std::function<double(const Vec&, const Vec&)>& dist, int n_samples,
    RngStream& rng);

// Continuous spaces: n_samples random triples. Graph spaces: all node
// triples, exhaustively.
MetricReport validate_metric(const SimilaritySpace& space, int n_samples,
                             RngStream& rng);

struct Rdm {
  std::vector<std::string> item_ids;
  std::vector<Vec> matrix;  // square, symmetric, zero diagonal
};

Rdm rdm(const SimilaritySpace& space,
        const std::vector<PerceptualRepresentation>& items);

// Pearson correlation of the upper-triangle entries.
double compare_rdm(const Rdm& r1, const Rdm& r2);

// Header row of item ids, then one row per item.
std::string rdm_to_csv(const Rdm& r);

}  // namespace sentsim::simspace
