#pragma once

// Exact bipartite matching engines over agent/object graphs.

#include "necmatch/core.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace necmatch {

struct LabelTag {};
struct WeightTag {};

/// Bipartite graph between a subset of agents and a subset of objects of an
/// n-instance. Missing edges are forbidden pairs. Edge values are position
/// labels in [1, n] (LabelTag) or non-negative weights (WeightTag).
template <class Tag>
class BipartiteGraph {
public:
  struct Edge {
    AgentId agent;
    ObjectId object;
    std::int64_t value;
  };

  BipartiteGraph(std::size_t n, std::vector<AgentId> left, std::vector<ObjectId> right);
  /// Whole instance on both sides.
  explicit BipartiteGraph(std::size_t n);

  void add_edge(AgentId a, ObjectId o, std::int64_t value);

  std::size_t universe() const noexcept { return n_; }
  std::span<const AgentId> left() const noexcept { return left_; }
  std::span<const ObjectId> right() const noexcept { return right_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  /// Edge indices out of agent a, in insertion order.
  std::span<const std::size_t> out_edges(AgentId a) const { return adjacency_.at(index(a)); }
  /// Value of edge (a, o), or -1 when absent.
  std::int64_t value(AgentId a, ObjectId o) const;

private:
  std::size_t n_;
  std::vector<AgentId> left_;
  std::vector<ObjectId> right_;
  std::vector<char> in_left_;
  std::vector<char> in_right_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

using LabeledBipartiteGraph = BipartiteGraph<LabelTag>;
using WeightedBipartiteGraph = BipartiteGraph<WeightTag>;

extern template class BipartiteGraph<LabelTag>;
extern template class BipartiteGraph<WeightTag>;

/// Hopcroft-Karp.
template <class Tag>
Matching max_cardinality_matching(const BipartiteGraph<Tag>& g);

/// Among maximum-cardinality matchings, one of minimum total weight.
Matching min_weight_max_cardinality(const WeightedBipartiteGraph& g);

std::int64_t matching_weight(const WeightedBipartiteGraph& g, const Matching& m);

struct RankMaximalResult {
  Matching matching;
  Signature signature;
};

/// Matching whose label signature is lexicographically maximal.
RankMaximalResult rank_maximal_matching(const LabeledBipartiteGraph& g);

/// Signature-maximal among the maximum-cardinality matchings of g. Coincides
/// with rank_maximal_matching when every left vertex sees every right vertex.
RankMaximalResult max_cardinality_rank_maximal_matching(const LabeledBipartiteGraph& g);

/// Exhaustive oracle for rank_maximal_matching; refuses more than 8 left vertices.
RankMaximalResult brute_force_rank_maximal(const LabeledBipartiteGraph& g);

/// Label signature of a matching that uses only edges of g.
Signature label_signature(const LabeledBipartiteGraph& g, const Matching& m);

/// sum_l x_l (n+1)^(n-l): strictly monotone in the signature order when every
/// entry is at most n.
boost::multiprecision::cpp_int signature_weight(const Signature& s);

} // namespace necmatch
