#pragma once

// Necessary Pareto optimality under top-k preferences.

#include "necmatch/assignment.hpp"
#include "necmatch/core.hpp"

#include <optional>
#include <vector>

namespace necmatch {

/// Digraph on agents: i -> j when some completion of P_i ranks M(a_j) above M(a_i).
struct ImprovementDigraph {
  std::vector<std::vector<AgentId>> successors;

  std::size_t edge_count() const noexcept;
  bool has_edge(AgentId from, AgentId to) const;
  bool has_cycle() const;
};

ImprovementDigraph build_improvement_digraph(const TopKProfile& p, const Matching& m);

/// True iff M is Pareto optimal under every completion of P.
bool check_npo(const TopKProfile& p, const Matching& m);

/// Bipartite graph on rev(P); edge weight is the object's rank in the prefix.
WeightedBipartiteGraph revealed_weighted_graph(const TopKProfile& p);
LabeledBipartiteGraph revealed_labeled_graph(const TopKProfile& p);

/// Size of the largest matching that uses only revealed pairs.
std::size_t max_revealed_matching_size(const TopKProfile& p);

/// An NPO matching, or nullopt when none exists (largest revealed matching
/// has fewer than n-1 pairs).
std::optional<Matching> exists_npo(const TopKProfile& p);

} // namespace necmatch
