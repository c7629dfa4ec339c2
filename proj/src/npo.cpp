#include "necmatch/npo.hpp"

#include "necmatch/errors.hpp"

#include <algorithm>
#include <cstdint>

namespace necmatch {

std::size_t ImprovementDigraph::edge_count() const noexcept {
  std::size_t total = 0;
  for (const auto& s : successors) total += s.size();
  return total;
}

bool ImprovementDigraph::has_edge(AgentId from, AgentId to) const {
  const auto& s = successors.at(index(from));
  return std::find(s.begin(), s.end(), to) != s.end();
}

bool ImprovementDigraph::has_cycle() const {
  // Iterative three-colour DFS; an edge into a grey node closes a cycle.
  const std::size_t n = successors.size();
  enum : std::uint8_t { kWhite, kGrey, kBlack };
  std::vector<std::uint8_t> colour(n, kWhite);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t root = 0; root < n; ++root) {
    if (colour[root] != kWhite) continue;
    colour[root] = kGrey;
    stack.emplace_back(root, 0);
    while (!stack.empty()) {
      const std::size_t u = stack.back().first;
      std::size_t& next = stack.back().second;
      if (next == successors[u].size()) {
        colour[u] = kBlack;
        stack.pop_back();
        continue;
      }
      const std::size_t v = index(successors[u][next++]);
      if (colour[v] == kGrey) return true;
      if (colour[v] == kWhite) {
        colour[v] = kGrey;
        stack.emplace_back(v, 0);
      }
    }
  }
  return false;
}

ImprovementDigraph build_improvement_digraph(const TopKProfile& p, const Matching& m) {
  const std::size_t n = p.size();
  require_full(m, n);
  ImprovementDigraph g;
  g.successors.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const AgentId a = agent(i);
    const ObjectId own = *m.object_of(a);
    const std::size_t own_rank = p.rank(a, own);
    if (own_rank != 0) {
      // Only objects revealed strictly above her own match can beat it.
      for (std::size_t pos = 0; pos + 1 < own_rank; ++pos) {
        g.successors[i].push_back(*m.agent_of(p.prefix(a)[pos]));
      }
      std::sort(g.successors[i].begin(), g.successors[i].end());
    } else {
      // Her match can sit last in some completion.
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) g.successors[i].push_back(agent(j));
      }
    }
  }
  return g;
}

bool check_npo(const TopKProfile& p, const Matching& m) { return !build_improvement_digraph(p, m).has_cycle(); }

WeightedBipartiteGraph revealed_weighted_graph(const TopKProfile& p) {
  WeightedBipartiteGraph g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto prefix = p.prefix(agent(i));
    for (std::size_t pos = 0; pos < prefix.size(); ++pos) {
      g.add_edge(agent(i), prefix[pos], static_cast<std::int64_t>(pos + 1));
    }
  }
  return g;
}

LabeledBipartiteGraph revealed_labeled_graph(const TopKProfile& p) {
  LabeledBipartiteGraph g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto prefix = p.prefix(agent(i));
    for (std::size_t pos = 0; pos < prefix.size(); ++pos) {
      g.add_edge(agent(i), prefix[pos], static_cast<std::int64_t>(pos + 1));
    }
  }
  return g;
}

std::size_t max_revealed_matching_size(const TopKProfile& p) {
  return max_cardinality_matching(revealed_weighted_graph(p)).size();
}

std::optional<Matching> exists_npo(const TopKProfile& p) {
  const std::size_t n = p.size();
  Matching m = min_weight_max_cardinality(revealed_weighted_graph(p));
  if (m.size() + 1 < n) return std::nullopt;
  if (m.size() + 1 == n) {
    // Exactly one agent and one object are left; pair them.
    std::optional<AgentId> free_agent;
    std::optional<ObjectId> free_object;
    for (std::size_t i = 0; i < n; ++i) {
      if (!m.object_of(agent(i))) free_agent = agent(i);
      if (!m.agent_of(object(i))) free_object = object(i);
    }
    if (!free_agent || !free_object) throw InternalError("size n-1 matching without a free pair");
    m.add(*free_agent, *free_object);
  }
  return m;
}

} // namespace necmatch
