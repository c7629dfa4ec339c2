#include "necmatch/assignment.hpp"

#include "hungarian.hpp"
#include "necmatch/errors.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <string>

namespace necmatch {

using boost::multiprecision::cpp_int;

template <class Tag>
BipartiteGraph<Tag>::BipartiteGraph(std::size_t n, std::vector<AgentId> left, std::vector<ObjectId> right)
    : n_(n), left_(std::move(left)), right_(std::move(right)), in_left_(n, 0), in_right_(n, 0), adjacency_(n) {
  for (AgentId a : left_) {
    if (index(a) >= n_ || in_left_[index(a)]) throw InvalidInput("bad or repeated left vertex");
    in_left_[index(a)] = 1;
  }
  for (ObjectId o : right_) {
    if (index(o) >= n_ || in_right_[index(o)]) throw InvalidInput("bad or repeated right vertex");
    in_right_[index(o)] = 1;
  }
}

template <class Tag>
BipartiteGraph<Tag>::BipartiteGraph(std::size_t n) : BipartiteGraph(n, {}, {}) {
  for (std::size_t i = 0; i < n; ++i) {
    left_.push_back(agent(i));
    right_.push_back(object(i));
    in_left_[i] = 1;
    in_right_[i] = 1;
  }
}

template <class Tag>
void BipartiteGraph<Tag>::add_edge(AgentId a, ObjectId o, std::int64_t value) {
  if (index(a) >= n_ || !in_left_[index(a)]) throw InvalidInput("edge agent not in left side");
  if (index(o) >= n_ || !in_right_[index(o)]) throw InvalidInput("edge object not in right side");
  if constexpr (std::is_same_v<Tag, LabelTag>) {
    if (value < 1 || static_cast<std::size_t>(value) > n_) {
      throw InvalidInput("label " + std::to_string(value) + " outside [1, " + std::to_string(n_) + "]");
    }
  } else {
    if (value < 0) throw InvalidInput("negative edge weight");
  }
  if (this->value(a, o) >= 0) throw InvalidInput("duplicate edge");
  adjacency_[index(a)].push_back(edges_.size());
  edges_.push_back({a, o, value});
}

template <class Tag>
std::int64_t BipartiteGraph<Tag>::value(AgentId a, ObjectId o) const {
  for (std::size_t e : adjacency_.at(index(a))) {
    if (edges_[e].object == o) return edges_[e].value;
  }
  return -1;
}

template class BipartiteGraph<LabelTag>;
template class BipartiteGraph<WeightTag>;

// ---------------------------------------------------------------------------
// Hopcroft-Karp

template <class Tag>
Matching max_cardinality_matching(const BipartiteGraph<Tag>& g) {
  const std::size_t n = g.universe();
  constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> match_agent(n, kFree);  // agent -> object
  std::vector<std::size_t> match_object(n, kFree); // object -> agent
  std::vector<std::size_t> dist(n, kInf);
  const auto left = g.left();

  auto bfs = [&]() {
    std::queue<std::size_t> q;
    for (AgentId a : left) {
      if (match_agent[index(a)] == kFree) {
        dist[index(a)] = 0;
        q.push(index(a));
      } else {
        dist[index(a)] = kInf;
      }
    }
    bool found = false;
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (std::size_t e : g.out_edges(agent(u))) {
        const std::size_t o = index(g.edges()[e].object);
        const std::size_t w = match_object[o];
        if (w == kFree) {
          found = true;
        } else if (dist[w] == kInf) {
          dist[w] = dist[u] + 1;
          q.push(w);
        }
      }
    }
    return found;
  };

  // Iterative DFS along the layered graph.
  std::vector<std::size_t> cursor(n, 0);
  auto augment = [&](std::size_t root) {
    std::vector<std::size_t> path{root};
    while (!path.empty()) {
      const std::size_t u = path.back();
      const auto out = g.out_edges(agent(u));
      bool advanced = false;
      while (cursor[u] < out.size()) {
        const std::size_t o = index(g.edges()[out[cursor[u]]].object);
        const std::size_t w = match_object[o];
        if (w == kFree) {
          // Flip the alternating path ending at o.
          std::size_t obj = o;
          for (std::size_t k = path.size(); k-- > 0;) {
            const std::size_t a = path[k];
            const std::size_t prev = match_agent[a];
            match_agent[a] = obj;
            match_object[obj] = a;
            obj = prev;
          }
          return true;
        }
        if (dist[w] == dist[u] + 1) {
          path.push_back(w);
          advanced = true;
          break;
        }
        ++cursor[u];
      }
      if (!advanced) {
        dist[u] = kInf;
        path.pop_back();
        if (!path.empty()) ++cursor[path.back()];
      }
    }
    return false;
  };

  while (bfs()) {
    std::fill(cursor.begin(), cursor.end(), 0);
    for (AgentId a : left) {
      if (match_agent[index(a)] == kFree) augment(index(a));
    }
  }

  Matching m(n);
  for (AgentId a : left) {
    if (match_agent[index(a)] != kFree) m.add(a, object(match_agent[index(a)]));
  }
  return m;
}

template Matching max_cardinality_matching(const LabeledBipartiteGraph&);
template Matching max_cardinality_matching(const WeightedBipartiteGraph&);

// ---------------------------------------------------------------------------
// Assignment reductions

namespace {

/// Runs the Hungarian method on the padded square matrix whose real cells
/// come from `edge_cost`; absent edges cost zero and are dropped afterwards.
template <class Cost, class Graph, class EdgeCost>
Matching solve_padded(const Graph& g, EdgeCost edge_cost) {
  const auto left = g.left();
  const auto right = g.right();
  const std::size_t size = std::max(left.size(), right.size());
  std::vector<std::size_t> col_of_object(g.universe(), 0);
  for (std::size_t c = 0; c < right.size(); ++c) col_of_object[index(right[c])] = c;

  std::vector<std::vector<Cost>> cost(size, std::vector<Cost>(size, Cost(0)));
  std::vector<std::vector<char>> real(size, std::vector<char>(size, 0));
  for (std::size_t r = 0; r < left.size(); ++r) {
    for (std::size_t e : g.out_edges(left[r])) {
      const auto& edge = g.edges()[e];
      const std::size_t c = col_of_object[index(edge.object)];
      cost[r][c] = edge_cost(edge.value);
      real[r][c] = 1;
    }
  }
  const auto assignment = detail::hungarian_min_cost(cost);
  Matching m(g.universe());
  for (std::size_t r = 0; r < left.size(); ++r) {
    const std::size_t c = assignment[r];
    if (c < right.size() && real[r][c]) m.add(left[r], right[c]);
  }
  return m;
}

cpp_int power(std::size_t base, std::size_t exponent) {
  cpp_int result = 1;
  for (std::size_t i = 0; i < exponent; ++i) result *= base;
  return result;
}

} // namespace

Matching min_weight_max_cardinality(const WeightedBipartiteGraph& g) {
  const std::int64_t n = static_cast<std::int64_t>(g.universe());
  std::int64_t max_weight = 0;
  for (const auto& e : g.edges()) max_weight = std::max(max_weight, e.value);
  const std::int64_t matched = static_cast<std::int64_t>(std::min(g.left().size(), g.right().size()));
  // Any extra matched edge must outweigh every possible weight saving.
  const std::int64_t bonus = std::max(n * (n + 1), max_weight * matched + 1);
  return solve_padded<std::int64_t>(g, [bonus](std::int64_t w) { return w - bonus; });
}

std::int64_t matching_weight(const WeightedBipartiteGraph& g, const Matching& m) {
  std::int64_t total = 0;
  for (const Pair& p : m.pairs()) {
    const std::int64_t w = g.value(p.agent, p.object);
    if (w < 0) throw InvalidInput("matching uses a pair that is not an edge");
    total += w;
  }
  return total;
}

Signature label_signature(const LabeledBipartiteGraph& g, const Matching& m) {
  Signature sig(g.universe());
  for (const Pair& p : m.pairs()) {
    const std::int64_t label = g.value(p.agent, p.object);
    if (label < 0) throw InvalidInput("matching uses a pair that is not an edge");
    sig.bump(static_cast<std::size_t>(label));
  }
  return sig;
}

cpp_int signature_weight(const Signature& s) {
  const std::size_t n = s.size();
  cpp_int total = 0;
  for (std::size_t l = 1; l <= n; ++l) total += cpp_int(s[l]) * power(n + 1, n - l);
  return total;
}

namespace {

RankMaximalResult solve_rank_maximal(const LabeledBipartiteGraph& g, bool cardinality_first) {
  const std::size_t n = g.universe();
  // Label l weighs (n+1)^(n-l). A matching has at most n edges, so each
  // base-(n+1) digit of the total stays below n+1 and the total weight order
  // coincides with the signature order. The optional (n+1)^n per edge exceeds
  // any signature total, so cardinality is compared first.
  const cpp_int bonus = cardinality_first ? power(n + 1, n) : cpp_int(0);
  std::vector<cpp_int> weights(n + 1, 0);
  for (std::size_t l = 1; l <= n; ++l) weights[l] = power(n + 1, n - l) + bonus;
  Matching m;
  if (power(n + 1, n + 2) < cpp_int(std::numeric_limits<std::int64_t>::max() / 4)) {
    std::vector<std::int64_t> small(n + 1, 0);
    for (std::size_t l = 1; l <= n; ++l) small[l] = weights[l].convert_to<std::int64_t>();
    m = solve_padded<std::int64_t>(g, [&](std::int64_t label) { return -small[static_cast<std::size_t>(label)]; });
  } else {
    m = solve_padded<cpp_int>(g, [&](std::int64_t label) { return cpp_int(-weights[static_cast<std::size_t>(label)]); });
  }
  Signature sig = label_signature(g, m);
  return {std::move(m), std::move(sig)};
}

} // namespace

RankMaximalResult rank_maximal_matching(const LabeledBipartiteGraph& g) { return solve_rank_maximal(g, false); }

RankMaximalResult max_cardinality_rank_maximal_matching(const LabeledBipartiteGraph& g) {
  return solve_rank_maximal(g, true);
}

RankMaximalResult brute_force_rank_maximal(const LabeledBipartiteGraph& g) {
  const auto left = g.left();
  if (left.size() > 8) throw Refused("brute_force_rank_maximal supports at most 8 left vertices");
  const std::size_t n = g.universe();
  Matching current(n);
  std::vector<std::uint32_t> counts(n, 0);
  RankMaximalResult best{current, Signature(n)};

  auto recurse = [&](auto&& self, std::size_t k) -> void {
    if (k == left.size()) {
      Signature sig(counts);
      if (sig > best.signature) best = {current, std::move(sig)};
      return;
    }
    const AgentId a = left[k];
    for (std::size_t e : g.out_edges(a)) {
      const auto& edge = g.edges()[e];
      if (current.agent_of(edge.object)) continue;
      current.add(a, edge.object);
      ++counts[static_cast<std::size_t>(edge.value) - 1];
      self(self, k + 1);
      --counts[static_cast<std::size_t>(edge.value) - 1];
      current.remove(a);
    }
    self(self, k + 1);
  };
  if (n > 0) recurse(recurse, 0);
  return best;
}

} // namespace necmatch
