#include "necmatch/core.hpp"

#include "necmatch/assignment.hpp"
#include "necmatch/errors.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace necmatch {

namespace {

void check_object(std::size_t n, ObjectId o) {
  if (index(o) >= n) {
    throw InvalidInput("object index " + std::to_string(index(o)) + " out of range for n=" + std::to_string(n));
  }
}

void check_agent(std::size_t n, AgentId a) {
  if (index(a) >= n) {
    throw InvalidInput("agent index " + std::to_string(index(a)) + " out of range for n=" + std::to_string(n));
  }
}

std::vector<std::uint32_t> build_rank_table(std::size_t n, const std::vector<std::vector<ObjectId>>& lists) {
  std::vector<std::uint32_t> rank(n * n, 0);
  for (std::size_t i = 0; i < lists.size(); ++i) {
    for (std::size_t pos = 0; pos < lists[i].size(); ++pos) {
      const ObjectId o = lists[i][pos];
      check_object(n, o);
      auto& slot = rank[i * n + index(o)];
      if (slot != 0) {
        throw InvalidInput("agent " + std::to_string(i) + " lists object " + std::to_string(index(o)) + " twice");
      }
      slot = static_cast<std::uint32_t>(pos + 1);
    }
  }
  return rank;
}

} // namespace

// ---------------------------------------------------------------------------
// TopKProfile

TopKProfile::TopKProfile(std::size_t n, std::vector<std::vector<ObjectId>> prefixes)
    : n_(n), prefixes_(std::move(prefixes)) {
  if (prefixes_.size() != n_) {
    throw InvalidInput("profile has " + std::to_string(prefixes_.size()) + " agents, expected " + std::to_string(n_));
  }
  rank_ = build_rank_table(n_, prefixes_);
}

TopKProfile TopKProfile::empty(std::size_t n) { return TopKProfile(n, std::vector<std::vector<ObjectId>>(n)); }

std::vector<std::size_t> TopKProfile::revealed_counts() const {
  std::vector<std::size_t> k(n_);
  for (std::size_t i = 0; i < n_; ++i) k[i] = prefixes_[i].size();
  return k;
}

std::size_t TopKProfile::total_revealed() const noexcept {
  std::size_t total = 0;
  for (const auto& p : prefixes_) total += p.size();
  return total;
}

void TopKProfile::reveal(AgentId a, ObjectId o) {
  check_agent(n_, a);
  check_object(n_, o);
  auto& slot = rank_[index(a) * n_ + index(o)];
  if (slot != 0) {
    throw InvalidInput("agent " + std::to_string(index(a)) + " already revealed object " + std::to_string(index(o)));
  }
  auto& prefix = prefixes_[index(a)];
  prefix.push_back(o);
  slot = static_cast<std::uint32_t>(prefix.size());
}

// ---------------------------------------------------------------------------
// FullProfile

FullProfile::FullProfile(std::size_t n, std::vector<std::vector<ObjectId>> rankings)
    : n_(n), rankings_(std::move(rankings)) {
  if (rankings_.size() != n_) {
    throw InvalidInput("profile has " + std::to_string(rankings_.size()) + " agents, expected " + std::to_string(n_));
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (rankings_[i].size() != n_) {
      throw InvalidInput("agent " + std::to_string(i) + " ranks " + std::to_string(rankings_[i].size()) +
                         " objects, a full ranking needs " + std::to_string(n_));
    }
  }
  rank_ = build_rank_table(n_, rankings_);
}

TopKProfile FullProfile::as_topk() const { return TopKProfile(n_, rankings_); }

TopKProfile FullProfile::truncated(std::span<const std::size_t> k) const {
  if (k.size() != n_) throw InvalidInput("k-vector length does not match n");
  std::vector<std::vector<ObjectId>> prefixes(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    if (k[i] > n_) throw InvalidInput("k_i exceeds n");
    prefixes[i].assign(rankings_[i].begin(), rankings_[i].begin() + static_cast<std::ptrdiff_t>(k[i]));
  }
  return TopKProfile(n_, std::move(prefixes));
}

// ---------------------------------------------------------------------------
// WeakOrderProfile

WeakOrderProfile::WeakOrderProfile(std::size_t n, std::vector<std::vector<std::vector<ObjectId>>> tiers)
    : n_(n), tiers_(std::move(tiers)), position_(n * n, 0) {
  if (tiers_.size() != n_) throw InvalidInput("weak-order profile agent count mismatch");
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t t = 0; t < tiers_[i].size(); ++t) {
      if (tiers_[i][t].empty()) throw InvalidInput("empty tier in weak order");
      for (ObjectId o : tiers_[i][t]) {
        check_object(n_, o);
        auto& slot = position_[i * n_ + index(o)];
        if (slot != 0) throw InvalidInput("object appears in two tiers");
        slot = static_cast<std::uint32_t>(t + 1);
      }
    }
  }
}

WeakOrderProfile WeakOrderProfile::relax(const TopKProfile& p) {
  const std::size_t n = p.size();
  std::vector<std::vector<std::vector<ObjectId>>> tiers(n);
  for (std::size_t i = 0; i < n; ++i) {
    const AgentId a = agent(i);
    for (ObjectId o : p.prefix(a)) tiers[i].push_back({o});
    std::vector<ObjectId> rest;
    for (std::size_t j = 0; j < n; ++j) {
      if (!p.revealed(a, object(j))) rest.push_back(object(j));
    }
    if (!rest.empty()) tiers[i].push_back(std::move(rest));
  }
  return WeakOrderProfile(n, std::move(tiers));
}

std::vector<Pair> revealed_pairs(const TopKProfile& p) {
  std::vector<Pair> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (ObjectId o : p.prefix(agent(i))) out.push_back({agent(i), o});
  }
  return out;
}

std::vector<Pair> unrevealed_pairs(const TopKProfile& p) {
  std::vector<Pair> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (!p.revealed(agent(i), object(j))) out.push_back({agent(i), object(j)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Matching

Matching::Matching(std::size_t n) : to_object_(n, kNone), to_agent_(n, kNone) {}

Matching::Matching(std::size_t n, std::span<const Pair> pairs) : Matching(n) {
  for (const Pair& p : pairs) add(p.agent, p.object);
}

Matching Matching::from_assignment(std::span<const ObjectId> objects) {
  Matching m(objects.size());
  for (std::size_t i = 0; i < objects.size(); ++i) m.add(agent(i), objects[i]);
  return m;
}

void Matching::add(AgentId a, ObjectId o) {
  check_agent(universe(), a);
  check_object(universe(), o);
  if (to_object_[index(a)] != kNone) throw InvalidInput("agent " + std::to_string(index(a)) + " matched twice");
  if (to_agent_[index(o)] != kNone) throw InvalidInput("object " + std::to_string(index(o)) + " matched twice");
  to_object_[index(a)] = static_cast<std::uint32_t>(index(o));
  to_agent_[index(o)] = static_cast<std::uint32_t>(index(a));
  ++size_;
}

void Matching::remove(AgentId a) {
  check_agent(universe(), a);
  const std::uint32_t o = to_object_[index(a)];
  if (o == kNone) return;
  to_agent_[o] = kNone;
  to_object_[index(a)] = kNone;
  --size_;
}

std::optional<ObjectId> Matching::object_of(AgentId a) const {
  const std::uint32_t o = to_object_.at(index(a));
  if (o == kNone) return std::nullopt;
  return object(o);
}

std::optional<AgentId> Matching::agent_of(ObjectId o) const {
  const std::uint32_t a = to_agent_.at(index(o));
  if (a == kNone) return std::nullopt;
  return agent(a);
}

std::vector<Pair> Matching::pairs() const {
  std::vector<Pair> out;
  out.reserve(size_);
  for (std::size_t i = 0; i < to_object_.size(); ++i) {
    if (to_object_[i] != kNone) out.push_back({agent(i), object(to_object_[i])});
  }
  return out;
}

void require_full(const Matching& m, std::size_t n) {
  if (m.universe() != n || !m.is_full()) {
    throw InvalidInput("expected a full matching of " + std::to_string(n) + " agents, got " +
                       std::to_string(m.size()) + " pairs over " + std::to_string(m.universe()));
  }
}

// ---------------------------------------------------------------------------
// Signature

std::uint32_t Signature::total() const noexcept { return std::accumulate(counts_.begin(), counts_.end(), 0u); }

void Signature::bump(std::size_t position) {
  if (position == 0 || position > counts_.size()) {
    throw InvalidInput("signature position " + std::to_string(position) + " out of range");
  }
  ++counts_[position - 1];
}

std::strong_ordering compare_signatures(const Signature& a, const Signature& b) {
  if (a.size() != b.size()) {
    throw InvalidInput("cannot compare signatures of lengths " + std::to_string(a.size()) + " and " +
                       std::to_string(b.size()));
  }
  const auto ca = a.counts();
  const auto cb = b.counts();
  return std::lexicographical_compare_three_way(ca.begin(), ca.end(), cb.begin(), cb.end());
}

std::strong_ordering operator<=>(const Signature& a, const Signature& b) { return compare_signatures(a, b); }

Signature signature_of(const Matching& m, const TopKProfile& p) {
  require_full(m, p.size());
  Signature sig(p.size());
  for (const Pair& pr : m.pairs()) {
    if (const std::size_t r = p.rank(pr.agent, pr.object); r != 0) sig.bump(r);
  }
  return sig;
}

Signature signature_of(const Matching& m, const FullProfile& r) {
  require_full(m, r.size());
  Signature sig(r.size());
  for (const Pair& pr : m.pairs()) sig.bump(r.rank(pr.agent, pr.object));
  return sig;
}

Signature extended_signature_of(const Matching& m, const TopKProfile& p) {
  require_full(m, p.size());
  Signature sig(p.size());
  for (const Pair& pr : m.pairs()) {
    const std::size_t r = p.rank(pr.agent, pr.object);
    sig.bump(r != 0 ? r : p.size());
  }
  return sig;
}

// ---------------------------------------------------------------------------
// Completions

Completions::iterator::iterator(const TopKProfile& p) : profile_(&p), done_(false) {
  const std::size_t n = p.size();
  suffixes_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!p.revealed(agent(i), object(j))) suffixes_[i].push_back(object(j));
    }
  }
  rebuild();
}

void Completions::iterator::rebuild() {
  const std::size_t n = profile_->size();
  std::vector<std::vector<ObjectId>> rankings(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto prefix = profile_->prefix(agent(i));
    rankings[i].assign(prefix.begin(), prefix.end());
    rankings[i].insert(rankings[i].end(), suffixes_[i].begin(), suffixes_[i].end());
  }
  current_ = FullProfile(n, std::move(rankings));
}

Completions::iterator& Completions::iterator::operator++() {
  // Odometer over per-agent suffix permutations; next_permutation wraps a
  // digit back to sorted order when it overflows.
  for (std::size_t i = suffixes_.size(); i-- > 0;) {
    if (std::next_permutation(suffixes_[i].begin(), suffixes_[i].end())) {
      rebuild();
      return *this;
    }
  }
  done_ = true;
  return *this;
}

std::uint64_t Completions::count() const noexcept {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < profile_->size(); ++i) {
    const std::size_t free = profile_->size() - profile_->revealed_count(agent(i));
    for (std::size_t f = 2; f <= free; ++f) {
      if (total > UINT64_MAX / f) return UINT64_MAX;
      total *= f;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Ground-truth efficiency on complete profiles

bool is_pareto_optimal(const FullProfile& r, const Matching& m) {
  const std::size_t n = r.size();
  require_full(m, n);
  // Recursive-free colouring DFS over the strict-improvement digraph.
  enum class Colour : std::uint8_t { white, grey, black };
  std::vector<Colour> colour(n, Colour::white);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t root = 0; root < n; ++root) {
    if (colour[root] != Colour::white) continue;
    stack.push_back({root, 0});
    colour[root] = Colour::grey;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      const std::size_t own = r.rank(agent(u), *m.object_of(agent(u)));
      bool descended = false;
      while (next < n) {
        const std::size_t v = next++;
        if (v == u || r.rank(agent(u), *m.object_of(agent(v))) >= own) continue;
        if (colour[v] == Colour::grey) return false;
        if (colour[v] == Colour::white) {
          colour[v] = Colour::grey;
          stack.push_back({v, 0});
          descended = true;
          break;
        }
      }
      if (!descended) {
        colour[stack.back().first] = Colour::black;
        stack.pop_back();
      }
    }
  }
  return true;
}

bool is_rank_maximal(const FullProfile& r, const Matching& m) {
  const std::size_t n = r.size();
  require_full(m, n);
  const Signature mine = signature_of(m, r);
  if (n <= 8) {
    std::vector<ObjectId> perm(n);
    for (std::size_t j = 0; j < n; ++j) perm[j] = object(j);
    do {
      Signature s(n);
      for (std::size_t i = 0; i < n; ++i) s.bump(r.rank(agent(i), perm[i]));
      if (s > mine) return false;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return true;
  }
  LabeledBipartiteGraph g(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) g.add_edge(agent(i), object(j), static_cast<std::int64_t>(r.rank(agent(i), object(j))));
  }
  return rank_maximal_matching(g).signature == mine;
}

} // namespace necmatch
