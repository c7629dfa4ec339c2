#pragma once

// Domain model: agents, objects, preference profiles, matchings and signatures.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <optional>
#include <span>
#include <vector>

namespace necmatch {

enum class AgentId : std::uint32_t {};
enum class ObjectId : std::uint32_t {};

constexpr std::size_t index(AgentId a) noexcept { return static_cast<std::size_t>(a); }
constexpr std::size_t index(ObjectId o) noexcept { return static_cast<std::size_t>(o); }
constexpr AgentId agent(std::size_t i) noexcept { return static_cast<AgentId>(i); }
constexpr ObjectId object(std::size_t i) noexcept { return static_cast<ObjectId>(i); }

struct Pair {
  AgentId agent;
  ObjectId object;

  friend auto operator<=>(const Pair&, const Pair&) = default;
};

/// Top-k preferences: every agent has revealed an ordered prefix (possibly
/// empty) of her ranking over the n objects.
class TopKProfile {
public:
  TopKProfile() = default;
  TopKProfile(std::size_t n, std::vector<std::vector<ObjectId>> prefixes);

  static TopKProfile empty(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  std::span<const ObjectId> prefix(AgentId a) const { return prefixes_.at(index(a)); }
  std::size_t revealed_count(AgentId a) const { return prefixes_.at(index(a)).size(); }
  std::vector<std::size_t> revealed_counts() const;
  std::size_t total_revealed() const noexcept;

  /// 1-based position of `o` in the agent's prefix, 0 when unrevealed.
  std::size_t rank(AgentId a, ObjectId o) const { return rank_[index(a) * n_ + index(o)]; }
  bool revealed(AgentId a, ObjectId o) const { return rank(a, o) != 0; }

  /// Appends `o` at position k_i + 1. Throws InvalidInput if already revealed.
  void reveal(AgentId a, ObjectId o);

  friend bool operator==(const TopKProfile& lhs, const TopKProfile& rhs) {
    return lhs.n_ == rhs.n_ && lhs.prefixes_ == rhs.prefixes_;
  }

private:
  std::size_t n_ = 0;
  std::vector<std::vector<ObjectId>> prefixes_;
  std::vector<std::uint32_t> rank_;
};

/// Complete strict rankings: every agent's list is a permutation of the objects.
class FullProfile {
public:
  FullProfile() = default;
  FullProfile(std::size_t n, std::vector<std::vector<ObjectId>> rankings);

  std::size_t size() const noexcept { return n_; }
  std::span<const ObjectId> ranking(AgentId a) const { return rankings_.at(index(a)); }
  /// 1-based position of `o` in the agent's ranking.
  std::size_t rank(AgentId a, ObjectId o) const { return rank_[index(a) * n_ + index(o)]; }
  /// Object at 1-based `position`.
  ObjectId at(AgentId a, std::size_t position) const { return rankings_.at(index(a)).at(position - 1); }

  TopKProfile as_topk() const;
  /// The top-k profile that results from asking agent i for her first k[i] objects.
  TopKProfile truncated(std::span<const std::size_t> k) const;

  friend bool operator==(const FullProfile& lhs, const FullProfile& rhs) {
    return lhs.n_ == rhs.n_ && lhs.rankings_ == rhs.rankings_;
  }

private:
  std::size_t n_ = 0;
  std::vector<std::vector<ObjectId>> rankings_;
  std::vector<std::uint32_t> rank_;
};

/// Weak orders with ties. Only used to express the relaxed profile in which
/// all unrevealed objects share the position right after the prefix.
class WeakOrderProfile {
public:
  WeakOrderProfile(std::size_t n, std::vector<std::vector<std::vector<ObjectId>>> tiers);

  /// Every revealed object keeps its position; all unrevealed objects of agent
  /// i are tied at position k_i + 1.
  static WeakOrderProfile relax(const TopKProfile& p);

  std::size_t size() const noexcept { return n_; }
  std::span<const std::vector<ObjectId>> tiers(AgentId a) const { return tiers_.at(index(a)); }
  /// 1-based tier index, 0 if the object is not ranked at all.
  std::size_t position(AgentId a, ObjectId o) const { return position_[index(a) * n_ + index(o)]; }

private:
  std::size_t n_ = 0;
  std::vector<std::vector<std::vector<ObjectId>>> tiers_;
  std::vector<std::uint32_t> position_;
};

std::vector<Pair> revealed_pairs(const TopKProfile& p);
std::vector<Pair> unrevealed_pairs(const TopKProfile& p);

/// Partial injection between agents and objects of a size-n instance.
class Matching {
public:
  Matching() = default;
  explicit Matching(std::size_t n);
  Matching(std::size_t n, std::span<const Pair> pairs);

  /// Agent i gets objects[i].
  static Matching from_assignment(std::span<const ObjectId> objects);

  void add(AgentId a, ObjectId o);
  void remove(AgentId a);

  std::optional<ObjectId> object_of(AgentId a) const;
  std::optional<AgentId> agent_of(ObjectId o) const;

  std::size_t universe() const noexcept { return to_object_.size(); }
  std::size_t size() const noexcept { return size_; }
  bool is_full() const noexcept { return size_ == universe(); }
  /// Pairs in ascending agent order.
  std::vector<Pair> pairs() const;

  friend bool operator==(const Matching&, const Matching&) = default;

private:
  static constexpr std::uint32_t kNone = UINT32_MAX;
  std::vector<std::uint32_t> to_object_;
  std::vector<std::uint32_t> to_agent_;
  std::size_t size_ = 0;
};

/// Count vector (x_1, ..., x_n); x_l is the number of agents matched at
/// position l. Ordered lexicographically, larger is better.
class Signature {
public:
  Signature() = default;
  explicit Signature(std::size_t n) : counts_(n, 0) {}
  explicit Signature(std::vector<std::uint32_t> counts) : counts_(std::move(counts)) {}

  std::size_t size() const noexcept { return counts_.size(); }
  std::uint32_t operator[](std::size_t position) const { return counts_.at(position - 1); }
  std::span<const std::uint32_t> counts() const noexcept { return counts_; }
  std::uint32_t total() const noexcept;

  /// Adds one match at 1-based `position`.
  void bump(std::size_t position);

  friend bool operator==(const Signature&, const Signature&) = default;
  friend std::strong_ordering operator<=>(const Signature& a, const Signature& b);

private:
  std::vector<std::uint32_t> counts_;
};

/// Lexicographic comparison; throws InvalidInput on length mismatch.
std::strong_ordering compare_signatures(const Signature& a, const Signature& b);

/// Counts only pairs of M that lie in rev(P).
Signature signature_of(const Matching& m, const TopKProfile& p);
Signature signature_of(const Matching& m, const FullProfile& r);
/// As signature_of, but pairs outside rev(P) are counted at position n.
Signature extended_signature_of(const Matching& m, const TopKProfile& p);

/// Enumerates C(P): every complete profile whose rankings extend the prefixes.
/// Suffixes start in ascending object order and advance lexicographically, the
/// last agent varying fastest.
class Completions {
public:
  class iterator {
  public:
    using iterator_category = std::input_iterator_tag;
    using value_type = FullProfile;
    using difference_type = std::ptrdiff_t;
    using pointer = const FullProfile*;
    using reference = const FullProfile&;

    iterator() = default;
    reference operator*() const { return current_; }
    pointer operator->() const { return &current_; }
    iterator& operator++();
    void operator++(int) { ++*this; }
    friend bool operator==(const iterator& it, std::default_sentinel_t) { return it.done_; }

  private:
    friend class Completions;
    explicit iterator(const TopKProfile& p);
    void rebuild();

    const TopKProfile* profile_ = nullptr;
    std::vector<std::vector<ObjectId>> suffixes_;
    FullProfile current_;
    bool done_ = true;
  };

  explicit Completions(const TopKProfile& p) : profile_(&p) {}
  iterator begin() const { return iterator(*profile_); }
  std::default_sentinel_t end() const noexcept { return {}; }

  /// prod_i (n - k_i)!, saturating at UINT64_MAX.
  std::uint64_t count() const noexcept;

private:
  const TopKProfile* profile_;
};

inline Completions completions(const TopKProfile& p) { return Completions(p); }

/// Pareto optimality on complete preferences: no cycle in the digraph where
/// i -> j iff agent i strictly prefers M(a_j) to M(a_i).
bool is_pareto_optimal(const FullProfile& r, const Matching& m);

/// Exhaustive for n <= 8, otherwise compared to a rank-maximal matching.
bool is_rank_maximal(const FullProfile& r, const Matching& m);

/// Throws InvalidInput unless m is a full matching on an n-instance.
void require_full(const Matching& m, std::size_t n);

} // namespace necmatch
