#pragma once

// Online elicitation in the next-best query model.

#include "necmatch/core.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace necmatch {

enum class Goal { npo, nrm };

/// threshold asks every agent while the revealed matching is far from n-1
/// (margin min(k-1, floor(sqrt n)) in round k), then only agents it leaves
/// unmatched. naive always asks every agent.
enum class Strategy { threshold, naive };

/// Answers Q(a, k) where k is one past the number of answers given to a.
class PreferenceOracle {
public:
  virtual ~PreferenceOracle() = default;
  virtual std::size_t size() const = 0;
  virtual ObjectId next_best(AgentId a) = 0;
};

/// Replays a fixed complete profile.
class StaticOracle final : public PreferenceOracle {
public:
  explicit StaticOracle(FullProfile truth);

  std::size_t size() const override { return truth_.size(); }
  ObjectId next_best(AgentId a) override;

  const FullProfile& truth() const noexcept { return truth_; }

private:
  FullProfile truth_;
  std::vector<std::size_t> asked_;
};

struct QueryEvent {
  std::size_t round; // 1-based
  AgentId agent;
  std::size_t position; // 1-based
  ObjectId object;

  friend bool operator==(const QueryEvent&, const QueryEvent&) = default;
};

struct ElicitationTranscript {
  std::size_t n = 0;
  std::vector<QueryEvent> events;
  /// Queries per agent.
  std::vector<std::size_t> k;
  /// s_j: size of a maximum revealed matching each time the loop condition is
  /// tested, so s.front() == 0 and s.back() is the final size.
  std::vector<std::size_t> s;
  /// Number of rounds that queried every agent (a prefix of the rounds).
  std::size_t all_agent_rounds = 0;

  std::size_t total() const noexcept { return events.size(); }
  std::size_t rounds() const noexcept { return events.empty() ? 0 : events.back().round; }

  friend bool operator==(const ElicitationTranscript&, const ElicitationTranscript&) = default;
};

/// Round-based elicitation engine. Answers to one round may arrive in any
/// order; the engine moves on once the last one is in. The same engine backs
/// both in-process runs and live sessions.
class Elicitor {
public:
  Elicitor(std::size_t n, Strategy strategy, Goal goal);

  std::size_t size() const noexcept { return n_; }
  Strategy strategy() const noexcept { return strategy_; }
  Goal goal() const noexcept { return goal_; }

  bool done() const noexcept { return result_.has_value(); }
  /// 1-based index of the round in progress.
  std::size_t round() const noexcept { return round_; }
  /// Agents of the current round that still owe an answer, ascending.
  std::vector<AgentId> awaiting() const;
  bool is_awaiting(AgentId a) const;
  /// Position the agent is asked for, if she is awaited.
  std::optional<std::size_t> pending_position(AgentId a) const;

  /// Throws ProtocolError when a is not awaited or o was already given by a.
  void submit(AgentId a, ObjectId o);

  const TopKProfile& profile() const noexcept { return profile_; }
  const ElicitationTranscript& transcript() const noexcept { return transcript_; }
  std::size_t current_matching_size() const noexcept { return s_; }
  const std::optional<Matching>& result() const noexcept { return result_; }

private:
  void plan();
  void finish();
  bool goal_reached() const;

  std::size_t n_;
  Strategy strategy_;
  Goal goal_;
  TopKProfile profile_;
  ElicitationTranscript transcript_;
  Matching current_;
  std::size_t s_ = 0;
  std::size_t k_ = 1;
  std::size_t round_ = 0;
  std::vector<char> awaiting_;
  std::size_t outstanding_ = 0;
  std::optional<Matching> result_;
};

struct ElicitationResult {
  Matching matching;
  ElicitationTranscript transcript;
  TopKProfile profile;
};

/// Runs an Elicitor against an oracle, asking awaited agents in ascending order.
ElicitationResult run_elicitor(Elicitor& e, PreferenceOracle& oracle);

ElicitationResult elicit_npo(PreferenceOracle& oracle, std::size_t n);
ElicitationResult elicit_naive(PreferenceOracle& oracle, std::size_t n, Goal goal);

struct OptQueries {
  std::vector<std::size_t> k;
  std::size_t total = 0;
};

/// Fewest total queries after which an NPO (NRM) matching exists. Ties in
/// the total go to the lexicographically smallest k-vector. Refuses n > 5.
OptQueries opt_queries_bruteforce(const FullProfile& truth, Goal goal);

/// X_j for j = 1..rounds: agents with k_i >= j.
std::vector<std::size_t> agents_with_at_least(std::span<const std::size_t> k, std::size_t rounds);

// Lower-bound family for NPO elicitation. Agents are blocked in groups of
// r = sqrt(n); the last agent of block j holds index j*r. t[j] in [1, r-1]
// picks the block's special agent (j-1)*r + t[j] (1-based).

struct NpoLowerBoundParams {
  std::size_t n = 0;
  std::vector<std::size_t> t;

  /// Throws InvalidInput unless n = r*r with r >= 2 and every t in [1, r-1].
  void validate() const;
};

/// Integer square root when n is a perfect square, otherwise nullopt.
std::optional<std::size_t> exact_sqrt(std::size_t n);

FullProfile gen_npo_lb_instance(const NpoLowerBoundParams& p);

/// Commits each block's special agent as late as possible: the last agent of
/// the block to be asked for position r.
class NpoAdaptiveAdversary final : public PreferenceOracle {
public:
  /// n must be a perfect square >= 9.
  explicit NpoAdaptiveAdversary(std::size_t n);

  std::size_t size() const override { return n_; }
  ObjectId next_best(AgentId a) override;

  /// Committed t, with uncommitted blocks resolved to their lowest agent not
  /// yet asked r times. Every answer given so far agrees with this instance.
  NpoLowerBoundParams committed() const;
  FullProfile committed_instance() const { return gen_npo_lb_instance(committed()); }

private:
  std::size_t n_;
  std::size_t r_;
  std::vector<std::size_t> asked_;
  std::vector<std::size_t> t_; // 0 while open
};

struct QueryPlan {
  std::vector<std::size_t> k;
  TopKProfile profile;
  std::size_t total = 0;
  Matching matching;
};

/// r queries to the special agent and to the last agent of every block, one
/// to everyone else. Throws InternalError if no NPO matching results.
QueryPlan opt_strategy_npo_lb(const NpoLowerBoundParams& p);

// Lower-bound family for NRM elicitation. For even n, block t pairs a_t with
// a_{n/2+t}; both rank o_t first. For odd n, a_n ranks o_n first and
// everyone else ranks it last.

enum class BlockSpecial : std::uint8_t { first, second };

struct NrmLowerBoundParams {
  std::size_t n = 0;
  std::vector<BlockSpecial> specials;

  /// Throws InvalidInput unless the even part is >= 4 and one entry per block.
  void validate() const;
};

FullProfile gen_nrm_lb_instance(const NrmLowerBoundParams& p);

/// Two queries to every special agent, one to everyone else.
/// Throws InternalError if no NRM matching results.
QueryPlan opt_strategy_nrm_lb(const NrmLowerBoundParams& p);

/// In each block, the first agent asked for her second choice is made
/// non-special.
class NrmAdaptiveAdversary final : public PreferenceOracle {
public:
  explicit NrmAdaptiveAdversary(std::size_t n);

  std::size_t size() const override { return n_; }
  ObjectId next_best(AgentId a) override;

  /// Uncommitted blocks default to BlockSpecial::first.
  NrmLowerBoundParams committed() const;
  FullProfile committed_instance() const { return gen_nrm_lb_instance(committed()); }

private:
  std::size_t n_;
  std::vector<std::size_t> asked_;
  std::vector<std::optional<BlockSpecial>> specials_;
};

// Competitive-ratio experiments.

enum class Family { random_full, npo_lower_bound, nrm_lower_bound };

struct ExperimentConfig {
  Family family = Family::random_full;
  Strategy strategy = Strategy::threshold;
  Goal goal = Goal::npo;
  std::vector<std::size_t> sizes;
  std::size_t instances_per_size = 1;
  /// Lower-bound families only: play against the adaptive adversary.
  bool adaptive = false;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

struct RunRecord {
  std::size_t n = 0;
  std::size_t instance = 0;
  std::size_t alg_total = 0;
  std::size_t opt_total = 0;
  /// True when opt_total is the brute-force optimum, false for a plan bound.
  bool opt_exact = false;
  double ratio = 0;
  /// 2(sqrt(n)+1) for the threshold strategy, 0 when no bound applies.
  double bound = 0;
  std::vector<std::size_t> s;
  std::size_t all_agent_rounds = 0;
  /// X_j of the OPT k-vector for j = 1..all_agent_rounds.
  std::vector<std::size_t> x;
  bool claim_holds = true;
  bool result_verified = false;
};

struct ExperimentReport {
  std::vector<RunRecord> runs;

  double max_ratio() const noexcept;
  std::size_t bound_violations() const noexcept;
  std::size_t claim_violations() const noexcept;
  std::size_t unverified() const noexcept;
};

/// Independent seeded runs, spread over config.threads workers. The report
/// is identical for every thread count.
ExperimentReport run_competitive_experiment(const ExperimentConfig& config);

} // namespace necmatch
