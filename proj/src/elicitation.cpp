#include "necmatch/elicitation.hpp"

#include "necmatch/assignment.hpp"
#include "necmatch/errors.hpp"
#include "necmatch/npo.hpp"
#include "necmatch/nrm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <thread>

namespace necmatch {

namespace {

std::size_t isqrt(std::size_t n) {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

ObjectId obj1(std::size_t one_based) { return object(one_based - 1); }

} // namespace

StaticOracle::StaticOracle(FullProfile truth) : truth_(std::move(truth)), asked_(truth_.size(), 0) {}

ObjectId StaticOracle::next_best(AgentId a) {
  if (index(a) >= truth_.size()) throw ProtocolError("unknown agent");
  std::size_t& k = asked_[index(a)];
  if (k == truth_.size()) throw ProtocolError("agent has no objects left to reveal");
  return truth_.at(a, ++k);
}

// ---------------------------------------------------------------------------
// Elicitor

Elicitor::Elicitor(std::size_t n, Strategy strategy, Goal goal)
    : n_(n), strategy_(strategy), goal_(goal), profile_(TopKProfile::empty(n)), current_(n), awaiting_(n, 0) {
  if (n == 0) throw InvalidInput("elicitation needs at least one agent");
  if (strategy == Strategy::threshold && goal == Goal::nrm) {
    throw InvalidInput("the threshold strategy only targets NPO matchings");
  }
  transcript_.n = n;
  transcript_.k.assign(n, 0);
  plan();
}

std::vector<AgentId> Elicitor::awaiting() const {
  std::vector<AgentId> out;
  for (std::size_t i = 0; i < n_; ++i) {
    if (awaiting_[i]) out.push_back(agent(i));
  }
  return out;
}

bool Elicitor::is_awaiting(AgentId a) const { return index(a) < n_ && awaiting_[index(a)]; }

std::optional<std::size_t> Elicitor::pending_position(AgentId a) const {
  if (!is_awaiting(a)) return std::nullopt;
  return profile_.revealed_count(a) + 1;
}

bool Elicitor::goal_reached() const {
  if (strategy_ == Strategy::threshold || goal_ == Goal::npo) return s_ + 1 >= n_;
  return exists_nrm(profile_).has_value();
}

void Elicitor::finish() {
  std::optional<Matching> m = goal_ == Goal::npo ? exists_npo(profile_) : exists_nrm(profile_);
  if (!m) throw InternalError("elicitation stopped without a certified matching");
  result_ = std::move(*m);
}

void Elicitor::plan() {
  transcript_.s.push_back(s_);
  if (goal_reached()) {
    finish();
    return;
  }
  ++round_;
  bool everyone = true;
  if (strategy_ == Strategy::threshold) {
    const std::size_t slack = std::min(k_ - 1, isqrt(n_));
    everyone = s_ + slack <= n_ - 1;
  }
  if (everyone) ++transcript_.all_agent_rounds;
  outstanding_ = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    const bool asked = everyone || !current_.object_of(agent(i));
    awaiting_[i] = asked && profile_.revealed_count(agent(i)) < n_;
    outstanding_ += awaiting_[i] ? 1 : 0;
  }
  if (outstanding_ == 0) throw InternalError("no agent left to query before the goal was reached");
}

void Elicitor::submit(AgentId a, ObjectId o) {
  if (done()) throw ProtocolError("elicitation already finished");
  if (!is_awaiting(a)) throw ProtocolError("no query is pending for this agent");
  if (index(o) >= n_) throw ProtocolError("unknown object");
  if (profile_.revealed(a, o)) throw ProtocolError("object was already revealed by this agent");
  profile_.reveal(a, o);
  transcript_.events.push_back({round_, a, profile_.revealed_count(a), o});
  ++transcript_.k[index(a)];
  awaiting_[index(a)] = 0;
  if (--outstanding_ > 0) return;
  ++k_;
  current_ = max_cardinality_matching(revealed_weighted_graph(profile_));
  s_ = current_.size();
  plan();
}

ElicitationResult run_elicitor(Elicitor& e, PreferenceOracle& oracle) {
  if (oracle.size() != e.size()) throw InvalidInput("oracle and elicitor disagree on n");
  while (!e.done()) {
    for (AgentId a : e.awaiting()) e.submit(a, oracle.next_best(a));
  }
  return {*e.result(), e.transcript(), e.profile()};
}

ElicitationResult elicit_npo(PreferenceOracle& oracle, std::size_t n) {
  Elicitor e(n, Strategy::threshold, Goal::npo);
  return run_elicitor(e, oracle);
}

ElicitationResult elicit_naive(PreferenceOracle& oracle, std::size_t n, Goal goal) {
  Elicitor e(n, Strategy::naive, goal);
  return run_elicitor(e, oracle);
}

// ---------------------------------------------------------------------------
// OPT

OptQueries opt_queries_bruteforce(const FullProfile& truth, Goal goal) {
  const std::size_t n = truth.size();
  if (n > 5) throw Refused("opt_queries_bruteforce supports n <= 5");
  std::vector<std::vector<std::size_t>> vectors;
  std::vector<std::size_t> k(n, 0);
  while (true) {
    vectors.push_back(k);
    std::size_t i = n;
    while (i > 0 && k[i - 1] == n) k[--i] = 0;
    if (i == 0) break;
    ++k[i - 1];
  }
  std::stable_sort(vectors.begin(), vectors.end(), [](const auto& x, const auto& y) {
    return std::accumulate(x.begin(), x.end(), std::size_t{0}) < std::accumulate(y.begin(), y.end(), std::size_t{0});
  });
  for (const auto& v : vectors) {
    const TopKProfile p = truth.truncated(v);
    const bool ok = goal == Goal::npo ? exists_npo(p).has_value() : exists_nrm(p).has_value();
    if (ok) return {v, std::accumulate(v.begin(), v.end(), std::size_t{0})};
  }
  throw InternalError("the complete profile admits no certified matching");
}

std::vector<std::size_t> agents_with_at_least(std::span<const std::size_t> k, std::size_t rounds) {
  std::vector<std::size_t> x(rounds, 0);
  for (std::size_t j = 1; j <= rounds; ++j) {
    x[j - 1] = static_cast<std::size_t>(std::count_if(k.begin(), k.end(), [j](std::size_t ki) { return ki >= j; }));
  }
  return x;
}

// ---------------------------------------------------------------------------
// NPO lower-bound family

std::optional<std::size_t> exact_sqrt(std::size_t n) {
  const std::size_t r = isqrt(n);
  if (r * r != n) return std::nullopt;
  return r;
}

void NpoLowerBoundParams::validate() const {
  const auto r = exact_sqrt(n);
  if (!r || *r < 2) throw InvalidInput("n must be a perfect square of at least 4");
  if (t.size() != *r) throw InvalidInput("expected " + std::to_string(*r) + " block indices t");
  for (std::size_t tj : t) {
    if (tj < 1 || tj + 1 > *r) throw InvalidInput("every t must lie in [1, sqrt(n) - 1]");
  }
}

namespace {

/// Ranking of agent i (1-based) whose block has special agent `special`.
std::vector<ObjectId> npo_lb_ranking(std::size_t n, std::size_t r, std::size_t i, std::size_t special) {
  const std::size_t j = (i - 1) / r + 1;
  const std::size_t first = (j - 1) * r + 1;
  const std::size_t last = j * r; // a_{jr}
  const auto in_block = [&](std::size_t x) { return x >= first && x < last; };
  const auto in_s = [&](std::size_t x) { return x % r == 0; };
  std::vector<ObjectId> out;
  out.reserve(n);
  if (i != last) out.push_back(obj1(i));
  for (std::size_t x = first; x < last; ++x) {
    if (x != i) out.push_back(obj1(x));
  }
  if (i == special) out.push_back(obj1(last));
  for (std::size_t x = 1; x <= n; ++x) {
    if (!in_block(x) && !in_s(x)) out.push_back(obj1(x));
  }
  for (std::size_t x = r; x <= n; x += r) {
    if (!(i == special && x == last)) out.push_back(obj1(x));
  }
  return out;
}

} // namespace

FullProfile gen_npo_lb_instance(const NpoLowerBoundParams& p) {
  p.validate();
  const std::size_t r = *exact_sqrt(p.n);
  std::vector<std::vector<ObjectId>> rankings;
  rankings.reserve(p.n);
  for (std::size_t i = 1; i <= p.n; ++i) {
    const std::size_t j = (i - 1) / r + 1;
    rankings.push_back(npo_lb_ranking(p.n, r, i, (j - 1) * r + p.t[j - 1]));
  }
  return FullProfile(p.n, std::move(rankings));
}

NpoAdaptiveAdversary::NpoAdaptiveAdversary(std::size_t n) : n_(n), r_(0), asked_(n, 0) {
  const auto r = exact_sqrt(n);
  if (!r || *r < 3) throw InvalidInput("the adaptive adversary needs a perfect square n >= 9");
  r_ = *r;
  t_.assign(r_, 0);
}

ObjectId NpoAdaptiveAdversary::next_best(AgentId a) {
  if (index(a) >= n_) throw ProtocolError("unknown agent");
  const std::size_t pos = ++asked_[index(a)];
  if (pos > n_) throw ProtocolError("agent has no objects left to reveal");
  const std::size_t i = index(a) + 1;
  const std::size_t j = (i - 1) / r_ + 1;
  const std::size_t first = (j - 1) * r_ + 1;
  const std::size_t offset = i - first + 1;
  std::size_t special = first + (offset == 1 ? 1 : 0); // any agent but i
  if (t_[j - 1] != 0) {
    special = first + t_[j - 1] - 1;
  } else if (offset < r_ && pos == r_) {
    bool last_to_arrive = true;
    for (std::size_t x = first; x < first + r_ - 1; ++x) {
      if (asked_[x - 1] < r_) last_to_arrive = false;
    }
    if (last_to_arrive) {
      t_[j - 1] = offset;
      special = i;
    }
  }
  return npo_lb_ranking(n_, r_, i, special)[pos - 1];
}

NpoLowerBoundParams NpoAdaptiveAdversary::committed() const {
  NpoLowerBoundParams p{n_, t_};
  for (std::size_t j = 1; j <= r_; ++j) {
    if (p.t[j - 1] != 0) continue;
    for (std::size_t offset = 1; offset < r_; ++offset) {
      if (asked_[(j - 1) * r_ + offset - 1] < r_) {
        p.t[j - 1] = offset;
        break;
      }
    }
  }
  return p;
}

QueryPlan opt_strategy_npo_lb(const NpoLowerBoundParams& p) {
  const FullProfile truth = gen_npo_lb_instance(p);
  const std::size_t r = *exact_sqrt(p.n);
  std::vector<std::size_t> k(p.n, 1);
  for (std::size_t j = 1; j <= r; ++j) {
    k[(j - 1) * r + p.t[j - 1] - 1] = r;
    k[j * r - 1] = r;
  }
  TopKProfile profile = truth.truncated(k);
  auto m = exists_npo(profile);
  if (!m) throw InternalError("the lower-bound query plan does not certify an NPO matching");
  const std::size_t total = std::accumulate(k.begin(), k.end(), std::size_t{0});
  return {std::move(k), std::move(profile), total, std::move(*m)};
}

// ---------------------------------------------------------------------------
// NRM lower-bound family

void NrmLowerBoundParams::validate() const {
  const std::size_t even = n - n % 2;
  if (even < 4) throw InvalidInput("the NRM family needs at least 4 paired agents");
  if (specials.size() != even / 2) throw InvalidInput("expected " + std::to_string(even / 2) + " block entries");
}

namespace {

/// Ranking of agent i (1-based); `special` says which agent of her block is special.
std::vector<ObjectId> nrm_lb_ranking(std::size_t n, std::size_t i, BlockSpecial special) {
  const std::size_t even = n - n % 2;
  const std::size_t half = even / 2;
  std::vector<ObjectId> out;
  out.reserve(n);
  if (i > even) {
    out.push_back(obj1(n));
    for (std::size_t x = 1; x <= even; ++x) out.push_back(obj1(x));
    return out;
  }
  const std::size_t t = i <= half ? i : i - half;
  const bool is_special = (i <= half) == (special == BlockSpecial::first);
  std::size_t second = is_special ? half + t : (t + 1) % half;
  if (second == 0) second = half;
  out.push_back(obj1(t));
  out.push_back(obj1(second));
  for (std::size_t x = 1; x <= even; ++x) {
    if (x != t && x != second) out.push_back(obj1(x));
  }
  if (n > even) out.push_back(obj1(n));
  return out;
}

} // namespace

FullProfile gen_nrm_lb_instance(const NrmLowerBoundParams& p) {
  p.validate();
  const std::size_t half = (p.n - p.n % 2) / 2;
  std::vector<std::vector<ObjectId>> rankings;
  rankings.reserve(p.n);
  for (std::size_t i = 1; i <= p.n; ++i) {
    const std::size_t t = i <= half ? i : (i <= 2 * half ? i - half : 1);
    rankings.push_back(nrm_lb_ranking(p.n, i, p.specials[t - 1]));
  }
  return FullProfile(p.n, std::move(rankings));
}

QueryPlan opt_strategy_nrm_lb(const NrmLowerBoundParams& p) {
  const FullProfile truth = gen_nrm_lb_instance(p);
  const std::size_t half = (p.n - p.n % 2) / 2;
  std::vector<std::size_t> k(p.n, 1);
  for (std::size_t t = 1; t <= half; ++t) k[(p.specials[t - 1] == BlockSpecial::first ? t : half + t) - 1] = 2;
  TopKProfile profile = truth.truncated(k);
  auto m = exists_nrm(profile);
  if (!m) throw InternalError("the lower-bound query plan does not certify an NRM matching");
  const std::size_t total = std::accumulate(k.begin(), k.end(), std::size_t{0});
  return {std::move(k), std::move(profile), total, std::move(*m)};
}

NrmAdaptiveAdversary::NrmAdaptiveAdversary(std::size_t n) : n_(n), asked_(n, 0) {
  NrmLowerBoundParams probe{n, std::vector<BlockSpecial>((n - n % 2) / 2, BlockSpecial::first)};
  probe.validate();
  specials_.assign(probe.specials.size(), std::nullopt);
}

ObjectId NrmAdaptiveAdversary::next_best(AgentId a) {
  if (index(a) >= n_) throw ProtocolError("unknown agent");
  const std::size_t pos = ++asked_[index(a)];
  if (pos > n_) throw ProtocolError("agent has no objects left to reveal");
  const std::size_t i = index(a) + 1;
  const std::size_t half = specials_.size();
  if (i > 2 * half) return nrm_lb_ranking(n_, i, BlockSpecial::first)[pos - 1];
  const std::size_t t = i <= half ? i : i - half;
  auto& s = specials_[t - 1];
  if (!s && pos >= 2) s = i <= half ? BlockSpecial::second : BlockSpecial::first;
  return nrm_lb_ranking(n_, i, s.value_or(BlockSpecial::first))[pos - 1];
}

NrmLowerBoundParams NrmAdaptiveAdversary::committed() const {
  NrmLowerBoundParams p{n_, {}};
  for (const auto& s : specials_) p.specials.push_back(s.value_or(BlockSpecial::first));
  return p;
}

// ---------------------------------------------------------------------------
// Experiments

double ExperimentReport::max_ratio() const noexcept {
  double best = 0;
  for (const RunRecord& r : runs) best = std::max(best, r.ratio);
  return best;
}

std::size_t ExperimentReport::bound_violations() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(runs.begin(), runs.end(), [](const RunRecord& r) { return r.bound > 0 && r.ratio > r.bound; }));
}

std::size_t ExperimentReport::claim_violations() const noexcept {
  return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const RunRecord& r) { return !r.claim_holds; }));
}

std::size_t ExperimentReport::unverified() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(runs.begin(), runs.end(), [](const RunRecord& r) { return !r.result_verified; }));
}

namespace {

void validate_config(const ExperimentConfig& c) {
  if (c.sizes.empty()) throw InvalidInput("no instance sizes given");
  if (c.strategy == Strategy::threshold && c.goal == Goal::nrm) throw InvalidInput("the threshold strategy only targets NPO");
  if (c.threads == 0) throw InvalidInput("threads must be positive");
  for (std::size_t n : c.sizes) {
    switch (c.family) {
    case Family::random_full:
      if (n == 0 || n > 5) throw InvalidInput("random instances need 1 <= n <= 5 for an exact OPT");
      break;
    case Family::npo_lower_bound: {
      const auto r = exact_sqrt(n);
      if (!r || *r < (c.adaptive ? 3u : 2u)) throw InvalidInput("NPO lower-bound sizes must be perfect squares >= 9");
      break;
    }
    case Family::nrm_lower_bound:
      if (n - n % 2 < 4) throw InvalidInput("NRM lower-bound sizes must be at least 4");
      break;
    }
  }
}

RunRecord run_one(const ExperimentConfig& c, std::size_t n, std::size_t instance) {
  std::seed_seq seq{c.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(instance)};
  std::mt19937_64 rng(seq);
  Elicitor e(n, c.strategy, c.goal);
  ElicitationResult run;
  std::vector<std::size_t> opt_k;
  RunRecord rec;
  rec.n = n;
  rec.instance = instance;

  switch (c.family) {
  case Family::random_full: {
    std::vector<std::vector<ObjectId>> rankings(n);
    for (auto& rk : rankings) {
      for (std::size_t j = 0; j < n; ++j) rk.push_back(object(j));
      std::shuffle(rk.begin(), rk.end(), rng);
    }
    StaticOracle oracle(FullProfile(n, std::move(rankings)));
    run = run_elicitor(e, oracle);
    const OptQueries opt = opt_queries_bruteforce(oracle.truth(), c.goal);
    opt_k = opt.k;
    rec.opt_total = opt.total;
    rec.opt_exact = true;
    break;
  }
  case Family::npo_lower_bound: {
    NpoLowerBoundParams params;
    if (c.adaptive) {
      NpoAdaptiveAdversary oracle(n);
      run = run_elicitor(e, oracle);
      params = oracle.committed();
    } else {
      const std::size_t r = *exact_sqrt(n);
      std::uniform_int_distribution<std::size_t> pick(1, r - 1);
      params = {n, std::vector<std::size_t>(r)};
      for (auto& t : params.t) t = pick(rng);
      StaticOracle oracle(gen_npo_lb_instance(params));
      run = run_elicitor(e, oracle);
    }
    const QueryPlan plan = opt_strategy_npo_lb(params);
    opt_k = plan.k;
    rec.opt_total = plan.total;
    break;
  }
  case Family::nrm_lower_bound: {
    NrmLowerBoundParams params;
    if (c.adaptive) {
      NrmAdaptiveAdversary oracle(n);
      run = run_elicitor(e, oracle);
      params = oracle.committed();
    } else {
      std::bernoulli_distribution coin(0.5);
      params = {n, std::vector<BlockSpecial>((n - n % 2) / 2)};
      for (auto& b : params.specials) b = coin(rng) ? BlockSpecial::second : BlockSpecial::first;
      StaticOracle oracle(gen_nrm_lb_instance(params));
      run = run_elicitor(e, oracle);
    }
    const QueryPlan plan = opt_strategy_nrm_lb(params);
    opt_k = plan.k;
    rec.opt_total = plan.total;
    break;
  }
  }

  rec.alg_total = run.transcript.total();
  rec.ratio = rec.opt_total == 0 ? (rec.alg_total == 0 ? 1.0 : INFINITY)
                                 : static_cast<double>(rec.alg_total) / static_cast<double>(rec.opt_total);
  rec.bound = c.strategy == Strategy::threshold ? 2.0 * (std::sqrt(static_cast<double>(n)) + 1.0) : 0.0;
  rec.s = run.transcript.s;
  rec.all_agent_rounds = run.transcript.all_agent_rounds;
  if (c.goal == Goal::npo) {
    rec.x = agents_with_at_least(opt_k, rec.all_agent_rounds);
    for (std::size_t j = 1; j <= rec.all_agent_rounds; ++j) {
      if (rec.x[j - 1] + rec.s[j - 1] + 1 < n) rec.claim_holds = false;
    }
    rec.result_verified = check_npo(run.profile, run.matching);
  } else {
    rec.result_verified = check_nrm(run.profile, run.matching);
  }
  return rec;
}

} // namespace

ExperimentReport run_competitive_experiment(const ExperimentConfig& config) {
  validate_config(config);
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t n : config.sizes) {
    for (std::size_t i = 0; i < config.instances_per_size; ++i) jobs.emplace_back(n, i);
  }
  ExperimentReport report;
  report.runs.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> workers;
    const std::size_t count = std::min(config.threads, std::max<std::size_t>(jobs.size(), 1));
    for (std::size_t w = 0; w < count; ++w) {
      workers.emplace_back([&] {
        for (std::size_t idx = next++; idx < jobs.size() && !failed; idx = next++) {
          try {
            report.runs[idx] = run_one(config, jobs[idx].first, jobs[idx].second);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return report;
}

} // namespace necmatch
