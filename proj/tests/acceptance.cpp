// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--known-failure NAME]...
//
// Exit status is 0 iff every criterion not named by --known-failure passes
// and every named one still fails; a known failure that starts passing is
// reported so the exemption can be dropped.

#include "http_driver.hpp"
#include "oracles.hpp"
#include "table_fixture.hpp"

#include "necmatch/assignment.hpp"
#include "necmatch/elicitation.hpp"
#include "necmatch/http_server.hpp"
#include "necmatch/npo.hpp"
#include "necmatch/nrm.hpp"
#include "necmatch/session.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace necmatch;
using namespace necmatch::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

/// Counts agreement of two predicates and remembers the first disagreement.
struct Tally {
  std::size_t cases = 0;
  std::size_t mismatches = 0;
  std::string first;

  void record(bool agree, const std::function<std::string()>& describe) {
    ++cases;
    if (agree) return;
    if (mismatches++ == 0) first = describe();
  }
  Outcome outcome(const std::string& what) const {
    std::ostringstream os;
    os << cases - mismatches << "/" << cases << " " << what;
    if (mismatches) os << "; first mismatch: " << first;
    return {mismatches == 0 && cases > 0, os.str()};
  }
};

std::string describe(const TopKProfile& p, const Matching& m) {
  const Names names = Names::defaults(p.size());
  return serialize_instance({names, p}) + " " + serialize_matching(m, names);
}

Signature sig(std::vector<std::uint32_t> v) { return Signature(std::move(v)); }

std::string str(const Signature& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s.counts()[i]);
  return out + ")";
}

// ---------------------------------------------------------------------------

Outcome worked_example() {
  const TopKProfile p = worked_profile();
  const Matching m = worked_m();
  const Matching mp = worked_m_prime();
  const bool a = check_npo(p, m);
  const bool b = !check_nrm(p, m);
  const bool c = check_nrm(p, mp);
  const auto found = exists_nrm(p);
  const Signature best = sig_opt(p, SigOptQuery::whole(3)).signature;
  // Best signature the returned matching reaches under some completion.
  Signature reached(3);
  if (found) {
    for (const FullProfile& r : completions(p)) reached = std::max(reached, signature_of(*found, r));
  }
  const bool d = found && check_nrm(p, *found) && reached == sig({1, 2, 0});
  const bool e = best == sig({1, 2, 0});
  std::ostringstream os;
  os << "check_npo(M)=" << a << " check_nrm(M)=" << !b << " check_nrm(M')=" << c
     << " exists_nrm signature=" << (found ? str(reached) : "none") << " sig_opt=" << str(best);
  return {a && b && c && d && e, os.str()};
}

Outcome npo_equivalence() {
  Tally t;
  for (const TopKProfile& p : all_topk_profiles(3)) {
    for (const Matching& m : all_full_matchings(3)) {
      bool oracle = true;
      for (const FullProfile& r : completions(p)) oracle = oracle && pareto_by_definition(r, m);
      t.record(check_npo(p, m) == oracle, [&] { return describe(p, m); });
    }
  }
  Rng rng(1001);
  for (int trial = 0; trial < 1000; ++trial) {
    const TopKProfile p = random_topk_profile(4, rng);
    const Matching m = random_full_matching(4, rng);
    bool oracle = true;
    for (const FullProfile& r : completions(p)) {
      if (!pareto_by_definition(r, m)) {
        oracle = false;
        break;
      }
    }
    t.record(check_npo(p, m) == oracle, [&] { return describe(p, m); });
  }
  return t.outcome("agree (exhaustive n=3 plus 1000 random n=4)");
}

Outcome nrm_equivalence() {
  Tally t;
  for (const TopKProfile& p : all_topk_profiles(3)) {
    for (const Matching& m : all_full_matchings(3)) {
      t.record(check_nrm(p, m) == brute_force_nrm_check(p, m), [&] { return describe(p, m); });
    }
  }
  Rng rng(1002);
  for (int trial = 0; trial < 1000; ++trial) {
    const TopKProfile p = random_topk_profile(4, rng);
    const Matching m = random_full_matching(4, rng);
    t.record(check_nrm(p, m) == brute_force_nrm_check(p, m), [&] { return describe(p, m); });
  }
  return t.outcome("agree (exhaustive n=3 plus 1000 random n=4)");
}

Outcome npo_characterisation() {
  Tally t;
  Rng rng(1003);
  for (int trial = 0; trial < 1200; ++trial) {
    const std::size_t n = 3 + trial % 4;
    const TopKProfile p = random_topk_profile(n, rng);
    const auto m = exists_npo(p);
    const bool predicted = max_revealed_matching_size(p) + 1 >= n;
    const bool ok = m.has_value() == predicted && (!m || (m->size() == n && check_npo(p, *m)));
    t.record(ok, [&] { return serialize_instance({Names::defaults(n), p}); });
  }
  return t.outcome("profiles, n in 3..6");
}

Outcome rank_maximal_solver() {
  Tally t;
  Rng rng(1004);
  std::bernoulli_distribution revealed(0.6);
  std::bernoulli_distribution forbid(0.2);
  std::size_t with_forbidden = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + trial % 7;
    // Rank labels come from a random complete ranking; some pairs are dropped
    // (unrevealed or forbidden).
    const FullProfile r = random_full_profile(n, rng);
    LabeledBipartiteGraph g(n);
    bool any_forbidden = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const bool f = forbid(rng);
        any_forbidden |= f;
        if (!f && revealed(rng)) g.add_edge(agent(i), object(j), static_cast<std::int64_t>(r.rank(agent(i), object(j))));
      }
    }
    with_forbidden += any_forbidden;
    std::vector<AgentId> left(g.left().begin(), g.left().end());
    Signature best(n);
    std::size_t best_size = 0;
    Signature best_card(n);
    for_each_partial_matching(n, left, [&](AgentId a, ObjectId o) { return g.value(a, o) >= 0; },
                              [&](const std::vector<Pair>& pairs) {
                                Signature s(n);
                                for (const Pair& p : pairs) s.bump(static_cast<std::size_t>(g.value(p.agent, p.object)));
                                if (s > best) best = s;
                                if (pairs.size() > best_size || (pairs.size() == best_size && s > best_card)) {
                                  best_size = pairs.size();
                                  best_card = s;
                                }
                              });
    const auto fast = rank_maximal_matching(g);
    const auto card = max_cardinality_rank_maximal_matching(g);
    const bool ok = fast.signature == best && label_signature(g, fast.matching) == best &&
                    card.signature == best_card && card.matching.size() == best_size;
    t.record(ok, [&] { return "n=" + std::to_string(n) + " expected " + str(best) + " got " + str(fast.signature); });
  }
  return t.outcome("graphs, n <= 7, " + std::to_string(with_forbidden) + " with forbidden pairs");
}

Outcome table_fidelity() {
  const FullProfile table = load_ranking_table(NECMATCH_FIXTURES "/npo_lb_16_t2.txt", 16);
  const FullProfile generated = gen_npo_lb_instance({16, {2, 2, 2, 2}});
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < 16; ++i) {
    const auto g = generated.ranking(agent(i));
    const auto t = table.ranking(agent(i));
    if (!std::equal(g.begin(), g.end(), t.begin(), t.end())) bad.push_back(i + 1);
  }
  std::ostringstream os;
  os << 16 - bad.size() << "/16 columns bit-exact";
  if (!bad.empty()) {
    os << "; differing columns:";
    for (std::size_t c : bad) os << " a" << c;
  }
  return {bad.empty(), os.str()};
}

Outcome npo_opt_plan() {
  std::ostringstream os;
  bool ok = true;
  for (std::size_t n : {9u, 16u, 25u}) {
    const std::size_t r = *exact_sqrt(n);
    // Every admissible choice of specials.
    std::vector<std::size_t> t(r, 1);
    std::size_t instances = 0;
    bool all = true;
    for (;;) {
      const QueryPlan plan = opt_strategy_npo_lb({n, t});
      const auto m = exists_npo(plan.profile);
      all &= plan.total == 3 * n - 2 * r && m && check_npo(plan.profile, *m);
      ++instances;
      std::size_t j = 0;
      while (j < r && ++t[j] == r) t[j++] = 1;
      if (j == r || instances >= 4096) break;
    }
    ok &= all;
    os << "n=" << n << ": " << instances << " instances " << (all ? "ok" : "FAILED") << " (3n-2sqrt(n)=" << 3 * n - 2 * r
       << ") ";
  }
  return {ok, os.str()};
}

Outcome npo_adversary() {
  std::ostringstream os;
  bool ok = true;
  for (std::size_t n : {9u, 16u, 25u}) {
    const std::size_t r = *exact_sqrt(n);
    NpoAdaptiveAdversary adversary(n);
    const ElicitationResult res = elicit_npo(adversary, n);
    const FullProfile committed = adversary.committed_instance();
    bool consistent = true;
    for (const QueryEvent& e : res.transcript.events) consistent &= committed.at(e.agent, e.position) == e.object;
    const std::size_t lower = (r - 1) * (n - 2 * r);
    const std::size_t opt = opt_strategy_npo_lb(adversary.committed()).total;
    const double ratio = static_cast<double>(res.transcript.total()) / static_cast<double>(opt);
    const double bound = 2.0 * (std::sqrt(static_cast<double>(n)) + 1.0);
    const bool here = consistent && check_npo(res.profile, res.matching) && res.transcript.total() >= lower &&
                      ratio <= bound;
    ok &= here;
    os << "n=" << n << ": " << res.transcript.total() << " queries >= " << lower << ", ratio " << ratio
       << " <= " << bound << (here ? "" : " FAILED") << "; ";
  }
  return {ok, os.str()};
}

Outcome desk_scale_bound() {
  ExperimentConfig c;
  c.family = Family::random_full;
  c.strategy = Strategy::threshold;
  c.goal = Goal::npo;
  c.sizes = {3, 4, 5};
  c.instances_per_size = 70;
  c.seed = 2024;
  c.threads = std::max(1u, std::thread::hardware_concurrency());
  const ExperimentReport report = run_competitive_experiment(c);
  std::size_t inexact = 0;
  for (const RunRecord& r : report.runs) inexact += !r.opt_exact;
  std::ostringstream os;
  os << report.runs.size() << " profiles, max ratio " << report.max_ratio() << ", bound violations "
     << report.bound_violations() << ", X_j claim violations " << report.claim_violations() << ", unverified "
     << report.unverified() << ", inexact OPT " << inexact;
  const bool ok = report.runs.size() >= 200 && report.bound_violations() == 0 && report.claim_violations() == 0 &&
                  report.unverified() == 0 && inexact == 0;
  return {ok, os.str()};
}

Outcome nrm_family() {
  std::ostringstream os;
  bool ok = true;
  for (std::size_t n : {4u, 6u, 8u}) {
    const std::size_t h = n / 2;
    bool plans = true;
    for (std::size_t mask = 0; mask < (std::size_t{1} << h); ++mask) {
      NrmLowerBoundParams p{n, {}};
      for (std::size_t b = 0; b < h; ++b) p.specials.push_back(mask >> b & 1 ? BlockSpecial::second : BlockSpecial::first);
      const QueryPlan plan = opt_strategy_nrm_lb(p);
      const auto m = exists_nrm(plan.profile);
      plans &= plan.total == 3 * n / 2 && m && check_nrm(plan.profile, *m) &&
               is_rank_maximal(gen_nrm_lb_instance(p), *m);
      if (n == 4) plans &= opt_queries_bruteforce(gen_nrm_lb_instance(p), Goal::nrm).total == 6;
    }
    NrmAdaptiveAdversary adversary(n);
    const ElicitationResult res = elicit_naive(adversary, n, Goal::nrm);
    const FullProfile committed = adversary.committed_instance();
    bool consistent = true;
    for (const QueryEvent& e : res.transcript.events) consistent &= committed.at(e.agent, e.position) == e.object;
    const bool adv = consistent && check_nrm(res.profile, res.matching) && res.transcript.total() >= 2 * n - 3;
    ok &= plans && adv;
    os << "n=" << n << ": plan " << 3 * n / 2 << (plans ? " ok" : " FAILED") << ", adversary " << res.transcript.total()
       << " >= " << 2 * n - 3 << (adv ? "" : " FAILED") << "; ";
  }
  return {ok, os.str()};
}

Outcome service_equivalence() {
  SessionRegistry registry;
  SessionServer server(registry);
  const int port = server.bind("127.0.0.1", 0);
  server.start();
  std::ostringstream os;
  bool ok = true;
  for (Goal goal : {Goal::npo, Goal::nrm}) {
    const Strategy strategy = goal == Goal::npo ? Strategy::threshold : Strategy::naive;
    const HttpRun run = drive_sequential(port, worked_truth(), goal, strategy);
    StaticOracle oracle(worked_truth());
    const ElicitationResult engine = goal == Goal::npo ? elicit_npo(oracle, 3) : elicit_naive(oracle, 3, goal);
    const TopKProfile served = instance_from_json(run.result["profile"]).as_topk();
    const bool checked = goal == Goal::npo ? check_npo(served, run.matching) : check_nrm(served, run.matching);
    const bool here = run.transcript == engine.transcript && run.matching == engine.matching &&
                      served == engine.profile && checked && run.result["certified"] == true;
    ok &= here;
    os << to_string(goal) << "/" << to_string(strategy) << ": " << run.transcript.total() << " queries, transcript "
       << (run.transcript == engine.transcript ? "identical" : "DIFFERS") << ", checker " << (checked ? "passes" : "FAILS")
       << "; ";
  }
  server.stop();
  return {ok, os.str()};
}

} // namespace

int main(int argc, char** argv) {
  std::set<std::string> known;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--known-failure" && i + 1 < argc) {
      known.insert(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--known-failure NAME]...\n", argv[0]);
      return 2;
    }
  }

  const std::vector<Criterion> criteria = {
      {"worked-example", 0.001, worked_example},
      {"npo-oracle-equivalence", 120, npo_equivalence},
      {"nrm-oracle-equivalence", 300, nrm_equivalence},
      {"npo-existence-characterisation", 60, npo_characterisation},
      {"rank-maximal-solver", 120, rank_maximal_solver},
      {"npo-lower-bound-table", 0, table_fidelity},
      {"npo-opt-plan", 0, npo_opt_plan},
      {"npo-adversary-lower-bound", 10, npo_adversary},
      {"desk-scale-competitive-bound", 600, desk_scale_bound},
      {"nrm-family", 0, nrm_family},
      {"service-engine-equivalence", 0, service_equivalence},
  };

  for (const std::string& k : known) {
    if (std::none_of(criteria.begin(), criteria.end(), [&](const Criterion& c) { return c.name == k; })) {
      std::fprintf(stderr, "unknown criterion %s\n", k.c_str());
      return 2;
    }
  }

  int unexpected = 0;
  std::size_t passed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0 && seconds > c.budget_seconds) {
      o.pass = false;
      o.detail += "; over the time budget";
    }
    const bool is_known = known.count(c.name) > 0;
    passed += o.pass;
    if (o.pass == is_known) ++unexpected;
    std::printf("%s %-32s %s [%.3fs%s]%s\n", o.pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(), seconds,
                c.budget_seconds > 0 ? (" of " + std::to_string(c.budget_seconds).substr(0, 5) + "s").c_str() : "",
                is_known ? (o.pass ? " (listed as known failure, now passing)" : " (known failure)") : "");
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria pass\n", passed, criteria.size());
  return unexpected == 0 ? 0 : 1;
}
