#include "necmatch/nrm.hpp"

#include "necmatch/assignment.hpp"
#include "necmatch/errors.hpp"
#include "necmatch/npo.hpp"

#include <algorithm>

namespace necmatch {

SigOptQuery SigOptQuery::whole(std::size_t n) {
  SigOptQuery q;
  for (std::size_t i = 0; i < n; ++i) {
    q.agents.push_back(agent(i));
    q.objects.push_back(object(i));
  }
  return q;
}

SigOptQuery SigOptQuery::without(std::size_t n, AgentId a, ObjectId o) {
  SigOptQuery q;
  for (std::size_t i = 0; i < n; ++i) {
    if (agent(i) != a) q.agents.push_back(agent(i));
    if (object(i) != o) q.objects.push_back(object(i));
  }
  return q;
}

SigOptQuery SigOptQuery::forbidding(std::size_t n, AgentId a, ObjectId o) {
  SigOptQuery q = whole(n);
  q.forbidden.push_back({a, o});
  return q;
}

namespace {

LabeledBipartiteGraph relaxed_graph(const TopKProfile& p, const SigOptQuery& q) {
  const std::size_t n = p.size();
  LabeledBipartiteGraph g(n, q.agents, q.objects);
  std::vector<char> in_s(n, 0);
  std::vector<char> in_t(n, 0);
  for (AgentId a : q.agents) in_s[index(a)] = 1;
  for (ObjectId o : q.objects) in_t[index(o)] = 1;
  std::vector<char> banned(n * n, 0);
  for (const Pair& f : q.forbidden) {
    if (index(f.agent) >= n || index(f.object) >= n || !in_s[index(f.agent)] || !in_t[index(f.object)]) {
      throw InvalidInput("forbidden pair lies outside S x T");
    }
    banned[index(f.agent) * n + index(f.object)] = 1;
  }
  const WeakOrderProfile relaxed = WeakOrderProfile::relax(p);
  for (AgentId a : q.agents) {
    for (ObjectId o : q.objects) {
      if (banned[index(a) * n + index(o)]) continue;
      g.add_edge(a, o, static_cast<std::int64_t>(relaxed.position(a, o)));
    }
  }
  return g;
}

/// Rank-maximal matching of N \ {a} to O \ {o} over revealed pairs when it
/// is perfect there, otherwise over the relaxed profile.
Matching reduced_rank_maximal(const TopKProfile& p, AgentId a, ObjectId o) {
  const std::size_t n = p.size();
  const SigOptQuery q = SigOptQuery::without(n, a, o);
  LabeledBipartiteGraph revealed(n, q.agents, q.objects);
  for (AgentId b : q.agents) {
    const auto prefix = p.prefix(b);
    for (std::size_t pos = 0; pos < prefix.size(); ++pos) {
      if (prefix[pos] != o) revealed.add_edge(b, prefix[pos], static_cast<std::int64_t>(pos + 1));
    }
  }
  RankMaximalResult best = rank_maximal_matching(revealed);
  if (best.matching.size() + 1 == n) return std::move(best.matching);
  return sig_opt(p, q).witness;
}

} // namespace

SigOptResult sig_opt(const TopKProfile& p, const SigOptQuery& q) {
  // M(S, T, F) holds matchings that cover S, so cardinality ranks first.
  RankMaximalResult r = max_cardinality_rank_maximal_matching(relaxed_graph(p, q));
  return {std::move(r.signature), std::move(r.matching)};
}

bool check_nrm(const TopKProfile& p, const Matching& m) {
  const std::size_t n = p.size();
  require_full(m, n);
  std::size_t revealed = 0;
  std::optional<Pair> hidden;
  for (const Pair& pr : m.pairs()) {
    if (p.revealed(pr.agent, pr.object)) {
      ++revealed;
    } else {
      hidden = pr;
    }
  }
  if (revealed == n) return signature_of(m, p) == sig_opt(p, SigOptQuery::whole(n)).signature;
  if (revealed + 1 == n) {
    const Signature reduced = sig_opt(p, SigOptQuery::without(n, hidden->agent, hidden->object)).signature;
    if (signature_of(m, p) < reduced) return false;
    const Signature avoiding = sig_opt(p, SigOptQuery::forbidding(n, hidden->agent, hidden->object)).signature;
    return extended_signature_of(m, p) >= avoiding;
  }
  return false;
}

std::optional<Matching> exists_nrm(const TopKProfile& p) {
  const std::size_t n = p.size();
  RankMaximalResult first = rank_maximal_matching(revealed_labeled_graph(p));
  if (first.matching.size() == n && signature_of(first.matching, p) == sig_opt(p, SigOptQuery::whole(n)).signature) {
    return std::move(first.matching);
  }
  for (const Pair& pr : unrevealed_pairs(p)) {
    Matching candidate = reduced_rank_maximal(p, pr.agent, pr.object);
    candidate.add(pr.agent, pr.object);
    if (check_nrm(p, candidate)) return candidate;
  }
  return std::nullopt;
}

bool brute_force_nrm_check(const TopKProfile& p, const Matching& m) {
  if (p.size() > 6) throw Refused("brute_force_nrm_check supports n <= 6");
  const Completions all = completions(p);
  if (all.count() > 1'000'000) throw Refused("brute_force_nrm_check: more than 10^6 completions");
  require_full(m, p.size());
  for (const FullProfile& r : all) {
    if (!is_rank_maximal(r, m)) return false;
  }
  return true;
}

} // namespace necmatch
