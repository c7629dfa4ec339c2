#include "doctest.h"
#include "oracles.hpp"

#include "necmatch/core.hpp"
#include "necmatch/errors.hpp"

#include <set>

using namespace necmatch;
using namespace necmatch::testing;

namespace {

Signature sig(std::vector<std::uint32_t> v) { return Signature(std::move(v)); }

} // namespace

TEST_CASE("compare_signatures examples") {
  CHECK(compare_signatures(sig({1, 2, 0}), sig({1, 1, 1})) == std::strong_ordering::greater);
  CHECK(compare_signatures(sig({0, 0, 0}), sig({0, 0, 0})) == std::strong_ordering::equal);
  CHECK(compare_signatures(sig({2, 0, 0, 0}), sig({1, 3, 0, 0})) == std::strong_ordering::greater);
  CHECK(compare_signatures(sig({1, 1, 1}), sig({1, 2, 0})) == std::strong_ordering::less);
  CHECK_THROWS_AS(compare_signatures(sig({1, 2}), sig({1, 2, 0})), InvalidInput);
}

TEST_CASE("signature order is a total order") {
  Rng rng(11);
  std::uniform_int_distribution<std::uint32_t> entry(0, 3);
  std::vector<Signature> pool;
  for (int i = 0; i < 60; ++i) pool.push_back(sig({entry(rng), entry(rng), entry(rng), entry(rng)}));
  for (const auto& a : pool) {
    for (const auto& b : pool) {
      const auto ab = compare_signatures(a, b);
      const auto ba = compare_signatures(b, a);
      CHECK((ab == 0) == (a == b));
      CHECK((ab < 0) == (ba > 0));
      for (const auto& c : pool) {
        if (ab > 0 && compare_signatures(b, c) > 0) CHECK(compare_signatures(a, c) > 0);
      }
    }
  }
}

TEST_CASE("signature_of on the worked example") {
  const TopKProfile p = worked_profile();
  CHECK(signature_of(worked_m(), p) == sig({1, 1, 1}));
  // M' under the completion R_3 = o1 > o3 > o2.
  const FullProfile r(3, {objects_of({0, 1, 2}), objects_of({0, 1, 2}), objects_of({0, 2, 1})});
  CHECK(signature_of(worked_m_prime(), r) == sig({1, 2, 0}));
  CHECK(signature_of(worked_m(), r) == sig({1, 1, 1}));
  CHECK(signature_of(worked_m(), TopKProfile::empty(3)) == sig({0, 0, 0}));
  CHECK_THROWS_AS(signature_of(Matching(3), p), InvalidInput);
}

TEST_CASE("extended signature") {
  const TopKProfile p = worked_profile();
  // a3's match o3 is unrevealed and lands at position n = 3.
  CHECK(extended_signature_of(worked_m_prime(), p) == sig({1, 1, 1}));
  CHECK(signature_of(worked_m_prime(), p) == sig({1, 1, 0}));
  CHECK(extended_signature_of(worked_m(), TopKProfile::empty(3)) == sig({0, 0, 3}));

  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const TopKProfile q = random_topk_profile(n, rng);
    const Matching m = random_full_matching(n, rng);
    const Signature s = signature_of(m, q);
    const Signature e = extended_signature_of(m, q);
    std::uint32_t hidden = 0;
    for (const Pair& pr : m.pairs()) hidden += q.revealed(pr.agent, pr.object) ? 0 : 1;
    for (std::size_t l = 1; l < n; ++l) CHECK(s[l] == e[l]);
    CHECK(e[n] == s[n] + hidden);
  }
}

TEST_CASE("extended signature equals signature on full profiles") {
  Rng rng(8);
  const FullProfile r = random_full_profile(5, rng);
  for (int t = 0; t < 20; ++t) {
    const Matching m = random_full_matching(5, rng);
    CHECK(extended_signature_of(m, r.as_topk()) == signature_of(m, r.as_topk()));
    CHECK(signature_of(m, r.as_topk()) == signature_of(m, r));
  }
}

TEST_CASE("completions enumerate C(P) exactly once") {
  const TopKProfile full = FullProfile(2, {objects_of({1, 0}), objects_of({0, 1})}).as_topk();
  CHECK(completions(full).count() == 1);
  std::size_t seen = 0;
  for (const FullProfile& r : completions(full)) {
    CHECK(r.as_topk() == full);
    ++seen;
  }
  CHECK(seen == 1);

  const TopKProfile p = worked_profile();
  CHECK(completions(p).count() == 2);

  const TopKProfile blank = TopKProfile::empty(3);
  CHECK(completions(blank).count() == 216);

  Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const TopKProfile q = random_topk_profile(1 + trial % 4, rng);
    std::set<std::vector<std::vector<ObjectId>>> distinct;
    for (const FullProfile& r : completions(q)) {
      std::vector<std::vector<ObjectId>> key;
      for (std::size_t i = 0; i < q.size(); ++i) {
        const auto pre = q.prefix(agent(i));
        const auto ranking = r.ranking(agent(i));
        CHECK(std::equal(pre.begin(), pre.end(), ranking.begin()));
        key.emplace_back(ranking.begin(), ranking.end());
      }
      distinct.insert(std::move(key));
    }
    CHECK(distinct.size() == completions(q).count());
  }
}

TEST_CASE("completions keep revealed positions, so sig_P counts a subset of sig_R") {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const TopKProfile q = random_topk_profile(3, rng);
    const Matching m = random_full_matching(3, rng);
    const Signature sp = signature_of(m, q);
    for (const FullProfile& r : completions(q)) {
      const Signature sr = signature_of(m, r);
      for (std::size_t l = 1; l <= 3; ++l) CHECK(sp[l] <= sr[l]);
    }
  }
}

TEST_CASE("is_pareto_optimal") {
  Rng rng(21);
  // Distinct top choices: everyone gets her top, which is PO.
  const FullProfile tops(3, {objects_of({0, 1, 2}), objects_of({1, 0, 2}), objects_of({2, 1, 0})});
  CHECK(is_pareto_optimal(tops, Matching::from_assignment(objects_of({0, 1, 2}))));
  const FullProfile swap(2, {objects_of({1, 0}), objects_of({0, 1})});
  CHECK_FALSE(is_pareto_optimal(swap, Matching::from_assignment(objects_of({0, 1}))));
  const FullProfile r(3, {objects_of({0, 1, 2}), objects_of({0, 1, 2}), objects_of({0, 2, 1})});
  CHECK(is_pareto_optimal(r, worked_m()));

  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 1 + trial % 5;
    const FullProfile rr = random_full_profile(n, rng);
    const Matching m = random_full_matching(n, rng);
    CHECK(is_pareto_optimal(rr, m) == pareto_by_definition(rr, m));
  }
}

TEST_CASE("is_rank_maximal") {
  const FullProfile r(3, {objects_of({0, 1, 2}), objects_of({0, 1, 2}), objects_of({0, 2, 1})});
  CHECK(is_rank_maximal(r, worked_m_prime()));
  CHECK_FALSE(is_rank_maximal(r, worked_m()));
  CHECK(is_rank_maximal(FullProfile(1, {objects_of({0})}), Matching::from_assignment(objects_of({0}))));
  const FullProfile same(3, {objects_of({0, 1, 2}), objects_of({0, 1, 2}), objects_of({0, 1, 2})});
  for (const Matching& m : all_full_matchings(3)) {
    CHECK(signature_of(m, same) == sig({1, 1, 1}));
    CHECK(is_rank_maximal(same, m));
  }
}

TEST_CASE("is_rank_maximal above the brute-force cutoff") {
  // n = 9: identity-top profile; the identity matching is the unique optimum.
  std::vector<std::vector<ObjectId>> rankings(9);
  for (std::size_t i = 0; i < 9; ++i) {
    rankings[i].push_back(object(i));
    for (std::size_t j = 0; j < 9; ++j) {
      if (j != i) rankings[i].push_back(object(j));
    }
  }
  const FullProfile r(9, rankings);
  std::vector<ObjectId> id(9), shifted(9);
  for (std::size_t i = 0; i < 9; ++i) {
    id[i] = object(i);
    shifted[i] = object((i + 1) % 9);
  }
  CHECK(is_rank_maximal(r, Matching::from_assignment(id)));
  CHECK_FALSE(is_rank_maximal(r, Matching::from_assignment(shifted)));
}

TEST_CASE("profile and matching validation") {
  CHECK_THROWS_AS(TopKProfile(2, {objects_of({0, 0}), {}}), InvalidInput);
  CHECK_THROWS_AS(TopKProfile(2, {objects_of({2}), {}}), InvalidInput);
  CHECK_THROWS_AS(FullProfile(2, {objects_of({0}), objects_of({0, 1})}), InvalidInput);
  Matching m(2);
  m.add(agent(0), object(1));
  CHECK_THROWS_AS(m.add(agent(1), object(1)), InvalidInput);
  CHECK_THROWS_AS(m.add(agent(0), object(0)), InvalidInput);
  TopKProfile p = TopKProfile::empty(2);
  p.reveal(agent(0), object(1));
  CHECK(p.rank(agent(0), object(1)) == 1);
  CHECK_THROWS_AS(p.reveal(agent(0), object(1)), InvalidInput);
}
