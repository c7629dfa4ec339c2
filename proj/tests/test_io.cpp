#include "doctest.h"
#include "oracles.hpp"

#include "necmatch/errors.hpp"
#include "necmatch/io.hpp"

#include <string>

using namespace necmatch;
using namespace necmatch::testing;

namespace {

const char* kWorked = R"({
  "n": 3,
  "agents": ["a1", "a2", "a3"],
  "objects": ["o1", "o2", "o3"],
  "kind": "topk",
  "preferences": {"a1": ["o1", "o2", "o3"], "a2": ["o1", "o2"], "a3": ["o1"]}
})";

std::string error_of(const std::string& text) {
  try {
    parse_instance(text);
  } catch (const InvalidInput& e) {
    return e.what();
  }
  return {};
}

} // namespace

TEST_CASE("parse the worked-example document") {
  const InstanceDocument doc = parse_instance(kWorked);
  CHECK_FALSE(doc.is_full());
  CHECK(doc.as_topk() == worked_profile());
  CHECK(doc.as_topk().revealed_counts() == std::vector<std::size_t>{3, 2, 1});
  CHECK(doc.names == Names::defaults(3));
  CHECK_THROWS_AS(doc.full(), InvalidInput);
}

TEST_CASE("parse a full document with custom names") {
  const InstanceDocument doc = parse_instance(R"({"n": 2, "agents": ["ann", "bob"], "objects": ["desk", "door"],
    "kind": "full", "preferences": {"bob": ["door", "desk"], "ann": ["desk", "door"]}})");
  REQUIRE(doc.is_full());
  CHECK(doc.full().at(agent(1), 1) == object(1));
  CHECK(doc.names.agent_named("bob") == agent(1));
  CHECK(parse_matching(R"({"assignment": {"ann": "door", "bob": "desk"}})", doc.names) ==
        Matching::from_assignment(objects_of({1, 0})));
}

TEST_CASE("diagnostics name the offending field") {
  CHECK(error_of(R"({"n": 3, "kind": "topk", "preferences": {"a1": ["o1", "o1"]}})").find("preferences.a1[1]") !=
        std::string::npos);
  CHECK(error_of(R"({"n": 3, "kind": "topk", "preferences": {"a1": ["o1", "o1"]}})").find("duplicate object") !=
        std::string::npos);
  CHECK(error_of(R"({"n": 3, "kind": "topk", "preferences": {"a1": ["o9"]}})").find("unknown object") != std::string::npos);
  CHECK(error_of(R"({"n": 3, "kind": "topk", "preferences": {"a7": []}})").find("preferences.a7") != std::string::npos);
  CHECK(error_of(R"({"n": 2, "agents": ["x", "x"], "kind": "topk", "preferences": {}})").find("agents[1]") !=
        std::string::npos);
  CHECK(error_of(R"({"n": 2, "kind": "full", "preferences": {"a1": ["o1", "o2"]}})").find("a2") != std::string::npos);
  CHECK(error_of(R"({"n": 2, "kind": "full", "preferences": {"a1": ["o1"], "a2": ["o1", "o2"]}})")
            .find("preferences.a1") != std::string::npos);
  CHECK(error_of(R"({"n": 0, "kind": "topk", "preferences": {}})").find("n:") != std::string::npos);
  CHECK(error_of(R"({"n": 2, "kind": "weak", "preferences": {}})").find("kind") != std::string::npos);
  CHECK(error_of(R"({"n": 2, "kind": "topk"})").find("preferences") != std::string::npos);
  CHECK(error_of("{\"n\": 2,\n \"kind\": }").find("line 2") != std::string::npos);
  CHECK_THROWS_AS(parse_matching(R"({"assignment": {"a1": "o1", "a2": "o1"}})", Names::defaults(2)), InvalidInput);
  CHECK_THROWS_AS(parse_matching(R"({"assign": {}})", Names::defaults(2)), InvalidInput);
}

TEST_CASE("instances and matchings round-trip") {
  Rng rng(81);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 7;
    const InstanceDocument full = make_document(random_full_profile(n, rng));
    CHECK(parse_instance(serialize_instance(full)) == full);
    const InstanceDocument topk = make_document(random_topk_profile(n, rng));
    CHECK(parse_instance(serialize_instance(topk)) == topk);
    Matching m(n);
    for (const Pair& p : random_full_matching(n, rng).pairs()) {
      if (rng() % 3 != 0) m.add(p.agent, p.object);
    }
    CHECK(parse_matching(serialize_matching(m, full.names), full.names) == m);
  }
}

TEST_CASE("transcripts round-trip") {
  ElicitationTranscript t;
  t.n = 2;
  t.events = {{1, agent(0), 1, object(1)}, {1, agent(1), 1, object(1)}, {2, agent(1), 2, object(0)}};
  t.k = {1, 2};
  t.s = {0, 1, 2};
  t.all_agent_rounds = 1;
  const Names names = Names::defaults(2);
  const Json j = transcript_to_json(t, names);
  CHECK(j["total"] == 3);
  CHECK(j["events"][2]["object"] == "o1");
  CHECK(transcript_from_json(j, names) == t);
}

TEST_CASE("enum names") {
  CHECK(goal_from_string(to_string(Goal::nrm)) == Goal::nrm);
  CHECK(strategy_from_string(to_string(Strategy::threshold)) == Strategy::threshold);
  CHECK_THROWS_AS(goal_from_string("po"), InvalidInput);
}
