#include "necmatch/io.hpp"

#include "necmatch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace necmatch {

namespace {

[[noreturn]] void fail(std::string_view where, std::string_view what) {
  throw InvalidInput(std::string(where) + ": " + std::string(what));
}

const Json& member(const Json& doc, const char* key, std::string_view where) {
  const auto it = doc.find(key);
  if (it == doc.end()) fail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

std::vector<std::string> name_list(const Json& v, std::size_t n, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of strings");
  if (v.size() != n) fail(where, "expected " + std::to_string(n) + " names, got " + std::to_string(v.size()));
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    if (!v[i].is_string()) fail(at, "expected a string");
    std::string name = v[i].get<std::string>();
    if (name.empty()) fail(at, "empty name");
    if (!seen.insert(name).second) fail(at, "duplicate name \"" + name + "\"");
    out.push_back(std::move(name));
  }
  return out;
}

template <class Id>
Id lookup(const std::vector<std::string>& names, std::string_view name, const char* kind) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw InvalidInput(std::string("unknown ") + kind + " \"" + std::string(name) + "\"");
  return static_cast<Id>(it - names.begin());
}

} // namespace

Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw InvalidInput(std::string(what) + ": " + e.what());
  }
}

Names Names::defaults(std::size_t n) {
  Names names;
  for (std::size_t i = 1; i <= n; ++i) {
    names.agents.push_back("a" + std::to_string(i));
    names.objects.push_back("o" + std::to_string(i));
  }
  return names;
}

AgentId Names::agent_named(std::string_view name) const { return lookup<AgentId>(agents, name, "agent"); }
ObjectId Names::object_named(std::string_view name) const { return lookup<ObjectId>(objects, name, "object"); }

std::size_t InstanceDocument::size() const noexcept {
  return std::visit([](const auto& p) { return p.size(); }, profile);
}

TopKProfile InstanceDocument::as_topk() const {
  if (const auto* f = std::get_if<FullProfile>(&profile)) return f->as_topk();
  return std::get<TopKProfile>(profile);
}

const FullProfile& InstanceDocument::full() const {
  const auto* f = std::get_if<FullProfile>(&profile);
  if (!f) throw InvalidInput("a complete (kind \"full\") instance is required");
  return *f;
}

InstanceDocument make_document(FullProfile p) {
  Names names = Names::defaults(p.size());
  return {std::move(names), std::move(p)};
}

InstanceDocument make_document(TopKProfile p) {
  Names names = Names::defaults(p.size());
  return {std::move(names), std::move(p)};
}

InstanceDocument instance_from_json(const Json& doc) {
  if (!doc.is_object()) fail("instance", "expected a JSON object");
  const Json& jn = member(doc, "n", "instance");
  if (!jn.is_number_unsigned() || jn.get<std::uint64_t>() == 0) fail("n", "expected a positive integer");
  const auto n = jn.get<std::size_t>();

  Names names = Names::defaults(n);
  if (doc.contains("agents")) names.agents = name_list(doc["agents"], n, "agents");
  if (doc.contains("objects")) names.objects = name_list(doc["objects"], n, "objects");

  const Json& jkind = member(doc, "kind", "instance");
  if (!jkind.is_string() || (jkind != "full" && jkind != "topk")) fail("kind", "expected \"full\" or \"topk\"");
  const bool full = jkind == "full";

  const Json& prefs = member(doc, "preferences", "instance");
  if (!prefs.is_object()) fail("preferences", "expected an object keyed by agent name");
  std::vector<std::vector<ObjectId>> lists(n);
  std::vector<char> given(n, 0);
  for (const auto& [key, list] : prefs.items()) {
    const std::string where = "preferences." + key;
    const auto a = std::find(names.agents.begin(), names.agents.end(), key);
    if (a == names.agents.end()) fail(where, "unknown agent");
    const auto i = static_cast<std::size_t>(a - names.agents.begin());
    given[i] = 1;
    if (!list.is_array()) fail(where, "expected an array of object names");
    if (list.size() > n) fail(where, "more than n objects");
    if (full && list.size() != n) fail(where, "a full ranking must list all " + std::to_string(n) + " objects");
    std::vector<char> used(n, 0);
    for (std::size_t pos = 0; pos < list.size(); ++pos) {
      const std::string at = where + "[" + std::to_string(pos) + "]";
      if (!list[pos].is_string()) fail(at, "expected an object name");
      const auto name = list[pos].get<std::string>();
      const auto o = std::find(names.objects.begin(), names.objects.end(), name);
      if (o == names.objects.end()) fail(at, "unknown object \"" + name + "\"");
      const auto j = static_cast<std::size_t>(o - names.objects.begin());
      if (used[j]) fail(at, "duplicate object \"" + name + "\"");
      used[j] = 1;
      lists[i].push_back(object(j));
    }
  }
  if (full) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!given[i]) fail("preferences", "missing ranking for agent \"" + names.agents[i] + "\"");
    }
    return {std::move(names), FullProfile(n, std::move(lists))};
  }
  return {std::move(names), TopKProfile(n, std::move(lists))};
}

InstanceDocument parse_instance(std::string_view text) { return instance_from_json(parse_json(text, "instance")); }

Json instance_to_json(const InstanceDocument& doc) {
  const std::size_t n = doc.size();
  Json out;
  out["n"] = n;
  out["agents"] = doc.names.agents;
  out["objects"] = doc.names.objects;
  out["kind"] = doc.is_full() ? "full" : "topk";
  Json prefs = Json::object();
  const TopKProfile p = doc.as_topk();
  for (std::size_t i = 0; i < n; ++i) {
    Json list = Json::array();
    for (ObjectId o : p.prefix(agent(i))) list.push_back(doc.names.objects[index(o)]);
    prefs[doc.names.agents[i]] = std::move(list);
  }
  out["preferences"] = std::move(prefs);
  return out;
}

std::string serialize_instance(const InstanceDocument& doc) { return instance_to_json(doc).dump(2); }

Matching matching_from_json(const Json& doc, const Names& names) {
  if (!doc.is_object()) fail("matching", "expected a JSON object");
  const Json& assignment = member(doc, "assignment", "matching");
  if (!assignment.is_object()) fail("assignment", "expected an object mapping agents to objects");
  Matching m(names.agents.size());
  for (const auto& [key, value] : assignment.items()) {
    const std::string where = "assignment." + key;
    if (!value.is_string()) fail(where, "expected an object name");
    try {
      m.add(names.agent_named(key), names.object_named(value.get<std::string>()));
    } catch (const InvalidInput& e) {
      fail(where, e.what());
    }
  }
  return m;
}

Matching parse_matching(std::string_view text, const Names& names) {
  return matching_from_json(parse_json(text, "matching"), names);
}

Json matching_to_json(const Matching& m, const Names& names) {
  Json assignment = Json::object();
  for (const Pair& p : m.pairs()) assignment[names.agents.at(index(p.agent))] = names.objects.at(index(p.object));
  Json out;
  out["assignment"] = std::move(assignment);
  return out;
}

std::string serialize_matching(const Matching& m, const Names& names) { return matching_to_json(m, names).dump(2); }

Json signature_to_json(const Signature& s) {
  return Json(std::vector<std::uint32_t>(s.counts().begin(), s.counts().end()));
}

Json transcript_to_json(const ElicitationTranscript& t, const Names& names) {
  Json events = Json::array();
  for (const QueryEvent& e : t.events) {
    events.push_back({{"round", e.round},
                      {"agent", names.agents.at(index(e.agent))},
                      {"position", e.position},
                      {"object", names.objects.at(index(e.object))}});
  }
  Json out;
  out["n"] = t.n;
  out["total"] = t.total();
  out["k"] = t.k;
  out["s"] = t.s;
  out["all_agent_rounds"] = t.all_agent_rounds;
  out["events"] = std::move(events);
  return out;
}

ElicitationTranscript transcript_from_json(const Json& doc, const Names& names) {
  try {
    ElicitationTranscript t;
    t.n = doc.at("n").get<std::size_t>();
    t.k = doc.at("k").get<std::vector<std::size_t>>();
    t.s = doc.at("s").get<std::vector<std::size_t>>();
    t.all_agent_rounds = doc.at("all_agent_rounds").get<std::size_t>();
    for (const Json& e : doc.at("events")) {
      t.events.push_back({e.at("round").get<std::size_t>(), names.agent_named(e.at("agent").get<std::string>()),
                          e.at("position").get<std::size_t>(), names.object_named(e.at("object").get<std::string>())});
    }
    return t;
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("transcript: ") + e.what());
  }
}

Json run_record_to_json(const RunRecord& r) {
  Json out;
  out["n"] = r.n;
  out["instance"] = r.instance;
  out["alg"] = r.alg_total;
  out["opt"] = r.opt_total;
  out["opt_exact"] = r.opt_exact;
  out["ratio"] = std::isfinite(r.ratio) ? Json(r.ratio) : Json(nullptr);
  out["bound"] = r.bound > 0 ? Json(r.bound) : Json(nullptr);
  out["s"] = r.s;
  out["m"] = r.all_agent_rounds;
  out["x"] = r.x;
  out["claim_holds"] = r.claim_holds;
  out["verified"] = r.result_verified;
  return out;
}

Json report_summary_to_json(const ExperimentReport& report) {
  Json out;
  out["runs"] = report.runs.size();
  out["max_ratio"] = report.max_ratio();
  out["bound_violations"] = report.bound_violations();
  out["claim_violations"] = report.claim_violations();
  out["unverified"] = report.unverified();
  std::size_t alg = 0;
  std::size_t opt = 0;
  for (const RunRecord& r : report.runs) {
    alg += r.alg_total;
    opt += r.opt_total;
  }
  out["alg_total"] = alg;
  out["opt_total"] = opt;
  return out;
}

std::string_view to_string(Goal g) noexcept { return g == Goal::npo ? "npo" : "nrm"; }
std::string_view to_string(Strategy s) noexcept { return s == Strategy::threshold ? "threshold" : "naive"; }

Goal goal_from_string(std::string_view s) {
  if (s == "npo") return Goal::npo;
  if (s == "nrm") return Goal::nrm;
  throw InvalidInput("goal must be \"npo\" or \"nrm\"");
}

Strategy strategy_from_string(std::string_view s) {
  if (s == "threshold") return Strategy::threshold;
  if (s == "naive") return Strategy::naive;
  throw InvalidInput("strategy must be \"threshold\" or \"naive\"");
}

} // namespace necmatch
