#include "necmatch/necmatch.h"

#include "necmatch/errors.hpp"
#include "necmatch/http_server.hpp"
#include "necmatch/io.hpp"
#include "necmatch/npo.hpp"
#include "necmatch/nrm.hpp"
#include "necmatch/session.hpp"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <optional>
#include <string>

using namespace necmatch;

struct nm_instance {
  InstanceDocument doc;
};

struct nm_matching {
  Matching m;
};

struct nm_server {
  SessionRegistry registry;
  SessionServer server;

  nm_server(std::optional<std::filesystem::path> log_dir, ServerOptions options)
      : registry(std::move(log_dir)), server(registry, std::move(options)) {}
};

namespace {

thread_local std::string last_error;

nm_status fail(nm_status code, const char* what) {
  last_error = what;
  return code;
}

/// Runs f, translating exceptions into status codes.
template <class F>
nm_status guard(F&& f) noexcept {
  try {
    f();
    last_error.clear();
    return NM_OK;
  } catch (const InvalidInput& e) {
    return fail(NM_E_INVALID, e.what());
  } catch (const ProtocolError& e) {
    return fail(NM_E_PROTOCOL, e.what());
  } catch (const Refused& e) {
    return fail(NM_E_REFUSED, e.what());
  } catch (const InternalError& e) {
    return fail(NM_E_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(NM_E_NOMEM, "out of memory");
  } catch (const std::exception& e) {
    return fail(NM_E_IO, e.what());
  } catch (...) {
    return fail(NM_E_INTERNAL, "unknown exception");
  }
}

void require(const void* p, const char* what) {
  if (!p) throw InvalidInput(std::string(what) + " must not be NULL");
}

char* copy_out(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

SigOptQuery query_from_json(const Json& j, const Names& names) {
  const std::size_t n = names.agents.size();
  SigOptQuery q = SigOptQuery::whole(n);
  try {
    if (j.contains("agents")) {
      q.agents.clear();
      for (const auto& a : j.at("agents")) q.agents.push_back(names.agent_named(a.get<std::string>()));
    }
    if (j.contains("objects")) {
      q.objects.clear();
      for (const auto& o : j.at("objects")) q.objects.push_back(names.object_named(o.get<std::string>()));
    }
    if (j.contains("forbidden")) {
      for (const auto& f : j.at("forbidden")) {
        if (!f.is_array() || f.size() != 2) throw InvalidInput("forbidden: expected [agent, object] pairs");
        q.forbidden.push_back({names.agent_named(f[0].get<std::string>()), names.object_named(f[1].get<std::string>())});
      }
    }
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("query: ") + e.what());
  }
  return q;
}

Json elicitation_to_json(const ElicitationResult& r, const Names& names) {
  Json out = matching_to_json(r.matching, names);
  out["transcript"] = transcript_to_json(r.transcript, names);
  out["profile"] = instance_to_json({names, r.profile});
  return out;
}

Family family_from_string(std::string_view s) {
  if (s == "random") return Family::random_full;
  if (s == "npo-lb") return Family::npo_lower_bound;
  if (s == "nrm-lb") return Family::nrm_lower_bound;
  throw InvalidInput("family must be \"random\", \"npo-lb\" or \"nrm-lb\"");
}

ExperimentConfig experiment_from_json(const Json& j) {
  ExperimentConfig c;
  try {
    c.family = family_from_string(j.value("family", std::string("random")));
    c.goal = goal_from_string(j.value("goal", std::string(c.family == Family::nrm_lower_bound ? "nrm" : "npo")));
    c.strategy = strategy_from_string(j.value("strategy", std::string(c.goal == Goal::nrm ? "naive" : "threshold")));
    c.sizes = j.at("sizes").get<std::vector<std::size_t>>();
    c.instances_per_size = j.value("instances", std::size_t{1});
    c.adaptive = j.value("adaptive", false);
    c.seed = j.value("seed", std::uint64_t{1});
    c.threads = j.value("threads", std::size_t{1});
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("bench config: ") + e.what());
  }
  return c;
}

} // namespace

extern "C" {

const char* nm_version(void) { return "1.0.0"; }

const char* nm_last_error(void) { return last_error.c_str(); }

void nm_string_free(char* s) { std::free(s); }

nm_status nm_instance_parse(const char* json, nm_instance** out) {
  return guard([&] {
    require(json, "json");
    require(out, "out");
    *out = new nm_instance{parse_instance(json)};
  });
}

nm_status nm_instance_to_json(const nm_instance* inst, char** out) {
  return guard([&] {
    require(inst, "instance");
    require(out, "out");
    *out = copy_out(serialize_instance(inst->doc));
  });
}

size_t nm_instance_size(const nm_instance* inst) { return inst ? inst->doc.size() : 0; }

void nm_instance_free(nm_instance* inst) { delete inst; }

nm_status nm_matching_parse(const nm_instance* inst, const char* json, nm_matching** out) {
  return guard([&] {
    require(inst, "instance");
    require(json, "json");
    require(out, "out");
    *out = new nm_matching{parse_matching(json, inst->doc.names)};
  });
}

nm_status nm_matching_to_json(const nm_instance* inst, const nm_matching* m, char** out) {
  return guard([&] {
    require(inst, "instance");
    require(m, "matching");
    require(out, "out");
    *out = copy_out(serialize_matching(m->m, inst->doc.names));
  });
}

void nm_matching_free(nm_matching* m) { delete m; }

nm_status nm_check_npo(const nm_instance* inst, const nm_matching* m, int* out) {
  return guard([&] {
    require(inst, "instance");
    require(m, "matching");
    require(out, "out");
    *out = check_npo(inst->doc.as_topk(), m->m) ? 1 : 0;
  });
}

nm_status nm_check_nrm(const nm_instance* inst, const nm_matching* m, int* out) {
  return guard([&] {
    require(inst, "instance");
    require(m, "matching");
    require(out, "out");
    *out = check_nrm(inst->doc.as_topk(), m->m) ? 1 : 0;
  });
}

nm_status nm_exists_npo(const nm_instance* inst, nm_matching** out) {
  return guard([&] {
    require(inst, "instance");
    require(out, "out");
    auto m = exists_npo(inst->doc.as_topk());
    *out = m ? new nm_matching{std::move(*m)} : nullptr;
  });
}

nm_status nm_exists_nrm(const nm_instance* inst, nm_matching** out) {
  return guard([&] {
    require(inst, "instance");
    require(out, "out");
    auto m = exists_nrm(inst->doc.as_topk());
    *out = m ? new nm_matching{std::move(*m)} : nullptr;
  });
}

nm_status nm_sig_opt(const nm_instance* inst, const char* query, char** out) {
  return guard([&] {
    require(inst, "instance");
    require(out, "out");
    const Names& names = inst->doc.names;
    const SigOptQuery q =
        query ? query_from_json(parse_json(query, "query"), names) : SigOptQuery::whole(inst->doc.size());
    const SigOptResult r = sig_opt(inst->doc.as_topk(), q);
    Json result;
    result["signature"] = signature_to_json(r.signature);
    result["assignment"] = matching_to_json(r.witness, names)["assignment"];
    *out = copy_out(result.dump(2));
  });
}

nm_status nm_elicit(const nm_instance* truth, const char* goal, const char* strategy, char** out) {
  return guard([&] {
    require(truth, "truth");
    require(goal, "goal");
    require(strategy, "strategy");
    require(out, "out");
    StaticOracle oracle(truth->doc.full());
    Elicitor e(oracle.size(), strategy_from_string(strategy), goal_from_string(goal));
    *out = copy_out(elicitation_to_json(run_elicitor(e, oracle), truth->doc.names).dump(2));
  });
}

nm_status nm_elicit_adversary(const char* family, size_t n, const char* strategy, char** out) {
  return guard([&] {
    require(family, "family");
    require(strategy, "strategy");
    require(out, "out");
    const Names names = Names::defaults(n);
    const std::string_view f = family;
    Json result;
    if (f == "npo") {
      NpoAdaptiveAdversary adversary(n);
      Elicitor e(n, strategy_from_string(strategy), Goal::npo);
      result = elicitation_to_json(run_elicitor(e, adversary), names);
      result["committed"] = instance_to_json(make_document(adversary.committed_instance()));
    } else if (f == "nrm") {
      NrmAdaptiveAdversary adversary(n);
      Elicitor e(n, strategy_from_string(strategy), Goal::nrm);
      result = elicitation_to_json(run_elicitor(e, adversary), names);
      result["committed"] = instance_to_json(make_document(adversary.committed_instance()));
    } else {
      throw InvalidInput("adversary family must be \"npo\" or \"nrm\"");
    }
    *out = copy_out(result.dump(2));
  });
}

nm_status nm_gen_npo_lb(size_t n, const size_t* t, size_t t_len, nm_instance** out) {
  return guard([&] {
    require(out, "out");
    if (t_len > 0) require(t, "t");
    NpoLowerBoundParams p{n, std::vector<std::size_t>(t, t + t_len)};
    *out = new nm_instance{make_document(gen_npo_lb_instance(p))};
  });
}

nm_status nm_gen_nrm_lb(size_t n, const unsigned char* specials, size_t len, nm_instance** out) {
  return guard([&] {
    require(out, "out");
    if (len > 0) require(specials, "specials");
    NrmLowerBoundParams p{n, {}};
    for (size_t i = 0; i < len; ++i) {
      if (specials[i] > 1) throw InvalidInput("specials: expected 0 or 1");
      p.specials.push_back(specials[i] ? BlockSpecial::second : BlockSpecial::first);
    }
    *out = new nm_instance{make_document(gen_nrm_lb_instance(p))};
  });
}

nm_status nm_bench(const char* config, nm_line_fn on_record, void* user, char** summary) {
  return guard([&] {
    require(config, "config");
    require(summary, "summary");
    const ExperimentReport report = run_competitive_experiment(experiment_from_json(parse_json(config, "config")));
    if (on_record) {
      for (const RunRecord& r : report.runs) on_record(run_record_to_json(r).dump().c_str(), user);
    }
    *summary = copy_out(report_summary_to_json(report).dump());
  });
}

nm_status nm_server_create(const char* log_dir, const char* static_dir, nm_server** out) {
  return guard([&] {
    require(out, "out");
    std::optional<std::filesystem::path> logs;
    if (log_dir) logs = log_dir;
    ServerOptions options;
    if (static_dir) options.static_dir = static_dir;
    *out = new nm_server(std::move(logs), std::move(options));
  });
}

nm_status nm_server_bind(nm_server* s, const char* host, int port, int* bound_port) {
  return guard([&] {
    require(s, "server");
    require(host, "host");
    const int p = s->server.bind(host, port);
    if (bound_port) *bound_port = p;
  });
}

nm_status nm_server_run(nm_server* s) {
  return guard([&] {
    require(s, "server");
    s->server.run();
  });
}

nm_status nm_server_start(nm_server* s) {
  return guard([&] {
    require(s, "server");
    s->server.start();
  });
}

void nm_server_stop(nm_server* s) {
  if (s) s->server.stop();
}

void nm_server_free(nm_server* s) { delete s; }

} // extern "C"
