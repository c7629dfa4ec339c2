#include "necmatch/http_server.hpp"

#include "necmatch/errors.hpp"
#include "necmatch/npo.hpp"
#include "necmatch/nrm.hpp"

#include <httplib.h>

#include <thread>

namespace necmatch {

namespace {

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

/// Maps library exceptions onto status codes.
template <class F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const NotFound& e) {
    reply(res, 404, {{"error", e.what()}});
  } catch (const OutOfTurn& e) {
    reply(res, 409, {{"error", e.what()}});
  } catch (const ProtocolError& e) {
    reply(res, 400, {{"error", e.what()}});
  } catch (const InvalidInput& e) {
    reply(res, 400, {{"error", e.what()}});
  } catch (const std::exception& e) {
    reply(res, 500, {{"error", e.what()}});
  }
}

Json body_json(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  Json j = parse_json(req.body, "request body");
  if (!j.is_object()) throw InvalidInput("request body: expected a JSON object");
  return j;
}

SessionConfig config_from_json(const Json& j) {
  SessionConfig c;
  try {
    if (j.contains("goal")) c.goal = goal_from_string(j.at("goal").get<std::string>());
    if (j.contains("strategy")) {
      c.strategy = strategy_from_string(j.at("strategy").get<std::string>());
    } else if (c.goal == Goal::nrm) {
      c.strategy = Strategy::naive;
    }
    if (j.contains("agents")) {
      c.names.agents = j.at("agents").get<std::vector<std::string>>();
    } else if (j.contains("n")) {
      const auto n = j.at("n").get<std::int64_t>();
      if (n < 1 || n > 500) throw InvalidInput("n: expected 1 <= n <= 500");
      c.names = Names::defaults(static_cast<std::size_t>(n));
    } else {
      throw InvalidInput("give either \"agents\" or \"n\"");
    }
    if (j.contains("objects")) {
      c.names.objects = j.at("objects").get<std::vector<std::string>>();
    } else {
      c.names.objects = Names::defaults(c.names.agents.size()).objects;
    }
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("request body: ") + e.what());
  }
  return c;
}

Json query_json(const SessionSnapshot& snap, AgentId a, std::optional<std::size_t> position) {
  const Names& names = snap.config.names;
  Json out;
  out["agent"] = names.agents[index(a)];
  out["state"] = to_string(snap.state);
  switch (snap.state) {
  case SessionState::done: out["status"] = "done"; break;
  case SessionState::aborted: out["status"] = "aborted"; break;
  default: out["status"] = position ? "ask" : "wait"; break;
  }
  Json revealed = Json::array();
  Json remaining = Json::array();
  for (ObjectId o : snap.profile.prefix(a)) revealed.push_back(names.objects[index(o)]);
  for (std::size_t j = 0; j < names.objects.size(); ++j) {
    if (!snap.profile.revealed(a, object(j))) remaining.push_back(names.objects[j]);
  }
  out["revealed"] = std::move(revealed);
  if (position) {
    out["position"] = *position;
    out["round"] = snap.round;
    out["remaining"] = std::move(remaining);
  }
  return out;
}

} // namespace

struct SessionServer::Impl {
  SessionRegistry& registry;
  ServerOptions options;
  httplib::Server server;
  std::thread worker;

  Impl(SessionRegistry& r, ServerOptions o) : registry(r), options(std::move(o)) { routes(); }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });

    server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto s = registry.create(config_from_json(body_json(req)));
        const auto snap = s->snapshot();
        Json tokens = Json::object();
        for (std::size_t i = 0; i < s->tokens().size(); ++i) tokens[snap->config.names.agents[i]] = s->tokens()[i];
        reply(res, 201, {{"id", s->id()}, {"state", to_string(snap->state)}, {"tokens", std::move(tokens)}});
      });
    });

    server.Get("/sessions", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { reply(res, 200, {{"sessions", registry.ids()}}); });
    });

    server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { reply(res, 200, snapshot_to_json(*registry.find(req.matches[1])->snapshot())); });
    });

    server.Get(R"(/sessions/([^/]+)/agents/([^/]+)/query)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto s = registry.find(req.matches[1]);
        const std::string token = req.matches[2];
        const AgentId a = s->join(token);
        auto position = s->pending_query(token);
        auto snap = s->snapshot();
        std::chrono::milliseconds wait{0};
        if (req.has_param("wait")) {
          try {
            wait = std::chrono::milliseconds(std::stoll(req.get_param_value("wait")));
          } catch (const std::exception&) {
            throw InvalidInput("wait: expected milliseconds");
          }
          wait = std::clamp(wait, std::chrono::milliseconds(0), options.max_poll);
        }
        const auto deadline = std::chrono::steady_clock::now() + wait;
        while (!position && (snap->state == SessionState::registering || snap->state == SessionState::eliciting)) {
          const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
          if (left.count() <= 0) break;
          s->wait_for_change(snap->version, left);
          position = s->pending_query(token);
          snap = s->snapshot();
        }
        reply(res, 200, query_json(*snap, a, position));
      });
    });

    server.Post(R"(/sessions/([^/]+)/agents/([^/]+)/answer)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto s = registry.find(req.matches[1]);
        const Json body = body_json(req);
        if (!body.contains("object") || !body["object"].is_string()) throw InvalidInput("object: expected an object name");
        const std::string token = req.matches[2];
        s->submit(token, body["object"].get<std::string>());
        const auto snap = s->snapshot();
        reply(res, 200, {{"accepted", true}, {"state", to_string(snap->state)}, {"round", snap->round}});
      });
    });

    server.Post(R"(/sessions/([^/]+)/start)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto s = registry.find(req.matches[1]);
        s->start();
        reply(res, 200, snapshot_to_json(*s->snapshot()));
      });
    });

    server.Post(R"(/sessions/([^/]+)/abort)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto s = registry.find(req.matches[1]);
        s->abort();
        reply(res, 200, snapshot_to_json(*s->snapshot()));
      });
    });

    server.Get(R"(/sessions/([^/]+)/result)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto snap = registry.find(req.matches[1])->snapshot();
        if (snap->state != SessionState::done || !snap->result) throw OutOfTurn("no result yet");
        const bool certified = snap->config.goal == Goal::npo ? check_npo(snap->profile, *snap->result)
                                                              : check_nrm(snap->profile, *snap->result);
        Json out = matching_to_json(*snap->result, snap->config.names);
        out["goal"] = to_string(snap->config.goal);
        out["certified"] = certified;
        out["total"] = snap->transcript.total();
        out["profile"] = instance_to_json({snap->config.names, snap->profile});
        out["transcript"] = transcript_to_json(snap->transcript, snap->config.names);
        reply(res, 200, out);
      });
    });

    if (options.static_dir && !server.set_mount_point("/", options.static_dir->string())) {
      throw InvalidInput("static directory does not exist: " + options.static_dir->string());
    }
  }
};

SessionServer::SessionServer(SessionRegistry& registry, ServerOptions options)
    : impl_(std::make_unique<Impl>(registry, std::move(options))) {}

SessionServer::~SessionServer() { stop(); }

int SessionServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void SessionServer::run() { impl_->server.listen_after_bind(); }

void SessionServer::start() {
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void SessionServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

} // namespace necmatch
