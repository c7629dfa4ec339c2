#include "necmatch/session.hpp"

#include "necmatch/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <unordered_set>

namespace necmatch {

std::string_view to_string(SessionState s) noexcept {
  switch (s) {
  case SessionState::registering: return "registering";
  case SessionState::eliciting: return "eliciting";
  case SessionState::done: return "done";
  case SessionState::aborted: return "aborted";
  }
  return "unknown";
}

std::string random_token() {
  std::random_device rd;
  std::string out;
  for (int i = 0; i < 4; ++i) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(rd()));
    out += buf;
  }
  return out;
}

void SessionConfig::validate() const {
  const std::size_t n = names.agents.size();
  if (n < 1 || n > 500) throw InvalidInput("a session needs between 1 and 500 agents");
  if (names.objects.size() != n) throw InvalidInput("a session needs as many objects as agents");
  for (const auto* list : {&names.agents, &names.objects}) {
    std::unordered_set<std::string> seen;
    for (const std::string& name : *list) {
      if (name.empty()) throw InvalidInput("names must be non-empty");
      if (!seen.insert(name).second) throw InvalidInput("duplicate name \"" + name + "\"");
    }
  }
  if (strategy == Strategy::threshold && goal == Goal::nrm) throw InvalidInput("the threshold strategy only targets NPO");
}

Json snapshot_to_json(const SessionSnapshot& s) {
  const Names& names = s.config.names;
  Json out;
  out["id"] = s.id;
  out["state"] = to_string(s.state);
  out["n"] = names.agents.size();
  out["goal"] = to_string(s.config.goal);
  out["strategy"] = to_string(s.config.strategy);
  out["agents"] = names.agents;
  out["objects"] = names.objects;
  Json joined = Json::array();
  for (char j : s.joined) joined.push_back(j != 0);
  out["joined"] = std::move(joined);
  out["round"] = s.round;
  out["s"] = s.s;
  Json pending = Json::array();
  for (std::size_t i : s.pending) pending.push_back(names.agents[i]);
  out["pending"] = std::move(pending);
  out["k"] = s.transcript.k;
  out["total"] = s.transcript.total();
  out["transcript"] = transcript_to_json(s.transcript, names);
  out["result"] = s.result ? matching_to_json(*s.result, names)["assignment"] : Json(nullptr);
  out["version"] = s.version;
  return out;
}

// ---------------------------------------------------------------------------
// EventLog

EventLog::EventLog(std::filesystem::path path) : path_(std::move(path)), out_(path_, std::ios::app) {
  if (!out_) throw std::runtime_error("cannot open event log " + path_.string());
}

void EventLog::append(const Json& event) {
  out_ << event.dump() << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("cannot write event log " + path_.string());
}

void EventLog::append_raw(std::string_view text) {
  out_ << text;
  out_.flush();
  if (!out_) throw std::runtime_error("cannot write event log " + path_.string());
}

std::vector<Json> EventLog::read(const std::filesystem::path& path, std::uintmax_t* intact_bytes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open event log " + path.string());
  std::vector<Json> events;
  std::string line;
  std::size_t number = 0;
  std::uintmax_t intact = 0;
  while (std::getline(in, line)) {
    ++number;
    const bool terminated = !in.eof();
    if (!line.empty()) {
      try {
        events.push_back(Json::parse(line));
      } catch (const Json::parse_error&) {
        // A torn final line from a crash is dropped; anything earlier is corrupt.
        if (in.peek() == std::ifstream::traits_type::eof()) break;
        throw InvalidInput(path.string() + ":" + std::to_string(number) + ": malformed event");
      }
    }
    intact += line.size() + (terminated ? 1 : 0);
  }
  if (intact_bytes) *intact_bytes = intact;
  return events;
}

// ---------------------------------------------------------------------------
// Session

Session::Session(std::string id, SessionConfig config, std::vector<std::string> tokens, std::unique_ptr<EventLog> log)
    : id_(std::move(id)), config_(std::move(config)), tokens_(std::move(tokens)), log_(std::move(log)) {
  config_.validate();
  const std::size_t n = config_.names.agents.size();
  if (tokens_.size() != n) throw InvalidInput("one join token per agent is required");
  joined_.assign(n, 0);
  Json tokens_json = Json::object();
  for (std::size_t i = 0; i < n; ++i) tokens_json[config_.names.agents[i]] = tokens_[i];
  record({{"type", "created"},
          {"id", id_},
          {"goal", to_string(config_.goal)},
          {"strategy", to_string(config_.strategy)},
          {"agents", config_.names.agents},
          {"objects", config_.names.objects},
          {"tokens", std::move(tokens_json)}});
  publish();
}

std::unique_ptr<Session> Session::replay(const std::filesystem::path& log_path) {
  std::uintmax_t intact = 0;
  const std::vector<Json> events = EventLog::read(log_path, &intact);
  if (events.empty() || events.front().value("type", "") != "created") {
    throw InvalidInput(log_path.string() + ": log does not start with a created event");
  }
  std::unique_ptr<Session> session;
  try {
    const Json& c = events.front();
    SessionConfig config;
    config.goal = goal_from_string(c.at("goal").get<std::string>());
    config.strategy = strategy_from_string(c.at("strategy").get<std::string>());
    config.names.agents = c.at("agents").get<std::vector<std::string>>();
    config.names.objects = c.at("objects").get<std::vector<std::string>>();
    std::vector<std::string> tokens;
    for (const std::string& a : config.names.agents) tokens.push_back(c.at("tokens").at(a).get<std::string>());
    session = std::make_unique<Session>(c.at("id").get<std::string>(), std::move(config), std::move(tokens), nullptr);
    std::lock_guard lock(session->mutex_);
    session->replaying_ = true;
    const Names& names = session->config_.names;
    for (std::size_t i = 1; i < events.size(); ++i) {
      const Json& e = events[i];
      const std::string type = e.at("type").get<std::string>();
      if (type == "joined") {
        session->join_locked(names.agent_named(e.at("agent").get<std::string>()));
      } else if (type == "answer") {
        session->submit_locked(names.agent_named(e.at("agent").get<std::string>()),
                               names.object_named(e.at("object").get<std::string>()));
      } else if (type == "aborted") {
        session->state_ = SessionState::aborted;
      } else {
        throw InvalidInput("unknown event type \"" + type + "\"");
      }
    }
    session->replaying_ = false;
  } catch (const Json::exception& e) {
    throw InvalidInput(log_path.string() + ": " + e.what());
  }
  // Cut a torn tail so later appends start on a fresh line.
  std::filesystem::resize_file(log_path, intact);
  session->log_ = std::make_unique<EventLog>(log_path);
  if (intact > 0) {
    std::ifstream tail(log_path, std::ios::binary);
    tail.seekg(-1, std::ios::end);
    if (tail.get() != '\n') session->log_->append_raw("\n");
  }
  session->publish();
  return session;
}

AgentId Session::agent_of(const std::string& token) const {
  const auto it = std::find(tokens_.begin(), tokens_.end(), token);
  if (it == tokens_.end()) throw NotFound("unknown join token");
  return agent(static_cast<std::size_t>(it - tokens_.begin()));
}

void Session::record(const Json& event) {
  if (log_ && !replaying_) log_->append(event);
}

AgentId Session::join_locked(AgentId a) {
  if (joined_[index(a)]) return a;
  joined_[index(a)] = 1;
  record({{"type", "joined"}, {"agent", config_.names.agents[index(a)]}});
  if (state_ == SessionState::registering && std::all_of(joined_.begin(), joined_.end(), [](char j) { return j != 0; })) {
    start_locked();
  }
  return a;
}

void Session::start_locked() {
  engine_.emplace(config_.names.agents.size(), config_.strategy, config_.goal);
  state_ = engine_->done() ? SessionState::done : SessionState::eliciting;
}

void Session::submit_locked(AgentId a, ObjectId o) {
  if (state_ != SessionState::eliciting) throw OutOfTurn("session is not eliciting");
  if (!engine_->is_awaiting(a)) throw OutOfTurn("no query is pending for this agent");
  engine_->submit(a, o);
  record({{"type", "answer"}, {"agent", config_.names.agents[index(a)]}, {"object", config_.names.objects[index(o)]}});
  if (engine_->done()) state_ = SessionState::done;
}

AgentId Session::join(const std::string& token) {
  const AgentId a = agent_of(token);
  std::lock_guard lock(mutex_);
  join_locked(a);
  publish();
  return a;
}

void Session::start() {
  std::lock_guard lock(mutex_);
  if (state_ != SessionState::registering) return;
  throw OutOfTurn("not every agent has joined yet");
}

void Session::abort() {
  std::lock_guard lock(mutex_);
  if (state_ == SessionState::done || state_ == SessionState::aborted) throw OutOfTurn("session already finished");
  state_ = SessionState::aborted;
  record({{"type", "aborted"}});
  publish();
}

std::optional<std::size_t> Session::pending_query(const std::string& token) {
  const AgentId a = agent_of(token);
  std::lock_guard lock(mutex_);
  if (!joined_[index(a)]) {
    join_locked(a);
    publish();
  }
  if (state_ != SessionState::eliciting) return std::nullopt;
  return engine_->pending_position(a);
}

void Session::submit(const std::string& token, const std::string& object_name) {
  const AgentId a = agent_of(token);
  std::lock_guard lock(mutex_);
  ObjectId o{};
  try {
    o = config_.names.object_named(object_name);
  } catch (const InvalidInput& e) {
    throw ProtocolError(e.what());
  }
  submit_locked(a, o);
  publish();
}

void Session::publish() {
  auto snap = std::make_shared<SessionSnapshot>();
  snap->id = id_;
  snap->state = state_;
  snap->config = config_;
  snap->joined = joined_;
  if (engine_) {
    snap->round = engine_->round();
    snap->s = engine_->current_matching_size();
    if (state_ == SessionState::eliciting) {
      for (AgentId a : engine_->awaiting()) snap->pending.push_back(index(a));
    }
    snap->transcript = engine_->transcript();
    snap->profile = engine_->profile();
    snap->result = engine_->result();
  } else {
    snap->transcript.n = config_.names.agents.size();
    snap->transcript.k.assign(snap->transcript.n, 0);
    snap->profile = TopKProfile::empty(snap->transcript.n);
  }
  {
    std::lock_guard lock(publish_mutex_);
    snap->version = ++version_;
    published_ = std::move(snap);
  }
  changed_.notify_all();
}

std::shared_ptr<const SessionSnapshot> Session::snapshot() const {
  std::lock_guard lock(publish_mutex_);
  return published_;
}

std::shared_ptr<const SessionSnapshot> Session::wait_for_change(std::uint64_t seen,
                                                                 std::chrono::milliseconds timeout) const {
  std::unique_lock lock(publish_mutex_);
  changed_.wait_for(lock, timeout, [&] { return published_->version > seen; });
  return published_;
}

// ---------------------------------------------------------------------------
// SessionRegistry

SessionRegistry::SessionRegistry(std::optional<std::filesystem::path> log_dir) : log_dir_(std::move(log_dir)) {
  if (!log_dir_) return;
  std::filesystem::create_directories(*log_dir_);
  for (const auto& entry : std::filesystem::directory_iterator(*log_dir_)) {
    if (entry.path().extension() != ".jsonl") continue;
    std::shared_ptr<Session> s = Session::replay(entry.path());
    sessions_.emplace(s->id(), std::move(s));
  }
}

std::shared_ptr<Session> SessionRegistry::create(SessionConfig config) {
  config.validate();
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < config.names.agents.size(); ++i) tokens.push_back(random_token());
  std::lock_guard lock(mutex_);
  std::string id;
  do {
    id = random_token().substr(0, 16);
  } while (sessions_.count(id));
  std::unique_ptr<EventLog> log;
  if (log_dir_) log = std::make_unique<EventLog>(*log_dir_ / (id + ".jsonl"));
  auto s = std::make_shared<Session>(id, std::move(config), std::move(tokens), std::move(log));
  sessions_.emplace(id, s);
  return s;
}

std::shared_ptr<Session> SessionRegistry::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("unknown session \"" + id + "\"");
  return it->second;
}

std::vector<std::string> SessionRegistry::ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

} // namespace necmatch
