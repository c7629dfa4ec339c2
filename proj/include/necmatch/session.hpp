#pragma once

// Live elicitation sessions: human agents answer next-best queries over HTTP.

#include "necmatch/elicitation.hpp"
#include "necmatch/io.hpp"

#include <condition_variable>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace necmatch {

/// Unknown session id or join token.
class NotFound : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Request arrived at the wrong time: no pending query, session not started
/// or already finished.
class OutOfTurn : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class SessionState { registering, eliciting, done, aborted };

std::string_view to_string(SessionState s) noexcept;

struct SessionConfig {
  Goal goal = Goal::npo;
  Strategy strategy = Strategy::threshold;
  Names names;

  /// Throws InvalidInput unless 1 <= n <= 500 and the names are unique.
  void validate() const;
};

struct SessionSnapshot {
  std::string id;
  SessionState state = SessionState::registering;
  SessionConfig config;
  std::vector<char> joined;
  std::size_t round = 0;
  std::size_t s = 0;
  std::vector<std::size_t> pending; // agent indices awaited this round
  ElicitationTranscript transcript;
  TopKProfile profile;
  std::optional<Matching> result;
  std::uint64_t version = 0;
};

Json snapshot_to_json(const SessionSnapshot& s);

/// Sink for the append-only event log; one JSON object per line.
class EventLog {
public:
  explicit EventLog(std::filesystem::path path);
  void append(const Json& event);
  void append_raw(std::string_view text);
  const std::filesystem::path& path() const noexcept { return path_; }

  /// Parsed events. `intact_bytes` receives the length of the prefix that
  /// excludes a torn final line.
  static std::vector<Json> read(const std::filesystem::path& path, std::uintmax_t* intact_bytes = nullptr);

private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// One elicitation run. Mutations serialize on the session's own mutex;
/// readers copy the most recent published snapshot.
class Session {
public:
  /// Fresh session. Writes a "created" event when a log is given.
  Session(std::string id, SessionConfig config, std::vector<std::string> tokens, std::unique_ptr<EventLog> log);

  /// Rebuilds a session by replaying its log, then keeps appending to it.
  static std::unique_ptr<Session> replay(const std::filesystem::path& log_path);

  const std::string& id() const noexcept { return id_; }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  /// Marks the token's agent as present. Elicitation begins once all agents
  /// have joined. Returns the agent.
  AgentId join(const std::string& token);
  /// Starts elicitation; OutOfTurn if an agent has not joined yet.
  void start();
  void abort();

  /// Joins implicitly. Position the agent is asked for, or nullopt to wait.
  std::optional<std::size_t> pending_query(const std::string& token);
  /// OutOfTurn when no query is pending; ProtocolError for a repeated or
  /// unknown object.
  void submit(const std::string& token, const std::string& object_name);

  std::shared_ptr<const SessionSnapshot> snapshot() const;

  /// Blocks until the published version exceeds `seen` or the timeout passes.
  std::shared_ptr<const SessionSnapshot> wait_for_change(std::uint64_t seen, std::chrono::milliseconds timeout) const;

private:
  AgentId agent_of(const std::string& token) const;
  AgentId join_locked(AgentId a);
  void start_locked();
  void submit_locked(AgentId a, ObjectId o);
  void record(const Json& event);
  void publish();

  std::string id_;
  SessionConfig config_;
  std::vector<std::string> tokens_;
  std::unique_ptr<EventLog> log_;
  bool replaying_ = false;

  mutable std::mutex mutex_;
  SessionState state_ = SessionState::registering;
  std::vector<char> joined_;
  std::optional<Elicitor> engine_;
  std::uint64_t version_ = 0;

  mutable std::mutex publish_mutex_;
  mutable std::condition_variable changed_;
  std::shared_ptr<const SessionSnapshot> published_;
};

/// All sessions of one service. With a log directory, every session writes
/// <dir>/<id>.jsonl and existing logs are replayed on construction.
class SessionRegistry {
public:
  explicit SessionRegistry(std::optional<std::filesystem::path> log_dir = std::nullopt);

  std::shared_ptr<Session> create(SessionConfig config);
  std::shared_ptr<Session> find(const std::string& id) const;
  std::vector<std::string> ids() const;

private:
  std::optional<std::filesystem::path> log_dir_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

/// 128 random bits as hex.
std::string random_token();

} // namespace necmatch
