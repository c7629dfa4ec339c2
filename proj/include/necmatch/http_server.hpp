#pragma once

// HTTP+JSON front end for SessionRegistry.

#include "necmatch/session.hpp"

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace necmatch {

struct ServerOptions {
  /// Served under "/" when set.
  std::optional<std::filesystem::path> static_dir;
  /// Upper bound for ?wait= on the query endpoint.
  std::chrono::milliseconds max_poll{30000};
};

class SessionServer {
public:
  SessionServer(SessionRegistry& registry, ServerOptions options = {});
  ~SessionServer();
  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  /// Binds to host:port (port 0 picks a free port) and returns the port.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Requires bind().
  void run();
  /// run() on a background thread.
  void start();
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace necmatch
