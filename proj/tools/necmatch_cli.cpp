// Command-line front end. Talks to the library only through necmatch.h.
//
// Exit status: 0 affirmative, 1 negative, 2 usage or input error.

#include "necmatch/necmatch.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace {

constexpr int kYes = 0;
constexpr int kNo = 1;
constexpr int kUsage = 2;

/// Carries a library status out of a subcommand.
struct ApiFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(nm_status st) {
  if (st != NM_OK) throw ApiFailure(nm_last_error());
}

struct InstanceFree {
  void operator()(nm_instance* p) const { nm_instance_free(p); }
};
struct MatchingFree {
  void operator()(nm_matching* p) const { nm_matching_free(p); }
};
struct StringFree {
  void operator()(char* p) const { nm_string_free(p); }
};
struct ServerFree {
  void operator()(nm_server* p) const { nm_server_free(p); }
};
using Instance = std::unique_ptr<nm_instance, InstanceFree>;
using MatchingPtr = std::unique_ptr<nm_matching, MatchingFree>;
using String = std::unique_ptr<char, StringFree>;
using Server = std::unique_ptr<nm_server, ServerFree>;

std::string read_file(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ApiFailure("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Instance load_instance(const std::string& path) {
  nm_instance* raw = nullptr;
  check(nm_instance_parse(read_file(path).c_str(), &raw));
  return Instance(raw);
}

MatchingPtr load_matching(const nm_instance* inst, const std::string& path) {
  nm_matching* raw = nullptr;
  check(nm_matching_parse(inst, read_file(path).c_str(), &raw));
  return MatchingPtr(raw);
}

void print(String s) { std::cout << s.get() << '\n'; }

String matching_json(const nm_instance* inst, const nm_matching* m) {
  char* out = nullptr;
  check(nm_matching_to_json(inst, m, &out));
  return String(out);
}

int run_check(const std::string& instance, const std::string& matching, bool nrm) {
  const Instance inst = load_instance(instance);
  const MatchingPtr m = load_matching(inst.get(), matching);
  int yes = 0;
  check(nrm ? nm_check_nrm(inst.get(), m.get(), &yes) : nm_check_npo(inst.get(), m.get(), &yes));
  std::cout << nlohmann::json{{nrm ? "nrm" : "npo", yes != 0}}.dump() << '\n';
  return yes ? kYes : kNo;
}

int run_exists(const std::string& instance, bool nrm) {
  const Instance inst = load_instance(instance);
  nm_matching* raw = nullptr;
  check(nrm ? nm_exists_nrm(inst.get(), &raw) : nm_exists_npo(inst.get(), &raw));
  const MatchingPtr m(raw);
  if (!m) {
    std::cout << R"({"assignment": null})" << '\n';
    return kNo;
  }
  print(matching_json(inst.get(), m.get()));
  return kYes;
}

int run_sig_opt(const std::string& instance, const std::optional<std::string>& query) {
  const Instance inst = load_instance(instance);
  const std::string q = query ? read_file(*query) : std::string();
  char* out = nullptr;
  check(nm_sig_opt(inst.get(), query ? q.c_str() : nullptr, &out));
  print(String(out));
  return kYes;
}

/// sigwait-based shutdown so the server stops cleanly on SIGINT/SIGTERM.
int run_serve(const std::string& host, int port, const std::optional<std::string>& log_dir,
              const std::optional<std::string>& static_dir) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  nm_server* raw = nullptr;
  check(nm_server_create(log_dir ? log_dir->c_str() : nullptr, static_dir ? static_dir->c_str() : nullptr, &raw));
  const Server server(raw);
  int bound = 0;
  check(nm_server_bind(server.get(), host.c_str(), port, &bound));
  std::cout << nlohmann::json{{"host", host}, {"port", bound}}.dump() << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    nm_server_stop(server.get());
  });
  const nm_status st = nm_server_run(server.get());
  // Wake the waiter if the server stopped for another reason.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  check(st);
  return kYes;
}

void on_record(const char* line, void*) { std::cout << line << '\n'; }

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Necessarily optimal matchings under top-k preferences"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(nm_version()));

  std::string instance, matching;
  std::optional<std::string> query;

  auto* check_npo = app.add_subcommand("check-npo", "Is the matching necessarily Pareto optimal?");
  check_npo->add_option("--instance", instance, "Instance document (- for stdin)")->required();
  check_npo->add_option("--matching", matching, "Matching document")->required();

  auto* check_nrm = app.add_subcommand("check-nrm", "Is the matching necessarily rank-maximal?");
  check_nrm->add_option("--instance", instance, "Instance document (- for stdin)")->required();
  check_nrm->add_option("--matching", matching, "Matching document")->required();

  auto* exists_npo = app.add_subcommand("exists-npo", "Find a necessarily Pareto optimal matching");
  exists_npo->add_option("--instance", instance, "Instance document (- for stdin)")->required();

  auto* exists_nrm = app.add_subcommand("exists-nrm", "Find a necessarily rank-maximal matching");
  exists_nrm->add_option("--instance", instance, "Instance document (- for stdin)")->required();

  auto* sig_opt = app.add_subcommand("sig-opt", "Best signature reachable under some completion");
  sig_opt->add_option("--instance", instance, "Instance document (- for stdin)")->required();
  sig_opt->add_option("--query", query, "JSON with optional agents, objects and forbidden pairs");

  std::string goal = "npo", strategy;
  std::optional<std::string> adversary;
  std::size_t n = 0;
  auto* elicit = app.add_subcommand("elicit", "Run an elicitor against a full profile or an adversary");
  auto* elicit_instance = elicit->add_option("--instance", instance, "Full truth profile");
  auto* elicit_adversary =
      elicit->add_option("--adversary", adversary, "Adaptive adversary family")->check(CLI::IsMember({"npo", "nrm"}));
  elicit_instance->excludes(elicit_adversary);
  elicit->add_option("--n", n, "Agents, with --adversary");
  elicit->add_option("--goal", goal, "npo or nrm")->check(CLI::IsMember({"npo", "nrm"}));
  elicit->add_option("--strategy", strategy, "threshold or naive (default depends on the goal)")
      ->check(CLI::IsMember({"threshold", "naive"}));

  auto* gen_lb = app.add_subcommand("gen-lb", "Emit a lower-bound instance");
  gen_lb->require_subcommand(1);
  std::vector<std::size_t> t;
  std::vector<std::string> specials;
  auto* gen_npo = gen_lb->add_subcommand("npo", "Blocked NPO family");
  gen_npo->add_option("--n", n, "Agents, a perfect square")->required();
  gen_npo->add_option("--t", t, "Special offset per block, e.g. 2,2,2,2")->delimiter(',')->required();
  auto* gen_nrm = gen_lb->add_subcommand("nrm", "Paired NRM family");
  gen_nrm->add_option("--n", n, "Agents")->required();
  gen_nrm->add_option("--specials", specials, "first or second per block")
      ->delimiter(',')
      ->check(CLI::IsMember({"first", "second"}))
      ->required();

  std::string family = "random";
  std::vector<std::size_t> sizes;
  std::size_t instances = 1;
  bool adaptive = false;
  std::uint64_t seed = 1;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  auto* bench = app.add_subcommand("bench", "Competitive-ratio experiment; one JSON line per run, then a summary");
  bench->add_option("--family", family, "random, npo-lb or nrm-lb")->check(CLI::IsMember({"random", "npo-lb", "nrm-lb"}));
  bench->add_option("--goal", goal, "npo or nrm")->check(CLI::IsMember({"npo", "nrm"}));
  bench->add_option("--strategy", strategy, "threshold or naive")->check(CLI::IsMember({"threshold", "naive"}));
  bench->add_option("--sizes", sizes, "Instance sizes, e.g. 3,4,5")->delimiter(',')->required();
  bench->add_option("--instances", instances, "Instances per size");
  bench->add_flag("--adaptive", adaptive, "Lower-bound families: play the adaptive adversary");
  bench->add_option("--seed", seed, "Harness seed");
  bench->add_option("--threads", threads, "Worker threads");

  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::string> log_dir, static_dir;
  auto* serve = app.add_subcommand("serve", "Run the live elicitation service");
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--port", port, "Port, 0 for any");
  serve->add_option("--log-dir", log_dir, "Directory for session event logs");
  serve->add_option("--static", static_dir, "Directory served under /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*check_npo) return run_check(instance, matching, false);
    if (*check_nrm) return run_check(instance, matching, true);
    if (*exists_npo) return run_exists(instance, false);
    if (*exists_nrm) return run_exists(instance, true);
    if (*sig_opt) return run_sig_opt(instance, query);
    if (*elicit) {
      if (adversary) goal = *adversary;
      if (strategy.empty()) strategy = goal == "nrm" ? "naive" : "threshold";
      char* out = nullptr;
      if (adversary) {
        if (n == 0) throw ApiFailure("--adversary needs --n");
        check(nm_elicit_adversary(adversary->c_str(), n, strategy.c_str(), &out));
      } else {
        if (instance.empty()) throw ApiFailure("give --instance or --adversary");
        const Instance inst = load_instance(instance);
        check(nm_elicit(inst.get(), goal.c_str(), strategy.c_str(), &out));
      }
      print(String(out));
      return kYes;
    }
    if (*gen_lb) {
      nm_instance* raw = nullptr;
      if (*gen_npo) {
        check(nm_gen_npo_lb(n, t.data(), t.size(), &raw));
      } else {
        std::vector<unsigned char> bits;
        for (const std::string& s : specials) bits.push_back(s == "second" ? 1 : 0);
        check(nm_gen_nrm_lb(n, bits.data(), bits.size(), &raw));
      }
      const Instance inst(raw);
      char* out = nullptr;
      check(nm_instance_to_json(inst.get(), &out));
      print(String(out));
      return kYes;
    }
    if (*bench) {
      nlohmann::json config = {{"family", family}, {"sizes", sizes}, {"instances", instances},
                               {"adaptive", adaptive}, {"seed", seed}, {"threads", threads}};
      if (bench->count("--goal")) config["goal"] = goal;
      if (!strategy.empty()) config["strategy"] = strategy;
      char* out = nullptr;
      check(nm_bench(config.dump().c_str(), on_record, nullptr, &out));
      const String summary(out);
      std::cout << summary.get() << '\n';
      const auto s = nlohmann::json::parse(summary.get());
      const bool clean = s["bound_violations"] == 0 && s["claim_violations"] == 0 && s["unverified"] == 0;
      return clean ? kYes : kNo;
    }
    if (*serve) return run_serve(host, port, log_dir, static_dir);
  } catch (const ApiFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
