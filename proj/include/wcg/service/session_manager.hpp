#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

#include "wcg/detectors.hpp"
#include "wcg/registry.hpp"
#include "wcg/transcript.hpp"

namespace wcg::service {

// Carries the HTTP status the transport should answer with.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

struct SessionConfig {
  Vertex n = 0;
  GoalSpec goal;
  std::string waiter;
  std::uint64_t seed = 0;

  // {"n": 15, "goal": "clique:4", "waiter": "clique_builder", "seed": 7}; seed optional.
  static SessionConfig from_json(const nlohmann::json& doc, std::uint64_t default_seed);
  nlohmann::json to_json() const;
};

// Solver-backed sessions are limited to boards this small.
constexpr Vertex kMaxSolverSessionN = 7;

// Transport-independent session store. Each session lives in memory and in
// <data_dir>/<id>.meta.json plus <id>.transcript.json; the transcript is
// rewritten atomically before a choice is acknowledged, and sessions are
// rebuilt on startup by replaying their transcripts against their Waiters.
class SessionManager {
 public:
  using Listener = std::function<void(const nlohmann::json& event)>;

  explicit SessionManager(std::filesystem::path data_dir, SolverConfig solver_config = {});
  ~SessionManager();

  // {id, round, offer}
  nlohmann::json create(const nlohmann::json& config);
  // `edge` is a canonical index or [u, v]. {round, offer} or {round, result}.
  nlohmann::json choose(const std::string& id, const nlohmann::json& edge);
  nlohmann::json state(const std::string& id) const;
  std::string transcript(const std::string& id) const;

  // Listener receives {type: "offer"|"result", ...} after every round; the
  // current position is sent immediately. Returns a token for unsubscribe.
  std::uint64_t subscribe(const std::string& id, Listener listener);
  void unsubscribe(const std::string& id, std::uint64_t token);

  std::size_t size() const;

 private:
  struct Session;

  std::shared_ptr<Session> find(const std::string& id) const;
  std::shared_ptr<Solver> solver_for(Vertex n, const GoalSpec& goal);
  std::unique_ptr<WaiterStrategy> waiter_for(const SessionConfig& config);
  void load(const std::filesystem::path& meta);
  void persist(const Session& s) const;
  std::string new_id();

  std::filesystem::path dir_;
  SolverConfig solver_config_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::pair<Vertex, std::string>, std::shared_ptr<Solver>> solvers_;
  std::uint64_t next_token_ = 1;
};

}  // namespace wcg::service
