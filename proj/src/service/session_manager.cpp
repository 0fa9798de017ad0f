#include "wcg/service/session_manager.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace wcg::service {

namespace fs = std::filesystem;
using nlohmann::json;

SessionConfig SessionConfig::from_json(const json& doc, std::uint64_t default_seed) {
  if (!doc.is_object()) throw ServiceError(400, "config must be a JSON object");
  SessionConfig c;
  try {
    const auto& n = doc.at("n");
    if (!n.is_number_integer() || n.get<std::int64_t>() < 0) throw ServiceError(400, "n must be a non-negative integer");
    c.n = n.get<Vertex>();
    c.goal = GoalSpec::parse(doc.at("goal").get<std::string>());
    c.waiter = doc.at("waiter").get<std::string>();
    c.seed = doc.contains("seed") && !doc["seed"].is_null() ? doc["seed"].get<std::uint64_t>() : default_seed;
  } catch (const json::exception& e) {
    throw ServiceError(400, std::string("bad config: ") + e.what());
  } catch (const GameError& e) {
    throw ServiceError(400, e.what());
  }
  if (c.n < 2) throw ServiceError(400, "n must be >= 2");
  try {
    c.goal.validate_for(c.n);
  } catch (const GameError& e) {
    throw ServiceError(400, e.what());
  }
  return c;
}

json SessionConfig::to_json() const {
  return {{"n", n}, {"goal", goal.to_string()}, {"waiter", waiter}, {"seed", seed}};
}

struct SessionManager::Session {
  Session(std::string id_, SessionConfig config_, std::string created_, std::unique_ptr<WaiterStrategy> waiter_)
      : id(std::move(id_)),
        config(std::move(config_)),
        created(std::move(created_)),
        board(config.n),
        monitor(config.goal, config.n),
        waiter(std::move(waiter_)),
        transcript{config.n, config.goal, config.seed, {}} {}

  mutable std::mutex mutex;
  std::string id;
  SessionConfig config;
  std::string created;
  Board board;
  GoalMonitor monitor;
  std::unique_ptr<WaiterStrategy> waiter;
  Transcript transcript;
  std::optional<Offer> pending;
  bool over = false;
  std::map<std::uint64_t, Listener> listeners;

  // Computes the next offer or the terminal state.
  void advance() {
    pending.reset();
    if (monitor.satisfied() || !board.can_continue()) {
      over = true;
      return;
    }
    pending = waiter->next_offer(board);
    if (!pending) {
      over = true;
      return;
    }
    board.check_offer(*pending);
  }

  void play(const Edge& chosen) {
    const Offer offer = *pending;
    board.apply_round(offer, chosen);
    waiter->on_choice(board, offer, chosen);
    monitor.on_red_edge(board, chosen);
    transcript.moves.push_back({offer, chosen});
  }

  json result() const {
    json r{{"winner", monitor.satisfied() ? "waiter" : "client"}, {"rounds", board.round()}};
    r["witness"] = monitor.satisfied() ? json(monitor.witness()) : json::array();
    return r;
  }

  json event() const {
    json e{{"round", board.round()}};
    if (over) {
      e["type"] = "result";
      e["result"] = result();
    } else {
      e["type"] = "offer";
      e["offer"] = {pending->first.index(), pending->second.index()};
    }
    return e;
  }

  json view() const {
    json edges = json::array();
    for (const auto& c : board.claimed_edges()) {
      edges.push_back({{"edge", c.edge.index()},
                       {"u", c.edge.u},
                       {"v", c.edge.v},
                       {"color", c.color == EdgeColor::red ? "red" : "blue"},
                       {"round", c.round}});
    }
    json v = config.to_json();
    v["id"] = id;
    v["created"] = created;
    v["round"] = board.round();
    v["red"] = board.red_count();
    v["blue"] = board.blue_count();
    v["edges"] = std::move(edges);
    v["offer"] = pending ? json{pending->first.index(), pending->second.index()} : json(nullptr);
    v["result"] = over ? result() : json(nullptr);
    return v;
  }
};

namespace {

std::string now_iso8601() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Edge parse_edge(const json& edge, Vertex n) {
  try {
    if (edge.is_number_unsigned()) {
      const auto idx = edge.get<EdgeIndex>();
      if (idx >= edge_count(n)) throw ServiceError(400, "edge index out of range");
      return Edge::from_index(idx);
    }
    if (edge.is_array() && edge.size() == 2 && edge[0].is_number_unsigned() && edge[1].is_number_unsigned()) {
      const auto u = edge[0].get<Vertex>(), v = edge[1].get<Vertex>();
      if (u >= n || v >= n) throw ServiceError(400, "vertex out of range");
      return Edge(u, v);
    }
  } catch (const GameError& e) {
    throw ServiceError(400, e.what());
  }
  throw ServiceError(400, "edge must be a canonical index or a [u, v] pair");
}

void write_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw ServiceError(500, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

SessionManager::SessionManager(fs::path data_dir, SolverConfig solver_config)
    : dir_(std::move(data_dir)), solver_config_(solver_config) {
  fs::create_directories(dir_);
  std::vector<fs::path> metas;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    const std::string name = entry.path().filename().string();
    if (name.ends_with(".meta.json")) metas.push_back(entry.path());
  }
  std::sort(metas.begin(), metas.end());
  for (const auto& m : metas) {
    try {
      load(m);
    } catch (const std::exception& e) {
      std::cerr << "skipping session " << m.filename().string() << ": " << e.what() << "\n";
    }
  }
}

SessionManager::~SessionManager() = default;

std::string SessionManager::new_id() {
  std::random_device rd;
  char buf[33];
  std::uint64_t hi = (std::uint64_t{rd()} << 32) | rd();
  std::uint64_t lo = (std::uint64_t{rd()} << 32) | rd();
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

std::shared_ptr<Solver> SessionManager::solver_for(Vertex n, const GoalSpec& goal) {
  std::lock_guard lock(mutex_);
  auto& slot = solvers_[{n, goal.to_string()}];
  if (!slot) slot = std::make_shared<Solver>(n, goal, solver_config_);
  return slot;
}

std::unique_ptr<WaiterStrategy> SessionManager::waiter_for(const SessionConfig& config) {
  WaiterOptions options;
  if (config.waiter == "solver_optimal") {
    if (config.n > kMaxSolverSessionN) {
      throw ServiceError(400, "solver_optimal supports n <= " + std::to_string(kMaxSolverSessionN));
    }
    options.solver = solver_for(config.n, config.goal);
  }
  try {
    return make_waiter(config.waiter, config.n, config.goal, config.seed, options);
  } catch (const GameError& e) {
    throw ServiceError(400, e.what());
  }
}

void SessionManager::persist(const Session& s) const {
  try {
    save_transcript(s.transcript, (dir_ / (s.id + ".transcript.json")).string());
  } catch (const std::exception& e) {
    throw ServiceError(500, e.what());
  }
}

json SessionManager::create(const json& doc) {
  std::random_device rd;
  const SessionConfig config = SessionConfig::from_json(doc, (std::uint64_t{rd()} << 32) | rd());
  auto waiter = waiter_for(config);
  auto s = std::make_shared<Session>(new_id(), config, now_iso8601(), std::move(waiter));
  try {
    s->advance();
  } catch (const GameError& e) {
    throw ServiceError(400, e.what());
  }
  json meta = config.to_json();
  meta["id"] = s->id;
  meta["created"] = s->created;
  write_atomic(dir_ / (s->id + ".meta.json"), meta.dump(2) + "\n");
  persist(*s);
  json out = s->event();
  out["id"] = s->id;
  std::lock_guard lock(mutex_);
  sessions_[s->id] = s;
  return out;
}

void SessionManager::load(const fs::path& meta_path) {
  std::ifstream in(meta_path);
  const json meta = json::parse(in);
  const SessionConfig config = SessionConfig::from_json(meta, 0);
  const std::string id = meta.at("id").get<std::string>();
  auto s = std::make_shared<Session>(id, config, meta.value("created", ""), waiter_for(config));
  const fs::path tpath = dir_ / (id + ".transcript.json");
  const Transcript t = fs::exists(tpath) ? load_transcript(tpath.string()) : s->transcript;
  if (t.n != config.n || !(t.goal == config.goal)) throw GameError(ErrorCode::replay_error, "meta/transcript mismatch");
  for (std::size_t i = 0; i < t.moves.size(); ++i) {
    s->advance();
    const Offer& want = t.moves[i].offer;
    const bool same = s->pending && ((*s->pending == want) || (s->pending->first == want.second &&
                                                                s->pending->second == want.first));
    if (!same) throw ReplayError(i, "Waiter would not make the recorded offer");
    if (!s->pending->contains(t.moves[i].client)) throw ReplayError(i, "choice not in offer");
    s->play(t.moves[i].client);
  }
  s->advance();
  std::lock_guard lock(mutex_);
  sessions_[id] = s;
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "no session " + id);
  return it->second;
}

json SessionManager::choose(const std::string& id, const json& edge) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  if (s->over) throw ServiceError(409, "game is over");
  const Edge e = parse_edge(edge, s->config.n);
  if (!s->pending->contains(e)) throw ServiceError(409, "edge " + std::to_string(e.index()) + " is not offered");
  s->play(e);
  persist(*s);
  try {
    s->advance();
  } catch (const GameError& err) {
    throw ServiceError(500, err.what());
  }
  const json event = s->event();
  for (const auto& [token, listener] : s->listeners) listener(event);
  return event;
}

json SessionManager::state(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  return s->view();
}

std::string SessionManager::transcript(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  return to_text(s->transcript);
}

std::uint64_t SessionManager::subscribe(const std::string& id, Listener listener) {
  auto s = find(id);
  std::uint64_t token;
  {
    std::lock_guard lock(mutex_);
    token = next_token_++;
  }
  std::lock_guard lock(s->mutex);
  listener(s->event());
  s->listeners.emplace(token, std::move(listener));
  return token;
}

void SessionManager::unsubscribe(const std::string& id, std::uint64_t token) {
  std::shared_ptr<Session> s;
  try {
    s = find(id);
  } catch (const ServiceError&) {
    return;
  }
  std::lock_guard lock(s->mutex);
  s->listeners.erase(token);
}

std::size_t SessionManager::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

}  // namespace wcg::service
