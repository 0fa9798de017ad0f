#include "wcg/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "wcg/encoding.hpp"
#include "wcg/rng.hpp"

namespace wcg {

void SimConfig::validate() const {
  if (games < 1) throw GameError(ErrorCode::config_error, "games must be >= 1");
  if (round_cap && *round_cap < 1) throw GameError(ErrorCode::config_error, "round cap must be >= 1");
  if (n < 2) throw GameError(ErrorCode::config_error, "n must be >= 2");
  try {
    goal.validate_for(n);
  } catch (const GameError& e) {
    throw GameError(ErrorCode::config_error, e.what());
  }
  if (events && events->k < 2) throw GameError(ErrorCode::config_error, "event k must be >= 2");
}

Round SimConfig::effective_round_cap() const { return round_cap.value_or(edge_count(n) / 2); }

namespace {

// Runs job(i) for i in [0, count) on up to `workers` threads; the first
// exception (by index) is rethrown.
template <class Job>
void parallel_for(std::uint64_t count, unsigned workers, Job job) {
  std::atomic<std::uint64_t> next{0};
  std::mutex mutex;
  std::exception_ptr error;
  std::uint64_t error_index = count;
  auto work = [&] {
    for (std::uint64_t i; (i = next.fetch_add(1)) < count;) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  const unsigned w = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(workers, count)));
  if (w == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < w; ++t) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

GameRecord play_game(const SimConfig& config, std::uint64_t index) {
  GameRecord rec;
  rec.index = index;
  rec.waiter_seed = derive_seed(config.seed, index, 0);
  rec.client_seed = derive_seed(config.seed, index, 1);
  std::unique_ptr<WaiterStrategy> waiter;
  std::unique_ptr<ClientStrategy> client;
  try {
    waiter = make_waiter(config.waiter, config.n, config.goal, rec.waiter_seed, config.waiter_options);
    client = make_client(config.client, rec.client_seed);
  } catch (const GameError& e) {
    throw GameError(ErrorCode::config_error, "game " + std::to_string(index) + ": " + e.what());
  }

  Board board(config.n);
  GoalMonitor monitor(config.goal, config.n);
  Transcript transcript{config.n, config.goal, config.seed, {}};
  const Round cap = config.effective_round_cap();
  while (!monitor.satisfied() && board.can_continue() && board.round() < cap) {
    const auto offer = waiter->next_offer(board);
    if (!offer) break;
    const Edge chosen = client->choose(board, *offer);
    board.apply_round(*offer, chosen);
    waiter->on_choice(board, *offer, chosen);
    monitor.on_red_edge(board, chosen);
    if (config.keep_transcripts) transcript.moves.push_back({*offer, chosen});
  }
  rec.waiter_won = monitor.satisfied();
  rec.rounds = board.round();
  rec.red = board.red_count();
  rec.blue = board.blue_count();
  if (rec.waiter_won) rec.witness = monitor.witness();
  if (config.events) {
    for (Vertex v = 0; v < config.n; ++v) {
      const EventReport r = detect_events(board, v, *config.events);
      rec.x_count += r.x;
      rec.y_count += r.y;
      rec.s_count += r.s;
    }
  }
  if (config.keep_transcripts) rec.transcript = std::move(transcript);
  return rec;
}

StatsReport run_games(const SimConfig& config) {
  config.validate();
  StatsReport report;
  report.config = config;
  report.records.resize(config.games);
  parallel_for(config.games, config.workers, [&](std::uint64_t g) { report.records[g] = play_game(config, g); });

  double rounds = 0, xs = 0, ys = 0, ss = 0;
  report.min_rounds = report.records.front().rounds;
  for (const auto& r : report.records) {
    report.waiter_wins += r.waiter_won;
    rounds += static_cast<double>(r.rounds);
    xs += static_cast<double>(r.x_count);
    ys += static_cast<double>(r.y_count);
    ss += static_cast<double>(r.s_count);
    report.min_rounds = std::min(report.min_rounds, r.rounds);
    report.max_rounds = std::max(report.max_rounds, r.rounds);
  }
  const double g = static_cast<double>(config.games);
  report.mean_rounds = rounds / g;
  report.mean_x = xs / g;
  report.mean_y = ys / g;
  report.mean_s = ss / g;
  return report;
}

std::string StatsReport::to_csv() const {
  std::string out = "game_index,waiter_seed,client_seed,outcome,rounds,red,blue";
  if (config.events) out += ",x_count,y_count,s_count";
  out += "\n";
  for (const auto& r : records) {
    out += std::to_string(r.index) + "," + std::to_string(r.waiter_seed) + "," + std::to_string(r.client_seed) +
           "," + (r.waiter_won ? "waiter" : "client") + "," + std::to_string(r.rounds) + "," +
           std::to_string(r.red) + "," + std::to_string(r.blue);
    if (config.events) {
      out += "," + std::to_string(r.x_count) + "," + std::to_string(r.y_count) + "," + std::to_string(r.s_count);
    }
    out += "\n";
  }
  return out;
}

std::string StatsReport::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = config.n;
  j["goal"] = config.goal.to_string();
  j["waiter"] = config.waiter;
  j["client"] = config.client;
  j["games"] = config.games;
  j["seed"] = config.seed;
  j["rng"] = "counter-splitmix64; game g uses derive_seed(seed, g, 0) for Waiter and derive_seed(seed, g, 1) for Client";
  j["round_cap"] = config.effective_round_cap();
  j["waiter_wins"] = waiter_wins;
  j["client_wins"] = config.games - waiter_wins;
  j["rounds"] = {{"mean", mean_rounds}, {"min", min_rounds}, {"max", max_rounds}};
  if (config.events) {
    const auto& e = *config.events;
    j["events"] = {{"k", e.k},
                   {"d_hi", e.d_hi},
                   {"pair_threshold", e.pair_threshold},
                   {"variant", to_string(e.variant)},
                   {"mean_x", mean_x},
                   {"mean_y", mean_y},
                   {"mean_s", mean_s},
                   {"n_over_4k", static_cast<double>(config.n) / (4.0 * e.k)}};
  }
  return j.dump(2) + "\n";
}

// --- Realizing Waiter -------------------------------------------------------------

namespace {

int choose2(int x) { return x * (x - 1) / 2; }

int junk_vertices(int edges_needed) {
  int j = 2;
  while (choose2(j) < edges_needed) ++j;
  return j;
}

}  // namespace

int RealizingWaiter::prebuilt_spokes(int k) {
  if (k < 3 || k > 6) throw GameError(ErrorCode::config_error, "realizing waiter supports 3 <= k <= 6");
  const std::int64_t t = pair_threshold(k, EventVariant::good_pairs);
  for (int j = k - 1; j >= 0; --j) {
    if (choose2(k - 1) - choose2(j) >= t) return j;
  }
  return 0;
}

int RealizingWaiter::coin_rounds(int k) { return choose2(k - 1) - choose2(prebuilt_spokes(k)); }

Vertex RealizingWaiter::board_size(int k) {
  const int j = prebuilt_spokes(k);
  const Vertex builder = j >= 1 ? (Vertex{1} << (2 * j)) - 1 : 0;
  return 1 + builder + 2 * static_cast<Vertex>(k - 1 - j) + junk_vertices(coin_rounds(k));
}

RealizingWaiter::RealizingWaiter(int k, bool offer_rim) : k_(k), j_(prebuilt_spokes(k)), offer_rim_(offer_rim) {
  Vertex next = 1;
  if (j_ >= 1) {
    const Vertex size = (Vertex{1} << (2 * j_)) - 1;
    std::vector<Vertex> candidates;
    for (Vertex i = 0; i < size; ++i) candidates.push_back(next++);
    builder_ = std::make_unique<CliqueBuilder>(2 * j_, std::move(candidates));
  }
  for (int i = 0; i < 2 * (k - 1 - j_); ++i) fresh_.push_back(next++);
  const Vertex junk_base = next;
  const int junk = junk_vertices(coin_rounds(k));
  for (int a = 0; a < junk; ++a) {
    for (int b = a + 1; b < junk; ++b) junk_.emplace_back(junk_base + a, junk_base + b);
  }
  for (int b = 0; b < k - 1; ++b) {
    for (int a = 0; a < b; ++a) {
      if (b >= j_) rim_.emplace_back(a, b);
    }
  }
}

std::vector<std::uint64_t> RealizingWaiter::target_indices() const {
  std::vector<std::uint64_t> y;
  for (int i = 1; i < k_; ++i) y.push_back(static_cast<std::uint64_t>(i));
  return y;
}

std::optional<Offer> RealizingWaiter::next_offer(const Board& board) {
  if (builder_ && !builder_->done()) return builder_->next_offer(board);
  const std::size_t i = spokes_.size();
  if (i < static_cast<std::size_t>(j_)) {
    const auto& q = builder_->clique();
    return Offer{Edge(0, q[2 * i]), Edge(0, q[2 * i + 1])};
  }
  if (i < static_cast<std::size_t>(k_ - 1)) {
    const std::size_t f = i - j_;
    return Offer{Edge(0, fresh_[2 * f]), Edge(0, fresh_[2 * f + 1])};
  }
  if (!offer_rim_ || failed_ || rim_pos_ == rim_.size()) return std::nullopt;
  const auto [a, b] = rim_[rim_pos_];
  return Offer{Edge(spokes_[a], spokes_[b]), junk_[rim_pos_]};
}

void RealizingWaiter::on_choice(const Board& board, const Offer& offer, const Edge& chosen) {
  if (builder_ && !builder_->done()) {
    builder_->on_choice(board, offer, chosen);
    return;
  }
  if (spokes_.size() < static_cast<std::size_t>(k_ - 1)) {
    spokes_.push_back(chosen.other(0));
    return;
  }
  if (!(chosen == offer.first)) failed_ = true;
  ++rim_pos_;
}

std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

TEstimate estimate_T_probability(int k, std::uint64_t games, std::uint64_t seed, bool offer_rim,
                                 unsigned workers) {
  if (games < 1) throw GameError(ErrorCode::config_error, "games must be >= 1");
  TEstimate est;
  est.k = k;
  est.games = games;
  est.seed = seed;
  est.bound = std::exp2(-static_cast<double>((k - 1) * (k - 2)) / 6.0);
  const Vertex n = RealizingWaiter::board_size(k);
  const std::int64_t threshold = pair_threshold(k, EventVariant::good_pairs);
  std::vector<char> success(games, 0);
  parallel_for(games, workers, [&](std::uint64_t g) {
    RealizingWaiter waiter(k, offer_rim);
    RandomClient client(derive_seed(seed, g, 1));
    Board board(n);
    while (board.can_continue()) {
      const auto offer = waiter.next_offer(board);
      if (!offer) break;
      const Edge chosen = client.choose(board, *offer);
      board.apply_round(*offer, chosen);
      waiter.on_choice(board, *offer, chosen);
    }
    const auto y = waiter.target_indices();
    success[g] = check_indexed_event(board, 0, y, threshold);
  });
  for (char s : success) est.successes += s;
  est.frequency = static_cast<double>(est.successes) / static_cast<double>(games);
  const auto [lo1, hi1] = wilson_interval(est.successes, games, 1.0);
  est.sigma = (hi1 - lo1) / 2;
  const auto [lo, hi] = wilson_interval(est.successes, games, 1.96);
  est.wilson_low = lo;
  est.wilson_high = hi;
  return est;
}

SEstimate estimate_S_expectation(const SimConfig& config) {
  if (!config.events) throw GameError(ErrorCode::config_error, "event parameters required");
  const StatsReport report = run_games(config);
  SEstimate est;
  est.games = config.games;
  est.mean = report.mean_s;
  double var = 0;
  for (const auto& r : report.records) {
    const double d = static_cast<double>(r.s_count) - est.mean;
    var += d * d;
  }
  const double g = static_cast<double>(config.games);
  const double se = config.games > 1 ? std::sqrt(var / (g - 1) / g) : 0.0;
  est.low = est.mean - 1.96 * se;
  est.high = est.mean + 1.96 * se;
  est.n_over_4k = static_cast<double>(config.n) / (4.0 * config.events->k);
  return est;
}

}  // namespace wcg
