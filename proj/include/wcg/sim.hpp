#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wcg/detectors.hpp"
#include "wcg/registry.hpp"
#include "wcg/transcript.hpp"

namespace wcg {

struct SimConfig {
  Vertex n = 0;
  GoalSpec goal;
  std::string waiter = "random";
  std::string client = "random";
  std::uint64_t games = 1;
  std::uint64_t seed = 0;
  std::optional<Round> round_cap;      // default: floor(n(n-1)/4)
  std::optional<EventParams> events;   // run the S(v) detectors on every final board
  unsigned workers = 1;
  bool keep_transcripts = false;
  WaiterOptions waiter_options;

  // Throws config_error.
  void validate() const;
  Round effective_round_cap() const;
};

struct GameRecord {
  std::uint64_t index = 0;
  std::uint64_t waiter_seed = 0;
  std::uint64_t client_seed = 0;
  bool waiter_won = false;
  Round rounds = 0;
  EdgeIndex red = 0;
  EdgeIndex blue = 0;
  std::vector<std::vector<Vertex>> witness;  // factor blocks or the clique, when Waiter won
  // Event counts over all vertices, when configured.
  std::uint64_t x_count = 0;
  std::uint64_t y_count = 0;
  std::uint64_t s_count = 0;
  std::optional<Transcript> transcript;
};

struct StatsReport {
  SimConfig config;
  std::vector<GameRecord> records;  // by game index
  std::uint64_t waiter_wins = 0;
  double mean_rounds = 0;
  Round min_rounds = 0;
  Round max_rounds = 0;
  double mean_x = 0;
  double mean_y = 0;
  double mean_s = 0;

  // game_index,waiter_seed,client_seed,outcome,rounds,red,blue[,x_count,y_count,s_count]
  std::string to_csv() const;
  // Aggregate document; contains no timing.
  std::string to_json() const;
};

// Plays game `index` of the configuration. Throws config_error naming the game.
GameRecord play_game(const SimConfig& config, std::uint64_t index);
StatsReport run_games(const SimConfig& config);

// Tries to force T(v, (1..k-1)) at v = 0 against any Client: a red K_{2j} is
// built first, v takes j spokes into it and k-1-j spokes to fresh vertices
// (each spoke offered against a spoke to a twin, so both are deterministic),
// then every remaining rim edge is offered once against a throwaway edge. j is
// the largest value for which the rim edges added after both spokes still meet
// ceil((k-1)(k-2)/6) good pairs, so success needs C(k-1,2) - C(j,2) lucky rounds.
class RealizingWaiter : public WaiterStrategy {
 public:
  explicit RealizingWaiter(int k, bool offer_rim = true);

  std::optional<Offer> next_offer(const Board& board) override;
  void on_choice(const Board& board, const Offer& offer, const Edge& chosen) override;
  std::string name() const override { return "realizing:" + std::to_string(k_); }

  static Vertex board_size(int k);
  static int prebuilt_spokes(int k);
  // C(k-1,2) - C(j,2)
  static int coin_rounds(int k);
  std::vector<std::uint64_t> target_indices() const;

 private:
  int k_;
  int j_;
  bool offer_rim_;
  std::unique_ptr<CliqueBuilder> builder_;
  std::vector<Vertex> prebuilt_;  // the red K_{2j}
  std::vector<Vertex> fresh_;
  std::vector<Edge> junk_;
  std::vector<Vertex> spokes_;    // w_1..w_{k-1} in spoke order
  std::vector<std::pair<int, int>> rim_;
  std::size_t rim_pos_ = 0;
  bool failed_ = false;
};

struct TEstimate {
  int k = 0;
  std::uint64_t games = 0;
  std::uint64_t seed = 0;
  std::uint64_t successes = 0;
  double frequency = 0;
  double wilson_low = 0;   // 95% interval
  double wilson_high = 0;
  double sigma = 0;        // Wilson half-width at z = 1
  double bound = 0;        // 2^{-(k-1)(k-2)/6}
  bool within_bound() const { return frequency <= bound + 3 * sigma; }
};

TEstimate estimate_T_probability(int k, std::uint64_t games, std::uint64_t seed, bool offer_rim = true,
                                 unsigned workers = 1);

struct SEstimate {
  std::uint64_t games = 0;
  double mean = 0;
  double low = 0;   // mean -/+ 1.96 standard errors
  double high = 0;
  double n_over_4k = 0;
};

// Requires config.events.
SEstimate estimate_S_expectation(const SimConfig& config);

// Wilson score interval for `successes` out of `trials` at z.
std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials, double z);

}  // namespace wcg
