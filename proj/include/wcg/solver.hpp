#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wcg/board.hpp"
#include "wcg/goal.hpp"

namespace wcg {

// tau_WC of a position: Waiter forces the goal in `rounds` more rounds, or
// Client survives until the board runs out.
struct GameValue {
  bool waiter_wins = false;
  std::uint32_t rounds = 0;

  static GameValue client_wins() { return {}; }
  static GameValue waiter_in(std::uint32_t rounds) { return {true, rounds}; }

  // "WaiterWins(3)" or "ClientWins".
  std::string to_string() const;

  friend bool operator==(const GameValue&, const GameValue&) = default;
};

// Red and blue edge sets as bitsets over canonical edge indices.
struct StateKey {
  std::vector<std::uint64_t> red;
  std::vector<std::uint64_t> blue;

  friend bool operator==(const StateKey&, const StateKey&) = default;
  friend auto operator<=>(const StateKey&, const StateKey&) = default;
};

// With use_isomorphism the key is the minimum over relabelings that sort
// vertices by (red degree, blue degree). Throws resource_limit when a board has
// too many symmetric relabelings to enumerate.
StateKey canonical_key(const Board& board, bool use_isomorphism);

struct SolverConfig {
  bool use_isomorphism = false;
  std::uint64_t budget = 200'000'000;  // transposition table entries
  unsigned workers = 1;
};

struct SolveStats {
  std::uint64_t states = 0;  // table entries
};

// Memoized minimax over positions of one (n, goal) game. Boards are limited to
// 64 edges (n <= 11). Thread-safe: concurrent queries share the table.
class Solver {
 public:
  Solver(Vertex n, GoalSpec goal, SolverConfig config = {});
  ~Solver();

  Vertex n() const { return n_; }
  const GoalSpec& goal() const { return goal_; }

  GameValue solve();
  GameValue value(const Board& board);
  // Value of the round in which Waiter plays `offer` and Client answers best.
  GameValue offer_value(const Board& board, const Offer& offer);

  // An offer achieving value(board), ties broken by the smallest
  // (edge index, edge index). When Client wins anyway, the offer whose better
  // reply for Waiter ends soonest, i.e. the one that punishes a Client mistake
  // fastest. Throws game_over when no offer is legal or the goal already holds.
  Offer best_offer(const Board& board);

  // Optimal line from `board` when Waiter wins: Client replies with the edge of
  // larger value, the first edge on ties. Empty otherwise.
  std::vector<std::pair<Offer, Edge>> principal_variation(const Board& board);

  SolveStats stats() const;

 private:
  struct Impl;

  Vertex n_;
  GoalSpec goal_;
  SolverConfig config_;
  std::unique_ptr<Impl> impl_;
};

GameValue solve(Vertex n, const GoalSpec& goal, const SolverConfig& config = {});

}  // namespace wcg
