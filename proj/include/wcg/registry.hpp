#pragma once

#include <memory>
#include <string_view>

#include "wcg/goal.hpp"
#include "wcg/solver.hpp"
#include "wcg/strategy.hpp"

namespace wcg {

// Waiter playing solver-optimal offers, or the solver's threat offer when
// Client survives with best play.
class SolverWaiter : public WaiterStrategy {
 public:
  explicit SolverWaiter(std::shared_ptr<Solver> solver) : solver_(std::move(solver)) {}
  std::optional<Offer> next_offer(const Board& board) override;
  std::string name() const override { return "solver_optimal"; }

 private:
  std::shared_ptr<Solver> solver_;
};

struct WaiterOptions {
  std::shared_ptr<Solver> solver;  // reused by solver_optimal when set
};

// Waiter ids: "random", "greedy", "clique_builder[:l]", "factor[:k]",
// "solver_optimal". Missing parameters default to the goal size. Throws
// config_error when the id is unknown or does not fit (n, goal).
std::unique_ptr<WaiterStrategy> make_waiter(std::string_view id, Vertex n, const GoalSpec& goal,
                                            std::uint64_t seed, const WaiterOptions& options = {});

// Client ids: "random", "scripted:<bits>" (bit i = 1 keeps the first offered edge).
std::unique_ptr<ClientStrategy> make_client(std::string_view id, std::uint64_t seed);

}  // namespace wcg
