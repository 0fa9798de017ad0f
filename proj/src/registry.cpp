#include "wcg/registry.hpp"

#include <charconv>
#include <string>

namespace wcg {

std::optional<Offer> SolverWaiter::next_offer(const Board& board) {
  if (!board.can_continue()) return std::nullopt;
  try {
    return solver_->best_offer(board);
  } catch (const GameError& e) {
    if (e.code() == ErrorCode::game_over) return std::nullopt;
    throw;
  }
}

namespace {

std::pair<std::string_view, std::optional<int>> split_id(std::string_view id) {
  const auto colon = id.find(':');
  if (colon == std::string_view::npos) return {id, std::nullopt};
  const std::string_view arg = id.substr(colon + 1);
  int value = 0;
  auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), value);
  if (ec != std::errc() || ptr != arg.data() + arg.size()) {
    throw GameError(ErrorCode::config_error, "bad parameter in strategy id '" + std::string(id) + "'");
  }
  return {id.substr(0, colon), value};
}

}  // namespace

std::unique_ptr<WaiterStrategy> make_waiter(std::string_view id, Vertex n, const GoalSpec& goal,
                                            std::uint64_t seed, const WaiterOptions& options) {
  const auto [name, param] = split_id(id);
  try {
    if (name == "random" && !param) return std::make_unique<RandomOfferWaiter>(seed);
    if (name == "greedy" && !param) return std::make_unique<GreedyDegreeWaiter>();
    if (name == "clique_builder") {
      const int l = param.value_or(goal.size);
      if (l < 2 || l > 31) throw GameError(ErrorCode::config_error, "clique_builder needs 2 <= l <= 31");
      const std::uint64_t need = (std::uint64_t{1} << l) - 1;
      if (need > n) {
        throw GameError(ErrorCode::config_error, "clique_builder:" + std::to_string(l) + " needs " +
                                                     std::to_string(need) + " vertices, board has " +
                                                     std::to_string(n));
      }
      std::vector<Vertex> candidates(need);
      for (Vertex v = 0; v < need; ++v) candidates[v] = v;
      return clique_builder(l, std::move(candidates));
    }
    if (name == "factor") {
      const int k = param.value_or(goal.size);
      const StageParameters plan = stage_parameters(k);
      return std::make_unique<FactorWaiter>(k, plan, n);
    }
    if (name == "solver_optimal" && !param) {
      auto solver = options.solver;
      if (!solver) solver = std::make_shared<Solver>(n, goal);
      if (solver->n() != n || !(solver->goal() == goal)) {
        throw GameError(ErrorCode::config_error, "solver was built for a different game");
      }
      return std::make_unique<SolverWaiter>(std::move(solver));
    }
  } catch (const GameError& e) {
    if (e.code() == ErrorCode::config_error) throw;
    throw GameError(ErrorCode::config_error, std::string(id) + ": " + e.what());
  }
  throw GameError(ErrorCode::config_error, "unknown waiter '" + std::string(id) + "'");
}

std::unique_ptr<ClientStrategy> make_client(std::string_view id, std::uint64_t seed) {
  if (id == "random") return random_client(seed);
  if (id.starts_with("scripted:")) {
    std::vector<bool> bits;
    for (char c : id.substr(9)) {
      if (c != '0' && c != '1') throw GameError(ErrorCode::config_error, "scripted client bits must be 0/1");
      bits.push_back(c == '1');
    }
    return scripted_client(std::move(bits));
  }
  throw GameError(ErrorCode::config_error, "unknown client '" + std::string(id) + "'");
}

}  // namespace wcg
