#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wcg {

enum class ErrorCode {
  invalid_size,
  loop_edge,
  vertex_out_of_range,
  illegal_offer,
  illegal_choice,
  replay_error,
  parse_error,
  script_underrun,
  bad_budget,
  dirty_board,
  board_too_small,
  indivisible,
  resource_limit,
  game_over,
  bad_ordering,
  not_encodable,
  neighborhood_cap,
  config_error,
};

std::string_view to_string(ErrorCode code);

// Every domain failure in the library is reported with one of these.
class GameError : public std::runtime_error {
 public:
  GameError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ReplayError : public GameError {
 public:
  ReplayError(std::size_t move_index, const std::string& what)
      : GameError(ErrorCode::replay_error,
                  "move " + std::to_string(move_index) + ": " + what),
        move_index_(move_index) {}

  std::size_t move_index() const noexcept { return move_index_; }

 private:
  std::size_t move_index_;
};

}  // namespace wcg
