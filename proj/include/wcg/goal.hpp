#pragma once

#include <string>
#include <string_view>

#include "wcg/board.hpp"

namespace wcg {

// What Waiter tries to force into Client's red graph.
struct GoalSpec {
  enum class Kind { single_clique, clique_factor };

  Kind kind = Kind::clique_factor;
  int size = 3;  // l for a single K_l, k for a K_k-factor

  static GoalSpec single_clique(int l);
  static GoalSpec clique_factor(int k);

  // "clique:<l>" or "factor:<k>".
  static GoalSpec parse(std::string_view text);
  std::string to_string() const;

  // Throws indivisible when a factor goal does not divide n, invalid_size when
  // the goal cannot fit on the board.
  void validate_for(Vertex n) const;

  friend bool operator==(const GoalSpec&, const GoalSpec&) = default;
};

}  // namespace wcg
