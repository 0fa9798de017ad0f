#include "wcg/goal.hpp"

#include <charconv>

namespace wcg {

GoalSpec GoalSpec::single_clique(int l) {
  if (l < 2) throw GameError(ErrorCode::config_error, "clique size must be >= 2");
  return {Kind::single_clique, l};
}

GoalSpec GoalSpec::clique_factor(int k) {
  if (k < 2) throw GameError(ErrorCode::config_error, "factor clique size must be >= 2");
  return {Kind::clique_factor, k};
}

GoalSpec GoalSpec::parse(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw GameError(ErrorCode::parse_error, "goal '" + std::string(text) + "' is not kind:size");
  }
  auto kind = text.substr(0, colon);
  auto num = text.substr(colon + 1);
  int size = 0;
  auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), size);
  if (ec != std::errc() || ptr != num.data() + num.size()) {
    throw GameError(ErrorCode::parse_error, "goal size '" + std::string(num) + "' is not an integer");
  }
  if (kind == "clique") return single_clique(size);
  if (kind == "factor") return clique_factor(size);
  throw GameError(ErrorCode::parse_error, "unknown goal kind '" + std::string(kind) + "'");
}

std::string GoalSpec::to_string() const {
  return (kind == Kind::single_clique ? "clique:" : "factor:") + std::to_string(size);
}

void GoalSpec::validate_for(Vertex n) const {
  if (kind == Kind::clique_factor && n % static_cast<Vertex>(size) != 0) {
    throw GameError(ErrorCode::indivisible,
                    std::to_string(size) + " does not divide n = " + std::to_string(n));
  }
  if (static_cast<Vertex>(size) > n) {
    throw GameError(ErrorCode::invalid_size,
                    to_string() + " does not fit on n = " + std::to_string(n));
  }
}

}  // namespace wcg
