#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wcg/board.hpp"
#include "wcg/goal.hpp"

namespace wcg {

struct Move {
  Offer offer;
  Edge client;  // the edge Client kept

  friend bool operator==(const Move&, const Move&) = default;
};

// Replayable record of a game; the unit of persistence.
struct Transcript {
  static constexpr int kVersion = 1;

  Vertex n = 2;
  GoalSpec goal;
  std::optional<std::uint64_t> seed;
  std::vector<Move> moves;

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

// Applies every move in order. Throws ReplayError naming the first bad move.
Board replay(const Transcript& transcript);

// Text form: a JSON document {version, n, goal, seed?, moves:[{offer:[e1,e2], client:e}]}
// with edges as canonical indices, one move per line. to_text(from_text(s)) == s
// for any s produced by to_text.
std::string to_text(const Transcript& transcript);
Transcript transcript_from_text(std::string_view text);

Transcript load_transcript(const std::string& path);
// Writes to a sibling temporary file and renames it into place.
void save_transcript(const Transcript& transcript, const std::string& path);

}  // namespace wcg
