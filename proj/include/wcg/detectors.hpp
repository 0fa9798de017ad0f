#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wcg/board.hpp"
#include "wcg/goal.hpp"
#include "wcg/transcript.hpp"

namespace wcg {

// Partition of [0, n) into n/k pairwise-red blocks; blocks and their members sorted.
using FactorWitness = std::vector<std::vector<Vertex>>;

// All red K_k's as sorted vertex lists, in lexicographic order.
std::vector<std::vector<Vertex>> enumerate_red_cliques(const Board& board, int k);

// Exact cover of the vertex set by red k-cliques (minimum-candidates column
// choice, ties by smallest vertex). Throws indivisible if k does not divide n.
std::optional<FactorWitness> find_red_factor(const Board& board, int k);

// A red K_l (sorted), lexicographically first, if one exists.
std::optional<std::vector<Vertex>> find_red_clique(const Board& board, int l);
// A red K_l containing both endpoints of `e`, if one exists.
std::optional<std::vector<Vertex>> find_red_clique_through(const Board& board, const Edge& e, int l);

// Tracks whether Client's red graph satisfies a goal, testing only what a new
// red edge can change. For factors the exact cover only runs once every vertex
// lies in a red K_k, and then only after a new red K_k appears.
class GoalMonitor {
 public:
  GoalMonitor(const GoalSpec& goal, Vertex n);

  // Re-examines a whole board (e.g. a replayed one).
  bool reset(const Board& board);
  // Call after each round with the new red edge. Returns satisfied().
  bool on_red_edge(const Board& board, const Edge& red);

  bool satisfied() const { return satisfied_; }
  // Factor blocks or the single clique that satisfied the goal.
  const std::vector<std::vector<Vertex>>& witness() const { return witness_; }

 private:
  bool check_factor(const Board& board);
  void cover(const std::vector<Vertex>& clique);

  GoalSpec goal_;
  Vertex n_;
  std::vector<char> covered_;  // vertex lies in some red K_k
  std::size_t uncovered_ = 0;
  bool satisfied_ = false;
  std::vector<std::vector<Vertex>> witness_;
};

struct DegreeReport {
  std::uint64_t threshold = 0;
  std::vector<std::uint64_t> red_degree;
  std::vector<bool> high;        // red_degree >= threshold
  std::vector<bool> block_high;  // per supplied block: contains a high vertex
  std::uint64_t high_count() const;
  std::uint64_t high_block_count() const;
};

DegreeReport classify_degrees(const Board& board, std::uint64_t d_hi,
                              const std::vector<std::vector<Vertex>>& partition = {});

// Placement times of the edges of one clique, indexed by local position.
class CliqueTimeline {
 public:
  // times[i][j] for i != j; throws bad_ordering on missing or tied times.
  explicit CliqueTimeline(std::vector<std::vector<std::int64_t>> times);

  int size() const { return static_cast<int>(times_.size()); }
  std::int64_t at(int i, int j) const { return times_[i][j]; }
  // Local edges (i < j) sorted by time.
  std::vector<std::pair<int, int>> order() const;

 private:
  std::vector<std::vector<std::int64_t>> times_;
};

using EdgeTimes = std::unordered_map<EdgeIndex, std::int64_t>;

CliqueTimeline timeline_from_times(const EdgeTimes& times, std::span<const Vertex> clique);
// Uses the rounds of the red edges; throws bad_ordering if a pair is not red.
CliqueTimeline timeline_from_board(const Board& board, std::span<const Vertex> clique);

// Per local vertex x: triangles x a b whose last edge is ab. Sums to C(k,3).
std::vector<int> good_pair_counts(const CliqueTimeline& t);
// Per local vertex x: edges ab that were added when a and b were already both in
// x's component of the graph formed by the earlier clique edges.
std::vector<int> component_pair_counts(const CliqueTimeline& t);

std::vector<int> good_pair_counts(const EdgeTimes& times, std::span<const Vertex> clique);
std::vector<int> component_pair_counts(const EdgeTimes& times, std::span<const Vertex> clique);

// Which counting statistic defines Y(v): good pairs with no degree condition on
// the clique, or component pairs with every clique vertex of low degree.
enum class EventVariant { good_pairs, component_pairs };

std::string to_string(EventVariant v);
EventVariant parse_event_variant(std::string_view text);  // "s2" | "s3"

// log2 is base 2 throughout.
double log2_degree_threshold(int k, EventVariant variant);
std::uint64_t degree_threshold(int k, EventVariant variant);  // floor(2^...), saturating
// ceil((k-1)(k-2)/6) or ceil(k^2/3 - k^2/(log2 k)^2), clamped at 0.
std::int64_t pair_threshold(int k, EventVariant variant);

struct EventParams {
  int k = 3;
  std::uint64_t d_hi = 1;          // high iff red degree >= d_hi
  std::int64_t pair_threshold = 0;
  EventVariant variant = EventVariant::good_pairs;
  std::size_t neighborhood_cap = 64;
};

struct EventReport {
  Vertex v = 0;
  bool x = false;  // v is low degree
  bool y = false;
  bool s = false;  // x && y
  std::vector<Vertex> witness;  // v followed by the sorted clique, when y
  std::int64_t counted_pairs = 0;  // witness count, or the best count seen
};

// Throws neighborhood_cap when the searched neighbourhood exceeds the cap.
EventReport detect_events(const Board& board, Vertex v, const EventParams& params);
EventReport detect_events(const Transcript& transcript, Vertex v, const EventParams& params);

}  // namespace wcg
