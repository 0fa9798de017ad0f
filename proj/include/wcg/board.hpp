#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "wcg/error.hpp"

namespace wcg {

using Vertex = std::uint32_t;
using EdgeIndex = std::uint64_t;
using Round = std::uint64_t;

// Canonical index of the unordered pair {u, v}: v(v-1)/2 + u for u < v.
EdgeIndex edge_index(Vertex u, Vertex v);

// Number of edges of K_n.
constexpr EdgeIndex edge_count(Vertex n) {
  return static_cast<EdgeIndex>(n) * (n - 1) / 2;
}

struct Edge {
  Vertex u = 0;  // u < v always
  Vertex v = 1;

  Edge() = default;
  // Accepts the endpoints in either order; throws loop_edge when equal.
  Edge(Vertex a, Vertex b);

  static Edge from_index(EdgeIndex index);

  EdgeIndex index() const { return edge_index(u, v); }
  bool touches(Vertex x) const { return u == x || v == x; }
  Vertex other(Vertex x) const { return x == u ? v : u; }

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge& a, const Edge& b) { return a.index() <=> b.index(); }
};

enum class EdgeColor : std::uint8_t { unclaimed, red, blue };

struct Offer {
  Edge first;
  Edge second;

  bool contains(const Edge& e) const { return e == first || e == second; }
  const Edge& other(const Edge& e) const { return e == first ? second : first; }

  friend bool operator==(const Offer&, const Offer&) = default;
};

struct ClaimedEdge {
  Edge edge;
  EdgeColor color;
  Round round;  // 1-based round in which the edge was claimed

  friend bool operator==(const ClaimedEdge&, const ClaimedEdge&) = default;
};

// What happens to a single unclaimed edge once no further offer is possible.
enum class LeftoverPolicy { stays_unclaimed, to_waiter };

// Unbiased Waiter-Client game state on the edges of K_n. Only claimed edges are
// stored; anything absent is unclaimed. Red = Client, Blue = Waiter.
class Board {
 public:
  explicit Board(Vertex n);

  Vertex n() const { return n_; }
  Round round() const { return round_; }
  EdgeIndex total_edges() const { return edge_count(n_); }
  EdgeIndex claimed_count() const { return colors_.size(); }
  EdgeIndex unclaimed_count() const { return total_edges() - claimed_count(); }

  EdgeColor color(const Edge& e) const;
  bool is_unclaimed(const Edge& e) const { return color(e) == EdgeColor::unclaimed; }
  bool is_red(Vertex a, Vertex b) const;
  // Round in which the edge was claimed, if it was.
  std::optional<Round> placed_round(const Edge& e) const;

  // Throws illegal_offer / illegal_choice without touching the board.
  void apply_round(const Offer& offer, const Edge& choice);
  void check_offer(const Offer& offer) const;

  // True iff at least two edges are unclaimed.
  bool can_continue() const { return unclaimed_count() >= 2; }

  // Applies the leftover policy once the game cannot continue. Returns true if an
  // edge was assigned. With to_waiter the blue count exceeds round() by one.
  bool finish(LeftoverPolicy policy);

  // Red neighbours of x in the order their red edges were placed.
  const std::vector<Vertex>& red_neighbors(Vertex x) const { return red_adj_.at(x); }
  std::size_t red_degree(Vertex x) const { return red_adj_.at(x).size(); }
  EdgeIndex red_count() const { return red_count_; }
  EdgeIndex blue_count() const { return claimed_count() - red_count_; }

  // Claimed edges sorted by canonical index.
  std::vector<ClaimedEdge> claimed_edges() const;

  template <class F>
  void for_each_claimed(F&& f) const {
    for (const auto& [index, packed] : colors_) {
      f(Edge::from_index(index), unpack_color(packed), unpack_round(packed));
    }
  }

  friend bool operator==(const Board& a, const Board& b) {
    return a.n_ == b.n_ && a.round_ == b.round_ && a.colors_ == b.colors_;
  }

 private:
  static EdgeColor unpack_color(std::uint64_t p) {
    return (p & 1) ? EdgeColor::red : EdgeColor::blue;
  }
  static Round unpack_round(std::uint64_t p) { return p >> 1; }
  void check_edge(const Edge& e) const;

  Vertex n_;
  Round round_ = 0;
  EdgeIndex red_count_ = 0;
  absl::flat_hash_map<EdgeIndex, std::uint64_t> colors_;  // round << 1 | is_red
  std::vector<std::vector<Vertex>> red_adj_;
};

}  // namespace wcg
