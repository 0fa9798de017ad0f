#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wcg/board.hpp"
#include "wcg/transcript.hpp"

namespace wcg {

// Address of a k-clique grown from v: x_1 = v, x_2 = the y_1-th red neighbour of
// v, and x_{i+2} = the y_{i+1}-th red neighbour of x_{z_i}. Neighbour positions
// are 1-based in the order the red edges were placed.
struct EncodingVector {
  std::vector<std::uint64_t> y;  // y_1..y_{k-1}
  std::vector<std::uint32_t> z;  // z_1..z_{k-2}, 1 <= z_i <= i+1

  int k() const { return static_cast<int>(y.size()) + 1; }
  // (y_1, z_1, y_2, z_2, ..., z_{k-2}, y_{k-1})
  std::vector<std::uint64_t> flat() const;
  // Shape and ranges: y_i in [1, y_cap], z_i in [1, i+1].
  bool in_range(std::uint64_t y_cap) const;

  friend bool operator==(const EncodingVector&, const EncodingVector&) = default;
};

// Two steps anchored at the same earlier vertex must address its neighbour list
// in increasing order (the first step is anchored at v). Encodings violating
// this describe histories that cannot occur.
bool encoding_feasible(const EncodingVector& enc);

struct TEventParams {
  std::uint64_t d_hi = 1;             // low degree iff red degree < d_hi
  std::int64_t pair_threshold = 0;    // component pairs required at v
};

// The vertices x_1..x_k addressed by `enc`, or nullopt when an address runs
// past a neighbour list.
std::optional<std::vector<Vertex>> decode_clique(const Board& board, Vertex v, const EncodingVector& enc);

// Encodes the history of the red clique `clique` (which contains v): vertices
// in the order they join v's component of the clique's red graph; a component
// joining at once is ordered greedily by earliest edge to the vertices already
// listed, which keeps every prefix connected. Throws not_encodable when the
// clique is not red, lacks v, or has a vertex of red degree >= d_hi.
EncodingVector encode_history(const Board& board, std::span<const Vertex> clique, Vertex v, std::uint64_t d_hi);
EncodingVector encode_history(const Transcript& transcript, std::span<const Vertex> clique, Vertex v,
                              std::uint64_t d_hi);

// T(v, enc): the addressed vertices form a red clique of low-degree vertices;
// at least pair_threshold clique edges were added with both ends already in
// v's component; each z_i names the first of x_1..x_{i+1} joined to x_{i+2};
// no vertex joins v's component strictly before an earlier-listed one; and
// the encoding is feasible.
bool check_t_event(const Board& board, Vertex v, const EncodingVector& enc, const TEventParams& params);
bool check_t_event(const Transcript& transcript, Vertex v, const EncodingVector& enc, const TEventParams& params);

// The simpler indexed event: y strictly increasing, v and its y_i-th red
// neighbours form a red clique, and at least pair_threshold good pairs sit at v.
bool check_indexed_event(const Board& board, Vertex v, std::span<const std::uint64_t> y,
                         std::int64_t pair_threshold);

}  // namespace wcg
