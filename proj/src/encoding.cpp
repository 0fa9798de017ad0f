#include "wcg/encoding.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "wcg/detectors.hpp"

namespace wcg {

std::vector<std::uint64_t> EncodingVector::flat() const {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < y.size(); ++i) {
    out.push_back(y[i]);
    if (i < z.size()) out.push_back(z[i]);
  }
  return out;
}

bool EncodingVector::in_range(std::uint64_t y_cap) const {
  if (y.empty() || z.size() + 1 != y.size()) return false;
  for (auto yi : y) {
    if (yi < 1 || yi > y_cap) return false;
  }
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] < 1 || z[i] > i + 2) return false;  // z_{i+1} <= i+2
  }
  return true;
}

bool encoding_feasible(const EncodingVector& enc) {
  // Step s (0-based) places x_{s+2} using address y[s] and anchor z_s (z_0 = 1).
  const std::size_t steps = enc.y.size();
  auto anchor = [&](std::size_t s) -> std::uint32_t { return s == 0 ? 1 : enc.z[s - 1]; };
  for (std::size_t a = 0; a < steps; ++a) {
    for (std::size_t b = a + 1; b < steps; ++b) {
      if (anchor(a) == anchor(b) && enc.y[a] >= enc.y[b]) return false;
    }
  }
  return true;
}

namespace {

// Time at which each local vertex joins local vertex 0's component
// (0 itself: lowest()). Also reports merge events in time order.
struct Appearance {
  std::vector<std::int64_t> time;
  struct Merge {
    std::int64_t time;
    int entry;               // endpoint outside 0's component
    std::vector<int> members;
  };
  std::vector<Merge> merges;
};

Appearance appearance(const CliqueTimeline& t) {
  const int k = t.size();
  Appearance out;
  out.time.assign(k, std::numeric_limits<std::int64_t>::max());
  out.time[0] = std::numeric_limits<std::int64_t>::lowest();
  std::vector<int> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : t.order()) {
    int ra = find(a), rb = find(b);
    if (ra == rb) continue;
    const int root0 = find(0);
    if (ra == root0 || rb == root0) {
      const int outside_root = ra == root0 ? rb : ra;
      Appearance::Merge m{t.at(a, b), ra == root0 ? b : a, {}};
      for (int x = 0; x < k; ++x) {
        if (find(x) == outside_root) {
          m.members.push_back(x);
          out.time[x] = m.time;
        }
      }
      out.merges.push_back(std::move(m));
    }
    parent[ra] = rb;
  }
  return out;
}

std::uint64_t neighbor_position(const Board& board, Vertex of, Vertex target) {
  const auto& list = board.red_neighbors(of);
  auto it = std::find(list.begin(), list.end(), target);
  return static_cast<std::uint64_t>(it - list.begin()) + 1;
}

}  // namespace

std::optional<std::vector<Vertex>> decode_clique(const Board& board, Vertex v, const EncodingVector& enc) {
  if (v >= board.n() || enc.y.empty() || enc.z.size() + 1 != enc.y.size()) return std::nullopt;
  std::vector<Vertex> x{v};
  for (std::size_t s = 0; s < enc.y.size(); ++s) {
    const std::uint32_t m = s == 0 ? 1 : enc.z[s - 1];
    if (m < 1 || m > x.size()) return std::nullopt;
    const auto& list = board.red_neighbors(x[m - 1]);
    if (enc.y[s] < 1 || enc.y[s] > list.size()) return std::nullopt;
    x.push_back(list[enc.y[s] - 1]);
  }
  return x;
}

EncodingVector encode_history(const Board& board, std::span<const Vertex> clique, Vertex v, std::uint64_t d_hi) {
  std::vector<Vertex> local;
  local.push_back(v);
  for (Vertex u : clique) {
    if (u != v) local.push_back(u);
  }
  if (local.size() != clique.size() || local.size() < 2) {
    throw GameError(ErrorCode::not_encodable, "clique must contain v and at least one other vertex");
  }
  for (Vertex u : local) {
    if (board.red_degree(u) >= d_hi) {
      throw GameError(ErrorCode::not_encodable,
                      "vertex " + std::to_string(u) + " has red degree " + std::to_string(board.red_degree(u)));
    }
  }
  std::optional<CliqueTimeline> timeline;
  try {
    timeline = timeline_from_board(board, local);
  } catch (const GameError& e) {
    throw GameError(ErrorCode::not_encodable, e.what());
  }
  const CliqueTimeline& t = *timeline;
  const Appearance app = appearance(t);

  std::vector<int> order{0};
  std::vector<char> placed(local.size(), 0);
  placed[0] = 1;
  for (const auto& merge : app.merges) {
    for (std::size_t step = 0; step < merge.members.size(); ++step) {
      int best = -1;
      std::int64_t best_key = std::numeric_limits<std::int64_t>::max();
      for (int u : merge.members) {
        if (placed[u]) continue;
        std::int64_t key = std::numeric_limits<std::int64_t>::max();
        for (int p : order) key = std::min(key, t.at(p, u));
        if (key <= merge.time && key < best_key) {
          best_key = key;
          best = u;
        }
      }
      placed[best] = 1;
      order.push_back(best);
    }
  }

  EncodingVector enc;
  std::vector<Vertex> x;
  for (int i : order) x.push_back(local[i]);
  enc.y.push_back(neighbor_position(board, x[0], x[1]));
  for (std::size_t next = 2; next < order.size(); ++next) {
    std::size_t first = 0;
    for (std::size_t j = 1; j < next; ++j) {
      if (t.at(order[j], order[next]) < t.at(order[first], order[next])) first = j;
    }
    enc.z.push_back(static_cast<std::uint32_t>(first + 1));
    enc.y.push_back(neighbor_position(board, x[first], x[next]));
  }
  return enc;
}

EncodingVector encode_history(const Transcript& transcript, std::span<const Vertex> clique, Vertex v,
                              std::uint64_t d_hi) {
  return encode_history(replay(transcript), clique, v, d_hi);
}

bool check_t_event(const Board& board, Vertex v, const EncodingVector& enc, const TEventParams& params) {
  if (!enc.in_range(std::numeric_limits<std::uint64_t>::max()) || !encoding_feasible(enc)) return false;
  const auto decoded = decode_clique(board, v, enc);
  if (!decoded) return false;
  const std::vector<Vertex>& x = *decoded;
  const int k = static_cast<int>(x.size());
  std::vector<Vertex> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
  for (int i = 0; i < k; ++i) {
    if (board.red_degree(x[i]) >= params.d_hi) return false;
    for (int j = i + 1; j < k; ++j) {
      if (!board.is_red(x[i], x[j])) return false;
    }
  }
  const CliqueTimeline t = timeline_from_board(board, x);
  if (component_pair_counts(t)[0] < params.pair_threshold) return false;
  for (int next = 2; next < k; ++next) {
    int first = 0;
    for (int j = 1; j < next; ++j) {
      if (t.at(j, next) < t.at(first, next)) first = j;
    }
    if (static_cast<std::uint32_t>(first + 1) != enc.z[next - 2]) return false;
  }
  const Appearance app = appearance(t);
  for (int i = 1; i < k; ++i) {
    if (app.time[i] < app.time[i - 1]) return false;
  }
  return true;
}

bool check_t_event(const Transcript& transcript, Vertex v, const EncodingVector& enc, const TEventParams& params) {
  return check_t_event(replay(transcript), v, enc, params);
}

bool check_indexed_event(const Board& board, Vertex v, std::span<const std::uint64_t> y,
                         std::int64_t pair_threshold) {
  if (v >= board.n() || y.empty()) return false;
  const auto& list = board.red_neighbors(v);
  std::vector<Vertex> clique{v};
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 1 || y[i] > list.size()) return false;
    if (i > 0 && y[i] <= y[i - 1]) return false;
    clique.push_back(list[y[i] - 1]);
  }
  for (std::size_t i = 1; i < clique.size(); ++i) {
    for (std::size_t j = i + 1; j < clique.size(); ++j) {
      if (!board.is_red(clique[i], clique[j])) return false;
    }
  }
  return good_pair_counts(timeline_from_board(board, clique))[0] >= pair_threshold;
}

}  // namespace wcg
