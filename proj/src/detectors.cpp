#include "wcg/detectors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>

namespace wcg {

namespace {

// Sorted red adjacency, built once per query.
struct RedGraph {
  RedGraph() = default;
  explicit RedGraph(const Board& board, std::size_t min_degree = 0) : adj(board.n()) {
    for (Vertex v = 0; v < board.n(); ++v) {
      if (board.red_degree(v) < min_degree) continue;
      adj[v] = board.red_neighbors(v);
      std::sort(adj[v].begin(), adj[v].end());
    }
  }
  std::vector<std::vector<Vertex>> adj;
};

// Sorted intersection of `cand` (restricted to entries > floor) with `nbrs`.
void intersect_above(const std::vector<Vertex>& cand, const std::vector<Vertex>& nbrs, Vertex floor,
                     std::vector<Vertex>& out) {
  out.clear();
  auto from = std::upper_bound(cand.begin(), cand.end(), floor);
  const auto remaining = static_cast<std::size_t>(cand.end() - from);
  if (remaining <= nbrs.size()) {
    for (auto it = from; it != cand.end(); ++it) {
      if (std::binary_search(nbrs.begin(), nbrs.end(), *it)) out.push_back(*it);
    }
  } else {
    for (auto it = std::upper_bound(nbrs.begin(), nbrs.end(), floor); it != nbrs.end(); ++it) {
      if (std::binary_search(from, cand.end(), *it)) out.push_back(*it);
    }
  }
}

// Calls visit(clique) for each clique of `size` extending `clique` from `cand`;
// stops early when visit returns true. scratch[d] holds the candidates at depth d.
template <class Visit>
bool extend_cliques(const RedGraph& g, std::vector<Vertex>& clique, const std::vector<Vertex>& cand,
                    int size, Visit& visit, std::vector<std::vector<Vertex>>& scratch) {
  if (static_cast<int>(clique.size()) == size) return visit(clique);
  const int missing = size - static_cast<int>(clique.size());
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (static_cast<int>(cand.size() - i) < missing) break;
    const Vertex x = cand[i];
    clique.push_back(x);
    bool stop;
    if (missing == 1) {
      stop = visit(clique);
    } else {
      std::vector<Vertex>& next = scratch[clique.size()];
      intersect_above(cand, g.adj[x], x, next);
      stop = extend_cliques(g, clique, next, size, visit, scratch);
    }
    clique.pop_back();
    if (stop) return true;
  }
  return false;
}

template <class Visit>
void for_each_red_clique(const RedGraph& g, Vertex n, int size, Visit visit) {
  std::vector<Vertex> clique, cand;
  std::vector<std::vector<Vertex>> scratch(static_cast<std::size_t>(size) + 1);
  for (Vertex u = 0; u < n; ++u) {
    if (static_cast<int>(g.adj[u].size()) < size - 1) continue;
    clique.assign(1, u);
    cand.assign(std::upper_bound(g.adj[u].begin(), g.adj[u].end(), u), g.adj[u].end());
    if (extend_cliques(g, clique, cand, size, visit, scratch)) return;
  }
}

// Min-tree over (count, vertex) of the uncovered columns.
class ColumnHeap {
 public:
  explicit ColumnHeap(std::size_t n) {
    size_ = 1;
    while (size_ < n) size_ <<= 1;
    tree_.assign(2 * size_, kCovered);
  }
  void set(Vertex v, std::uint64_t count) { update(v, (count << 32) | v); }
  void remove(Vertex v) { update(v, kCovered); }
  bool empty() const { return tree_[1] == kCovered; }
  Vertex top() const { return static_cast<Vertex>(tree_[1] & 0xffffffffu); }
  std::uint64_t top_count() const { return tree_[1] >> 32; }

 private:
  static constexpr std::uint64_t kCovered = std::numeric_limits<std::uint64_t>::max();
  void update(Vertex v, std::uint64_t key) {
    std::size_t i = size_ + v;
    tree_[i] = key;
    for (i >>= 1; i; i >>= 1) tree_[i] = std::min(tree_[2 * i], tree_[2 * i + 1]);
  }
  std::size_t size_;
  std::vector<std::uint64_t> tree_;
};

}  // namespace

std::vector<std::vector<Vertex>> enumerate_red_cliques(const Board& board, int k) {
  if (k < 1) throw GameError(ErrorCode::config_error, "clique size must be positive");
  std::vector<std::vector<Vertex>> out;
  if (k == 1) {
    for (Vertex v = 0; v < board.n(); ++v) out.push_back({v});
    return out;
  }
  RedGraph g(board, static_cast<std::size_t>(k - 1));
  for_each_red_clique(g, board.n(), k, [&](const std::vector<Vertex>& c) {
    out.push_back(c);
    return false;
  });
  return out;
}

std::optional<FactorWitness> find_red_factor(const Board& board, int k) {
  const Vertex n = board.n();
  if (k < 1 || n % static_cast<Vertex>(k) != 0) {
    throw GameError(ErrorCode::indivisible, std::to_string(k) + " does not divide n = " + std::to_string(n));
  }
  for (Vertex v = 0; v < n; ++v) {
    if (board.red_degree(v) + 1 < static_cast<std::size_t>(k)) return std::nullopt;
  }
  // Rows stored flat, k vertices each.
  std::vector<Vertex> flat;
  if (k == 1) {
    flat.resize(n);
    std::iota(flat.begin(), flat.end(), Vertex{0});
  } else {
    RedGraph g(board, static_cast<std::size_t>(k - 1));
    for_each_red_clique(g, n, k, [&](const std::vector<Vertex>& c) {
      flat.insert(flat.end(), c.begin(), c.end());
      return false;
    });
  }
  const auto row_count = static_cast<std::uint32_t>(flat.size() / static_cast<std::size_t>(k));
  auto rows = [&](std::uint32_t r) { return std::span<const Vertex>(flat.data() + std::size_t{r} * k, k); };
  std::vector<std::vector<std::uint32_t>> col_rows(n);
  for (std::uint32_t r = 0; r < row_count; ++r) {
    for (Vertex v : rows(r)) col_rows[v].push_back(r);
  }
  std::vector<std::uint32_t> count(n);
  ColumnHeap heap(n);
  for (Vertex v = 0; v < n; ++v) {
    if (col_rows[v].empty()) return std::nullopt;
    count[v] = static_cast<std::uint32_t>(col_rows[v].size());
    heap.set(v, count[v]);
  }
  std::vector<char> alive(row_count, 1), covered(n, 0);
  std::vector<std::uint32_t> killed;  // undo log of deactivated rows

  struct Frame {
    Vertex column;
    std::vector<std::uint32_t> options;
    std::size_t next = 0;
    std::size_t log_mark = 0;
    std::uint32_t chosen = 0;
    bool applied = false;
  };
  std::vector<Frame> stack;

  auto cover = [&](std::uint32_t row) {
    for (Vertex c : rows(row)) {
      covered[c] = 1;
      heap.remove(c);
    }
    for (Vertex c : rows(row)) {
      for (std::uint32_t r2 : col_rows[c]) {
        if (!alive[r2]) continue;
        alive[r2] = 0;
        killed.push_back(r2);
        for (Vertex c2 : rows(r2)) {
          if (covered[c2]) continue;
          heap.set(c2, --count[c2]);
        }
      }
    }
  };
  auto uncover = [&](std::uint32_t row, std::size_t mark) {
    while (killed.size() > mark) {
      const std::uint32_t r2 = killed.back();
      killed.pop_back();
      alive[r2] = 1;
      for (Vertex c2 : rows(r2)) {
        if (covered[c2]) continue;
        heap.set(c2, ++count[c2]);
      }
    }
    for (Vertex c : rows(row)) {
      covered[c] = 0;
      heap.set(c, count[c]);
    }
  };
  auto open_frame = [&]() -> bool {
    if (heap.empty()) return false;
    Frame f;
    f.column = heap.top();
    for (std::uint32_t r : col_rows[f.column]) {
      if (alive[r]) f.options.push_back(r);
    }
    stack.push_back(std::move(f));
    return true;
  };

  if (!open_frame()) return FactorWitness{};
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.applied) {
      uncover(f.chosen, f.log_mark);
      f.applied = false;
    }
    if (f.next == f.options.size()) {
      stack.pop_back();
      continue;
    }
    f.chosen = f.options[f.next++];
    f.log_mark = killed.size();
    cover(f.chosen);
    f.applied = true;
    if (heap.empty()) {
      FactorWitness w;
      for (const Frame& fr : stack) {
        const auto r = rows(fr.chosen);
        w.emplace_back(r.begin(), r.end());
      }
      std::sort(w.begin(), w.end());
      return w;
    }
    if (heap.top_count() == 0) continue;
    open_frame();
  }
  return std::nullopt;
}

std::optional<std::vector<Vertex>> find_red_clique(const Board& board, int l) {
  if (l < 2) throw GameError(ErrorCode::config_error, "clique size must be >= 2");
  RedGraph g(board, static_cast<std::size_t>(l - 1));
  std::optional<std::vector<Vertex>> found;
  for_each_red_clique(g, board.n(), l, [&](const std::vector<Vertex>& c) {
    found = c;
    return true;
  });
  return found;
}

namespace {

// Calls visit(clique) for each red K_l containing `e` (endpoints first, the rest
// unsorted); stops when visit returns true.
template <class Visit>
void for_each_red_clique_through(const Board& board, const Edge& e, int l, Visit visit) {
  if (!board.is_red(e.u, e.v)) return;
  std::vector<Vertex> found{e.u, e.v};
  if (l == 2) {
    visit(found);
    return;
  }
  const bool u_smaller = board.red_degree(e.u) <= board.red_degree(e.v);
  const Vertex small = u_smaller ? e.u : e.v;
  const Vertex other = u_smaller ? e.v : e.u;
  std::vector<Vertex> common;
  for (Vertex x : board.red_neighbors(small)) {
    if (x != other && board.is_red(x, other)) common.push_back(x);
  }
  if (static_cast<int>(common.size()) < l - 2) return;
  std::sort(common.begin(), common.end());
  // Local graph on the common neighbourhood only, in local ids.
  RedGraph g;
  g.adj.resize(common.size());
  for (std::size_t i = 0; i < common.size(); ++i) {
    for (std::size_t j = i + 1; j < common.size(); ++j) {
      if (board.is_red(common[i], common[j])) {
        g.adj[i].push_back(static_cast<Vertex>(j));
        g.adj[j].push_back(static_cast<Vertex>(i));
      }
    }
  }
  for (auto& a : g.adj) std::sort(a.begin(), a.end());
  std::vector<Vertex> clique;
  auto local = [&](const std::vector<Vertex>& c) {
    found.resize(2);
    for (Vertex x : c) found.push_back(common[x]);
    return visit(found);
  };
  std::vector<Vertex> cand(common.size());
  std::iota(cand.begin(), cand.end(), Vertex{0});
  std::vector<std::vector<Vertex>> scratch(static_cast<std::size_t>(l));
  extend_cliques(g, clique, cand, l - 2, local, scratch);
}

}  // namespace

std::optional<std::vector<Vertex>> find_red_clique_through(const Board& board, const Edge& e, int l) {
  std::optional<std::vector<Vertex>> found;
  for_each_red_clique_through(board, e, l, [&](const std::vector<Vertex>& c) {
    found = c;
    return true;
  });
  if (found) std::sort(found->begin(), found->end());
  return found;
}

// --- GoalMonitor --------------------------------------------------------------------

GoalMonitor::GoalMonitor(const GoalSpec& goal, Vertex n) : goal_(goal), n_(n) {
  if (goal.kind == GoalSpec::Kind::clique_factor) {
    covered_.assign(n, 0);
    uncovered_ = goal.size > 1 ? n : 0;
  }
}

void GoalMonitor::cover(const std::vector<Vertex>& clique) {
  for (Vertex x : clique) {
    if (!covered_[x]) {
      covered_[x] = 1;
      --uncovered_;
    }
  }
}

bool GoalMonitor::reset(const Board& board) {
  witness_.clear();
  satisfied_ = false;
  if (goal_.kind == GoalSpec::Kind::single_clique) {
    if (auto c = find_red_clique(board, goal_.size)) {
      witness_ = {*c};
      satisfied_ = true;
    }
    return satisfied_;
  }
  covered_.assign(board.n(), 0);
  uncovered_ = board.n();
  if (goal_.size == 1) {
    uncovered_ = 0;
  } else {
    RedGraph g(board, static_cast<std::size_t>(goal_.size - 1));
    for_each_red_clique(g, board.n(), goal_.size, [&](const std::vector<Vertex>& c) {
      cover(c);
      return false;
    });
  }
  return check_factor(board);
}

bool GoalMonitor::on_red_edge(const Board& board, const Edge& red) {
  if (satisfied_) return true;
  if (goal_.kind == GoalSpec::Kind::single_clique) {
    if (auto c = find_red_clique_through(board, red, goal_.size)) {
      witness_ = {*c};
      satisfied_ = true;
    }
    return satisfied_;
  }
  // The set of red K_k's only changes through cliques containing the new edge.
  bool fresh = goal_.size == 1;
  if (!fresh) for_each_red_clique_through(board, red, goal_.size, [&](const std::vector<Vertex>& c) {
    fresh = true;
    cover(c);
    return false;
  });
  return fresh && check_factor(board);
}

bool GoalMonitor::check_factor(const Board& board) {
  if (uncovered_ != 0) return false;
  if (auto w = find_red_factor(board, goal_.size)) {
    witness_ = std::move(*w);
    satisfied_ = true;
  }
  return satisfied_;
}

// --- Degrees ---------------------------------------------------------------------------

std::uint64_t DegreeReport::high_count() const {
  return static_cast<std::uint64_t>(std::count(high.begin(), high.end(), true));
}

std::uint64_t DegreeReport::high_block_count() const {
  return static_cast<std::uint64_t>(std::count(block_high.begin(), block_high.end(), true));
}

DegreeReport classify_degrees(const Board& board, std::uint64_t d_hi,
                              const std::vector<std::vector<Vertex>>& partition) {
  DegreeReport rep;
  rep.threshold = d_hi;
  rep.red_degree.resize(board.n());
  rep.high.resize(board.n());
  for (Vertex v = 0; v < board.n(); ++v) {
    rep.red_degree[v] = board.red_degree(v);
    rep.high[v] = rep.red_degree[v] >= d_hi;
  }
  for (const auto& block : partition) {
    bool any = false;
    for (Vertex v : block) any = any || rep.high.at(v);
    rep.block_high.push_back(any);
  }
  return rep;
}

// --- Clique timelines -------------------------------------------------------------------

CliqueTimeline::CliqueTimeline(std::vector<std::vector<std::int64_t>> times) : times_(std::move(times)) {
  const std::size_t k = times_.size();
  std::vector<std::int64_t> seen;
  for (std::size_t i = 0; i < k; ++i) {
    if (times_[i].size() != k) throw GameError(ErrorCode::bad_ordering, "timeline is not square");
    for (std::size_t j = i + 1; j < k; ++j) {
      if (times_[i][j] != times_[j][i]) throw GameError(ErrorCode::bad_ordering, "asymmetric timeline");
      if (times_[i][j] < 0) throw GameError(ErrorCode::bad_ordering, "missing timestamp");
      seen.push_back(times_[i][j]);
    }
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
    throw GameError(ErrorCode::bad_ordering, "two clique edges share a timestamp");
  }
}

std::vector<std::pair<int, int>> CliqueTimeline::order() const {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < size(); ++i) {
    for (int j = i + 1; j < size(); ++j) edges.emplace_back(i, j);
  }
  std::sort(edges.begin(), edges.end(),
            [&](auto a, auto b) { return at(a.first, a.second) < at(b.first, b.second); });
  return edges;
}

namespace {

void check_clique_vertices(std::span<const Vertex> clique) {
  std::vector<Vertex> s(clique.begin(), clique.end());
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
    throw GameError(ErrorCode::bad_ordering, "clique repeats a vertex");
  }
}

}  // namespace

CliqueTimeline timeline_from_times(const EdgeTimes& times, std::span<const Vertex> clique) {
  check_clique_vertices(clique);
  const std::size_t k = clique.size();
  std::vector<std::vector<std::int64_t>> t(k, std::vector<std::int64_t>(k, 0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      auto it = times.find(edge_index(clique[i], clique[j]));
      if (it == times.end()) {
        throw GameError(ErrorCode::bad_ordering, "no timestamp for edge (" + std::to_string(clique[i]) + "," +
                                                     std::to_string(clique[j]) + ")");
      }
      t[i][j] = t[j][i] = it->second;
    }
  }
  return CliqueTimeline(std::move(t));
}

CliqueTimeline timeline_from_board(const Board& board, std::span<const Vertex> clique) {
  check_clique_vertices(clique);
  const std::size_t k = clique.size();
  std::vector<std::vector<std::int64_t>> t(k, std::vector<std::int64_t>(k, 0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      if (!board.is_red(clique[i], clique[j])) {
        throw GameError(ErrorCode::bad_ordering, "edge (" + std::to_string(clique[i]) + "," +
                                                     std::to_string(clique[j]) + ") is not red");
      }
      t[i][j] = t[j][i] = static_cast<std::int64_t>(*board.placed_round(Edge(clique[i], clique[j])));
    }
  }
  return CliqueTimeline(std::move(t));
}

std::vector<int> good_pair_counts(const CliqueTimeline& t) {
  const int k = t.size();
  std::vector<int> counts(k, 0);
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      for (int c = b + 1; c < k; ++c) {
        const auto ab = t.at(a, b), ac = t.at(a, c), bc = t.at(b, c);
        // The vertex opposite the last edge of the triangle sees it.
        if (bc > ab && bc > ac) {
          ++counts[a];
        } else if (ac > ab) {
          ++counts[b];
        } else {
          ++counts[c];
        }
      }
    }
  }
  return counts;
}

std::vector<int> component_pair_counts(const CliqueTimeline& t) {
  const int k = t.size();
  std::vector<int> counts(k, 0), parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : t.order()) {
    const int ra = find(a);
    if (ra == find(b)) {
      for (int x = 0; x < k; ++x) {
        if (find(x) == ra) ++counts[x];
      }
    } else {
      parent[ra] = find(b);
    }
  }
  return counts;
}

std::vector<int> good_pair_counts(const EdgeTimes& times, std::span<const Vertex> clique) {
  return good_pair_counts(timeline_from_times(times, clique));
}

std::vector<int> component_pair_counts(const EdgeTimes& times, std::span<const Vertex> clique) {
  return component_pair_counts(timeline_from_times(times, clique));
}

// --- Thresholds ---------------------------------------------------------------------------

std::string to_string(EventVariant v) { return v == EventVariant::good_pairs ? "s2" : "s3"; }

EventVariant parse_event_variant(std::string_view text) {
  if (text == "s2") return EventVariant::good_pairs;
  if (text == "s3") return EventVariant::component_pairs;
  throw GameError(ErrorCode::parse_error, "variant must be s2 or s3, got '" + std::string(text) + "'");
}

double log2_degree_threshold(int k, EventVariant variant) {
  const double kk = k;
  const double lead = variant == EventVariant::good_pairs ? kk / 6.0 : kk / 3.0;
  return lead - kk / (2.0 * std::log2(kk));
}

std::uint64_t degree_threshold(int k, EventVariant variant) {
  const double e = log2_degree_threshold(k, variant);
  if (e >= 64.0) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(std::floor(std::exp2(e)));
}

std::int64_t pair_threshold(int k, EventVariant variant) {
  if (variant == EventVariant::good_pairs) {
    return (static_cast<std::int64_t>(k - 1) * (k - 2) + 5) / 6;
  }
  const double kk = k;
  const double lg = std::log2(kk);
  const double v = kk * kk / 3.0 - kk * kk / (lg * lg);
  return v <= 0.0 ? 0 : static_cast<std::int64_t>(std::ceil(v));
}

// --- Events ---------------------------------------------------------------------------------

EventReport detect_events(const Board& board, Vertex v, const EventParams& params) {
  if (params.k < 2) throw GameError(ErrorCode::config_error, "k must be >= 2");
  if (params.neighborhood_cap > 64) throw GameError(ErrorCode::config_error, "neighbourhood cap above 64");
  EventReport rep;
  rep.v = v;
  rep.x = board.red_degree(v) < params.d_hi;

  std::vector<Vertex> nbrs;
  for (Vertex w : board.red_neighbors(v)) {
    if (params.variant == EventVariant::component_pairs && board.red_degree(w) >= params.d_hi) continue;
    nbrs.push_back(w);
  }
  const int need = params.k - 1;
  if (static_cast<int>(nbrs.size()) >= need) {
    if (nbrs.size() > params.neighborhood_cap) {
      throw GameError(ErrorCode::neighborhood_cap, "vertex " + std::to_string(v) + " has " +
                                                       std::to_string(nbrs.size()) + " candidate neighbours");
    }
    std::sort(nbrs.begin(), nbrs.end());
    const std::size_t m = nbrs.size();
    std::vector<std::uint64_t> adj(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        if (board.is_red(nbrs[i], nbrs[j])) {
          adj[i] |= std::uint64_t{1} << j;
          adj[j] |= std::uint64_t{1} << i;
        }
      }
    }
    std::int64_t best = -1;
    std::vector<Vertex> local;
    auto score = [&]() {
      std::vector<Vertex> clique{v};
      clique.insert(clique.end(), local.begin(), local.end());
      const auto t = timeline_from_board(board, clique);
      const auto counts = params.variant == EventVariant::good_pairs ? good_pair_counts(t)
                                                                     : component_pair_counts(t);
      best = std::max<std::int64_t>(best, counts[0]);
      if (counts[0] >= params.pair_threshold) {
        rep.witness = clique;
        rep.counted_pairs = counts[0];
        return true;
      }
      return false;
    };
    // Bron-Kerbosch-free enumeration of need-subsets that are cliques.
    auto search = [&](auto&& self, std::uint64_t cand) -> bool {
      if (static_cast<int>(local.size()) == need) return score();
      if (std::popcount(cand) + static_cast<int>(local.size()) < need) return false;
      while (cand) {
        const int i = std::countr_zero(cand);
        cand &= cand - 1;
        local.push_back(nbrs[i]);
        const bool stop = self(self, cand & adj[i]);
        local.pop_back();
        if (stop) return true;
        if (std::popcount(cand) + static_cast<int>(local.size()) < need) break;
      }
      return false;
    };
    const std::uint64_t all = m == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1;
    rep.y = search(search, all);
    if (!rep.y) rep.counted_pairs = std::max<std::int64_t>(best, 0);
  }
  rep.s = rep.x && rep.y;
  return rep;
}

EventReport detect_events(const Transcript& transcript, Vertex v, const EventParams& params) {
  return detect_events(replay(transcript), v, params);
}

}  // namespace wcg
