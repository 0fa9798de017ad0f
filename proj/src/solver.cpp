#include "wcg/solver.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include <absl/container/flat_hash_map.h>
#include <absl/hash/hash.h>

namespace wcg {

std::string GameValue::to_string() const {
  return waiter_wins ? "WaiterWins(" + std::to_string(rounds) + ")" : "ClientWins";
}

namespace {

constexpr int kInf = 255;
constexpr std::uint64_t kMaxRelabelings = 3'628'800;  // 10!
constexpr std::uint64_t kSolverRelabelings = 5040;

// Vertices sorted by (red degree, blue degree) with the class boundaries.
struct VertexClasses {
  std::vector<Vertex> order;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::uint64_t relabelings = 1;
};

VertexClasses vertex_classes(Vertex n, const std::vector<std::pair<Edge, bool>>& claimed) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> deg(n, {0, 0});
  for (const auto& [e, red] : claimed) {
    auto& slot_u = red ? deg[e.u].first : deg[e.u].second;
    auto& slot_v = red ? deg[e.v].first : deg[e.v].second;
    ++slot_u;
    ++slot_v;
  }
  VertexClasses c;
  c.order.resize(n);
  std::iota(c.order.begin(), c.order.end(), Vertex{0});
  std::stable_sort(c.order.begin(), c.order.end(), [&](Vertex a, Vertex b) { return deg[a] < deg[b]; });
  std::size_t start = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i == n || deg[c.order[i]] != deg[c.order[start]]) {
      c.ranges.emplace_back(start, i);
      for (std::size_t f = 2; f <= i - start; ++f) {
        c.relabelings = c.relabelings > kMaxRelabelings ? c.relabelings : c.relabelings * f;
      }
      start = i;
    }
  }
  return c;
}

// Calls f(order) for every arrangement of `order` permuting only within ranges.
template <class F>
void for_each_relabeling(VertexClasses& c, F&& f) {
  for (auto [a, b] : c.ranges) std::sort(c.order.begin() + a, c.order.begin() + b);
  while (true) {
    f(c.order);
    std::size_t i = c.ranges.size();
    while (i > 0) {
      --i;
      auto [a, b] = c.ranges[i];
      if (std::next_permutation(c.order.begin() + a, c.order.begin() + b)) break;
      if (i == 0) return;
    }
    if (c.ranges.empty()) return;
  }
}

}  // namespace

StateKey canonical_key(const Board& board, bool use_isomorphism) {
  const Vertex n = board.n();
  const std::size_t words = (board.total_edges() + 63) / 64;
  std::vector<std::pair<Edge, bool>> claimed;
  board.for_each_claimed([&](const Edge& e, EdgeColor color, Round) {
    claimed.emplace_back(e, color == EdgeColor::red);
  });
  auto build = [&](const std::vector<Vertex>& label) {
    StateKey key{std::vector<std::uint64_t>(words, 0), std::vector<std::uint64_t>(words, 0)};
    for (const auto& [e, red] : claimed) {
      const EdgeIndex idx = edge_index(label[e.u], label[e.v]);
      (red ? key.red : key.blue)[idx / 64] |= std::uint64_t{1} << (idx % 64);
    }
    return key;
  };
  std::vector<Vertex> identity(n);
  std::iota(identity.begin(), identity.end(), Vertex{0});
  if (!use_isomorphism) return build(identity);

  VertexClasses classes = vertex_classes(n, claimed);
  if (classes.relabelings > kMaxRelabelings) {
    throw GameError(ErrorCode::resource_limit, "too many symmetric relabelings to canonicalize");
  }
  std::optional<StateKey> best;
  std::vector<Vertex> label(n);
  for_each_relabeling(classes, [&](const std::vector<Vertex>& order) {
    for (Vertex i = 0; i < n; ++i) label[order[i]] = i;
    StateKey key = build(label);
    if (!best || key < *best) best = std::move(key);
  });
  return *best;
}

// --- Solver -----------------------------------------------------------------------

struct Solver::Impl {
  struct KeyHash {
    std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const {
      return absl::Hash<std::pair<std::uint64_t, std::uint64_t>>{}(k);
    }
  };
  struct Shard {
    std::mutex mutex;
    absl::flat_hash_map<std::pair<std::uint64_t, std::uint64_t>, std::uint8_t, KeyHash> table;
  };
  static constexpr std::size_t kShards = 64;

  Vertex n;
  int edges;
  std::uint64_t all;
  std::vector<std::array<Vertex, 2>> ends;
  std::vector<std::vector<int>> pair_index;
  std::vector<std::uint64_t> wins;
  SolverConfig config;
  std::array<Shard, kShards> shards;
  std::atomic<std::uint64_t> entries{0};
  std::atomic<bool> abort{false};

  Impl(Vertex n_, const GoalSpec& goal, const SolverConfig& cfg) : n(n_), config(cfg) {
    edges = static_cast<int>(edge_count(n));
    all = edges == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << edges) - 1;
    pair_index.assign(n, std::vector<int>(n, -1));
    for (int e = 0; e < edges; ++e) {
      const Edge edge = Edge::from_index(e);
      ends.push_back({edge.u, edge.v});
      pair_index[edge.u][edge.v] = pair_index[edge.v][edge.u] = e;
    }
    if (goal.kind == GoalSpec::Kind::single_clique) {
      build_clique_masks(goal.size);
    } else {
      build_factor_masks(goal.size);
    }
  }

  std::uint64_t clique_mask(const std::vector<Vertex>& vs) const {
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      for (std::size_t j = i + 1; j < vs.size(); ++j) m |= std::uint64_t{1} << pair_index[vs[i]][vs[j]];
    }
    return m;
  }

  void build_clique_masks(int l) {
    std::vector<Vertex> pick;
    auto rec = [&](auto&& self, Vertex from) -> void {
      if (static_cast<int>(pick.size()) == l) {
        wins.push_back(clique_mask(pick));
        return;
      }
      for (Vertex v = from; v < n; ++v) {
        pick.push_back(v);
        self(self, v + 1);
        pick.pop_back();
      }
    };
    rec(rec, 0);
  }

  void build_factor_masks(int k) {
    std::vector<char> used(n, 0);
    std::vector<Vertex> block;
    auto rec = [&](auto&& self, std::uint64_t acc) -> void {
      Vertex first = 0;
      while (first < n && used[first]) ++first;
      if (first == n) {
        wins.push_back(acc);
        return;
      }
      used[first] = 1;
      block.assign(1, first);
      auto grow = [&](auto&& grow_self, Vertex from) -> void {
        if (static_cast<int>(block.size()) == k) {
          const std::vector<Vertex> saved = block;
          self(self, acc | clique_mask(saved));
          block = saved;
          return;
        }
        for (Vertex v = from; v < n; ++v) {
          if (used[v]) continue;
          used[v] = 1;
          block.push_back(v);
          grow_self(grow_self, v + 1);
          block.pop_back();
          used[v] = 0;
        }
      };
      grow(grow, first + 1);
      used[first] = 0;
    };
    rec(rec, 0);
  }

  // Red edges still missing from the cheapest live winning set, kInf if none
  // is live or the remaining rounds cannot supply them.
  int lower_bound(std::uint64_t red, std::uint64_t blue) const {
    int best = kInf;
    for (std::uint64_t w : wins) {
      if (w & blue) continue;
      best = std::min(best, std::popcount(w & ~red));
      if (best == 0) return 0;
    }
    const int rounds_left = std::popcount(all & ~(red | blue)) / 2;
    return best > rounds_left ? kInf : best;
  }

  std::pair<std::uint64_t, std::uint64_t> canonical(std::uint64_t red, std::uint64_t blue) const {
    if (!config.use_isomorphism) return {red, blue};
    std::vector<std::pair<Edge, bool>> claimed;
    for (int e = 0; e < edges; ++e) {
      const std::uint64_t bit = std::uint64_t{1} << e;
      if ((red | blue) & bit) claimed.emplace_back(Edge(ends[e][0], ends[e][1]), (red & bit) != 0);
    }
    VertexClasses classes = vertex_classes(n, claimed);
    if (classes.relabelings > kSolverRelabelings) return {red, blue};
    std::pair<std::uint64_t, std::uint64_t> best{~std::uint64_t{0}, ~std::uint64_t{0}};
    std::vector<Vertex> label(n);
    for_each_relabeling(classes, [&](const std::vector<Vertex>& order) {
      for (Vertex i = 0; i < n; ++i) label[order[i]] = i;
      std::pair<std::uint64_t, std::uint64_t> key{0, 0};
      for (const auto& [e, is_red] : claimed) {
        const std::uint64_t bit = std::uint64_t{1} << pair_index[label[e.u]][label[e.v]];
        (is_red ? key.first : key.second) |= bit;
      }
      best = std::min(best, key);
    });
    return best;
  }

  std::optional<int> lookup(const std::pair<std::uint64_t, std::uint64_t>& key) {
    Shard& s = shards[KeyHash{}(key) % kShards];
    std::lock_guard lock(s.mutex);
    auto it = s.table.find(key);
    if (it == s.table.end()) return std::nullopt;
    return it->second;
  }

  void store(const std::pair<std::uint64_t, std::uint64_t>& key, int value) {
    Shard& s = shards[KeyHash{}(key) % kShards];
    std::lock_guard lock(s.mutex);
    if (s.table.try_emplace(key, static_cast<std::uint8_t>(value)).second) {
      if (entries.fetch_add(1, std::memory_order_relaxed) + 1 > config.budget) {
        throw GameError(ErrorCode::resource_limit,
                        "transposition table exceeded " + std::to_string(config.budget) + " entries");
      }
    }
  }

  // Value of a position in which the goal does not hold yet.
  int eval(std::uint64_t red, std::uint64_t blue) {
    if (abort) throw GameError(ErrorCode::resource_limit, "solve aborted");
    const int lb = lower_bound(red, blue);
    if (lb == 0) return 0;
    if (lb == kInf) return kInf;
    const auto key = canonical(red, blue);
    if (auto hit = lookup(key)) return *hit;

    const std::uint64_t free = all & ~(red | blue);
    int best = kInf;
    for (std::uint64_t f1 = free; f1 && best > lb; f1 &= f1 - 1) {
      const std::uint64_t b1 = f1 & -f1;
      for (std::uint64_t f2 = f1 & (f1 - 1); f2 && best > lb; f2 &= f2 - 1) {
        const std::uint64_t b2 = f2 & -f2;
        const int va = child(red | b1, blue | b2, best);
        if (va + 1 >= best) continue;
        const int vb = child(red | b2, blue | b1, best);
        best = std::min(best, 1 + std::max(va, vb));
      }
    }
    store(key, best);
    return best;
  }

  // Exact value of a child, or something >= best - 1 when it cannot matter.
  int child(std::uint64_t red, std::uint64_t blue, int best) {
    const int lb = lower_bound(red, blue);
    if (lb == 0) return 0;
    if (lb == kInf || lb + 1 >= best) return std::max(lb, best - 1);
    return eval(red, blue);
  }

  struct OfferValues {
    int first_red;   // value after Client takes the first edge
    int second_red;  // value after Client takes the second edge
    int value() const { return std::min(kInf, 1 + std::max(first_red, second_red)); }
  };

  // Every offer at the position, evaluated exactly, in lexicographic order.
  std::vector<std::pair<Offer, OfferValues>> root(std::uint64_t red, std::uint64_t blue) {
    std::vector<std::pair<int, int>> pairs;
    const std::uint64_t free = all & ~(red | blue);
    for (int a = 0; a < edges; ++a) {
      if (!((free >> a) & 1)) continue;
      for (int b = a + 1; b < edges; ++b) {
        if ((free >> b) & 1) pairs.emplace_back(a, b);
      }
    }
    std::vector<std::pair<Offer, OfferValues>> out(pairs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
      try {
        for (std::size_t i; (i = next.fetch_add(1)) < pairs.size();) {
          const auto [a, b] = pairs[i];
          const std::uint64_t ba = std::uint64_t{1} << a, bb = std::uint64_t{1} << b;
          out[i] = {Offer{Edge::from_index(a), Edge::from_index(b)},
                    OfferValues{eval(red | ba, blue | bb), eval(red | bb, blue | ba)}};
        }
      } catch (...) {
        abort = true;
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(config.workers, pairs.size()));
    if (workers == 1) {
      work();
    } else {
      std::vector<std::thread> threads;
      for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work);
      for (auto& t : threads) t.join();
    }
    if (error) {
      abort = false;
      std::rethrow_exception(error);
    }
    return out;
  }
};

Solver::Solver(Vertex n, GoalSpec goal, SolverConfig config) : n_(n), goal_(goal), config_(config) {
  goal.validate_for(n);
  if (edge_count(n) > 64) {
    throw GameError(ErrorCode::resource_limit, "solver supports boards with at most 64 edges (n <= 11)");
  }
  if (config.budget == 0) throw GameError(ErrorCode::config_error, "budget must be positive");
  impl_ = std::make_unique<Impl>(n, goal, config);
}

Solver::~Solver() = default;

namespace {

std::pair<std::uint64_t, std::uint64_t> masks_of(const Board& board, Vertex n) {
  if (board.n() != n) throw GameError(ErrorCode::config_error, "board size does not match the solver");
  std::uint64_t red = 0, blue = 0;
  board.for_each_claimed([&](const Edge& e, EdgeColor color, Round) {
    (color == EdgeColor::red ? red : blue) |= std::uint64_t{1} << e.index();
  });
  return {red, blue};
}

GameValue to_value(int v) {
  return v >= kInf ? GameValue::client_wins() : GameValue::waiter_in(static_cast<std::uint32_t>(v));
}

}  // namespace

GameValue Solver::solve() { return value(Board(n_)); }

GameValue Solver::value(const Board& board) {
  const auto [red, blue] = masks_of(board, n_);
  const int lb = impl_->lower_bound(red, blue);
  if (lb == 0 || lb == kInf) return to_value(lb);
  if (config_.workers <= 1) return to_value(impl_->eval(red, blue));
  int best = kInf;
  for (const auto& [offer, values] : impl_->root(red, blue)) best = std::min(best, values.value());
  return to_value(best);
}

GameValue Solver::offer_value(const Board& board, const Offer& offer) {
  board.check_offer(offer);
  const auto [red, blue] = masks_of(board, n_);
  const std::uint64_t a = std::uint64_t{1} << offer.first.index();
  const std::uint64_t b = std::uint64_t{1} << offer.second.index();
  const int va = impl_->eval(red | a, blue | b);
  const int vb = impl_->eval(red | b, blue | a);
  return to_value(std::min(kInf, 1 + std::max(va, vb)));
}

Offer Solver::best_offer(const Board& board) {
  const auto [red, blue] = masks_of(board, n_);
  if (!board.can_continue()) throw GameError(ErrorCode::game_over, "fewer than two unclaimed edges");
  if (impl_->lower_bound(red, blue) == 0) throw GameError(ErrorCode::game_over, "goal already reached");
  const auto offers = impl_->root(red, blue);
  const std::pair<Offer, Impl::OfferValues>* best = nullptr;
  for (const auto& entry : offers) {
    if (!best || entry.second.value() < best->second.value()) best = &entry;
  }
  if (best->second.value() < kInf) return best->first;
  // Client survives with best play: threaten the quickest win after a mistake.
  const std::pair<Offer, Impl::OfferValues>* threat = nullptr;
  auto score = [](const Impl::OfferValues& v) { return std::min(v.first_red, v.second_red); };
  for (const auto& entry : offers) {
    if (!threat || score(entry.second) < score(threat->second)) threat = &entry;
  }
  return threat->first;
}

std::vector<std::pair<Offer, Edge>> Solver::principal_variation(const Board& start) {
  std::vector<std::pair<Offer, Edge>> line;
  if (!value(start).waiter_wins) return line;
  Board board = start;
  while (true) {
    const auto [red, blue] = masks_of(board, n_);
    if (impl_->lower_bound(red, blue) == 0) break;
    const Offer offer = best_offer(board);
    const std::uint64_t a = std::uint64_t{1} << offer.first.index();
    const std::uint64_t b = std::uint64_t{1} << offer.second.index();
    const int va = impl_->eval(red | a, blue | b);
    const int vb = impl_->eval(red | b, blue | a);
    const Edge choice = vb > va ? offer.second : offer.first;
    board.apply_round(offer, choice);
    line.emplace_back(offer, choice);
  }
  return line;
}

SolveStats Solver::stats() const { return {impl_->entries.load()}; }

GameValue solve(Vertex n, const GoalSpec& goal, const SolverConfig& config) {
  return Solver(n, goal, config).solve();
}

}  // namespace wcg
