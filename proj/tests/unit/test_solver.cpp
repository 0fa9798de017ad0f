#include <doctest.h>

#include "oracles/oracles.hpp"
#include "wcg/detectors.hpp"
#include "wcg/rng.hpp"
#include "wcg/solver.hpp"

using namespace wcg;

namespace {

GameValue from_naive(int v) {
  return v == oracle::kClientWins ? GameValue::client_wins() : GameValue::waiter_in(static_cast<std::uint32_t>(v));
}

// Board with the given red and blue edge indices (equal counts), paired in order.
Board position(Vertex n, const std::vector<EdgeIndex>& red, const std::vector<EdgeIndex>& blue) {
  Board b(n);
  for (std::size_t i = 0; i < red.size(); ++i) {
    const Edge r = Edge::from_index(red[i]);
    b.apply_round({r, Edge::from_index(blue[i])}, r);
  }
  return b;
}

// Random position with `pairs` red and `pairs` blue edges.
Board random_position(Vertex n, int pairs, CounterRng& rng) {
  std::vector<EdgeIndex> all(edge_count(n));
  std::iota(all.begin(), all.end(), EdgeIndex{0});
  for (std::size_t i = all.size(); i > 1; --i) std::swap(all[i - 1], all[rng.below(i)]);
  return position(n, {all.begin(), all.begin() + pairs}, {all.begin() + pairs, all.begin() + 2 * pairs});
}

Board relabel(const Board& b, const std::vector<Vertex>& perm) {
  std::vector<EdgeIndex> red, blue;
  b.for_each_claimed([&](const Edge& e, EdgeColor c, Round) {
    (c == EdgeColor::red ? red : blue).push_back(Edge(perm[e.u], perm[e.v]).index());
  });
  return position(b.n(), red, blue);
}

}  // namespace

namespace doctest {
template <>
struct StringMaker<GameValue> {
  static String convert(const GameValue& v) { return v.to_string().c_str(); }
};
}  // namespace doctest

TEST_CASE("trivial game values") {
  CHECK(solve(3, GoalSpec::clique_factor(3)) == GameValue::client_wins());
  CHECK(solve(4, GoalSpec::single_clique(2)) == GameValue::waiter_in(1));
  CHECK(solve(2, GoalSpec::single_clique(2)) == GameValue::client_wins());
  CHECK(GameValue::waiter_in(3).to_string() == "WaiterWins(3)");
  CHECK(GameValue::client_wins().to_string() == "ClientWins");
}

TEST_CASE("pinned values of the small games") {
  for (bool iso : {false, true}) {
    SolverConfig cfg;
    cfg.use_isomorphism = iso;
    CHECK(solve(5, GoalSpec::single_clique(3), cfg) == GameValue::waiter_in(4));
    CHECK(solve(6, GoalSpec::clique_factor(3), cfg) == GameValue::client_wins());
    CHECK(solve(4, GoalSpec::clique_factor(2), cfg) == solve(4, GoalSpec::clique_factor(2)));
  }
}

TEST_CASE("best offer tie-break and game over") {
  Solver s(4, GoalSpec::single_clique(2));
  const Offer o = s.best_offer(Board(4));
  CHECK(o.first == Edge(0, 1));
  CHECK(o.second == Edge(0, 2));

  Board full(4);
  full.apply_round({Edge(0, 1), Edge(0, 2)}, Edge(0, 1));
  full.apply_round({Edge(0, 3), Edge(1, 2)}, Edge(0, 3));
  full.apply_round({Edge(1, 3), Edge(2, 3)}, Edge(1, 3));
  try {
    (void)s.best_offer(full);
    FAIL("offer on a full board");
  } catch (const GameError& e) {
    CHECK(e.code() == ErrorCode::game_over);
  }
  CHECK(s.value(full) == GameValue::waiter_in(0));

  // The red path 0-1-2-3 closes a triangle with either 0-2 or 1-3.
  Solver t(5, GoalSpec::single_clique(3));
  const Board b = position(5, {Edge(0, 1).index(), Edge(1, 2).index(), Edge(2, 3).index()},
                           {Edge(0, 4).index(), Edge(1, 4).index(), Edge(2, 4).index()});
  const Offer win = t.best_offer(b);
  CHECK(t.offer_value(b, win) == GameValue::waiter_in(1));
  CHECK(t.value(b) == GameValue::waiter_in(1));
  CHECK(win == Offer{Edge(0, 2), Edge(1, 3)});
}

TEST_CASE("memoized solver equals naive minimax") {
  SUBCASE("n = 4, every position") {
    for (const auto goal : {GoalSpec::single_clique(2), GoalSpec::single_clique(3), GoalSpec::clique_factor(2)}) {
      Solver s(4, goal);
      // Colour vectors over the 6 edges with equal red and blue counts.
      for (int code = 0; code < 729; ++code) {
        std::vector<EdgeIndex> red, blue;
        int c = code;
        for (EdgeIndex i = 0; i < 6; ++i, c /= 3) {
          if (c % 3 == 1) red.push_back(i);
          if (c % 3 == 2) blue.push_back(i);
        }
        if (red.size() != blue.size()) continue;
        Board b = position(4, red, blue);
        CHECK(s.value(b) == from_naive(oracle::naive_value(b, goal)));
      }
    }
  }
  SUBCASE("n = 5 triangle game, positions with at most 8 free edges") {
    Solver s(5, GoalSpec::single_clique(3));
    for (EdgeIndex r = 0; r < 10; ++r) {
      for (EdgeIndex bl = 0; bl < 10; ++bl) {
        if (r == bl) continue;
        Board b = position(5, {r}, {bl});
        CHECK(s.value(b) == from_naive(oracle::naive_value(b, GoalSpec::single_clique(3))));
      }
    }
    CounterRng rng(11);
    for (int i = 0; i < 100; ++i) {
      Board b = random_position(5, 2 + static_cast<int>(rng.below(2)), rng);
      CHECK(s.value(b) == from_naive(oracle::naive_value(b, GoalSpec::single_clique(3))));
    }
  }
  SUBCASE("n = 6 triangle factor, sampled positions") {
    Solver s(6, GoalSpec::clique_factor(3));
    CounterRng rng(12);
    for (int i = 0; i < 40; ++i) {
      Board b = random_position(6, 4 + static_cast<int>(rng.below(2)), rng);
      CHECK(s.value(b) == from_naive(oracle::naive_value(b, GoalSpec::clique_factor(3))));
    }
  }
}

TEST_CASE("principal variation realises the value") {
  Solver s(5, GoalSpec::single_clique(3));
  const auto pv = s.principal_variation(Board(5));
  REQUIRE(pv.size() == 4);
  Board b(5);
  for (const auto& [offer, pick] : pv) {
    CHECK(s.value(b) == GameValue::waiter_in(static_cast<std::uint32_t>(pv.size() - b.round())));
    b.apply_round(offer, pick);
  }
  CHECK(find_red_clique(b, 3).has_value());
  Solver f(6, GoalSpec::clique_factor(3));
  CHECK(f.principal_variation(Board(6)).empty());
}

TEST_CASE("best offer achieves the value along random games") {
  Solver s(6, GoalSpec::single_clique(3));
  CounterRng rng(4);
  for (int game = 0; game < 10; ++game) {
    Board b(6);
    while (b.can_continue() && !find_red_clique(b, 3)) {
      const GameValue v = s.value(b);
      const Offer o = s.best_offer(b);
      CHECK(s.offer_value(b, o) == v);
      b.apply_round(o, rng.coin() ? o.first : o.second);
      if (v.waiter_wins) CHECK(s.value(b).rounds < v.rounds);
    }
  }
}

TEST_CASE("results do not depend on worker count or isomorphism") {
  for (const auto goal : {GoalSpec::single_clique(3), GoalSpec::clique_factor(3)}) {
    const Vertex n = 6;
    SolverConfig one, many, iso;
    many.workers = 4;
    iso.use_isomorphism = true;
    iso.workers = 3;
    Solver a(n, goal, one), b(n, goal, many), c(n, goal, iso);
    CHECK(a.solve() == b.solve());
    CHECK(a.solve() == c.solve());
    CHECK(a.best_offer(Board(n)) == b.best_offer(Board(n)));
    CHECK(a.best_offer(Board(n)) == c.best_offer(Board(n)));
    CHECK(a.principal_variation(Board(n)) == b.principal_variation(Board(n)));
    CounterRng rng(99);
    for (int i = 0; i < 30; ++i) {
      const Board p = random_position(n, 1 + static_cast<int>(rng.below(4)), rng);
      CHECK(a.value(p) == c.value(p));
    }
  }
}

TEST_CASE("canonical keys") {
  CHECK(canonical_key(Board(5), false) == canonical_key(Board(5), false));
  const Board a = position(5, {Edge(0, 1).index()}, {Edge(2, 3).index()});
  const Board b = position(5, {Edge(0, 2).index()}, {Edge(1, 3).index()});
  CHECK(canonical_key(a, false) != canonical_key(b, false));
  CHECK(canonical_key(a, true) == canonical_key(b, true));
  CHECK(canonical_key(a, true) == canonical_key(relabel(a, {1, 0, 2, 3, 4}), true));
  CounterRng rng(3);
  for (int i = 0; i < 50; ++i) {
    const Board p = random_position(7, 1 + static_cast<int>(rng.below(6)), rng);
    std::vector<Vertex> perm(7);
    std::iota(perm.begin(), perm.end(), Vertex{0});
    for (std::size_t j = perm.size(); j > 1; --j) std::swap(perm[j - 1], perm[rng.below(j)]);
    CHECK(canonical_key(p, true) == canonical_key(relabel(p, perm), true));
  }
}

TEST_CASE("isomorphic positions have equal values") {
  Solver s(6, GoalSpec::single_clique(3));
  CounterRng rng(8);
  for (int i = 0; i < 30; ++i) {
    const Board p = random_position(6, 1 + static_cast<int>(rng.below(4)), rng);
    std::vector<Vertex> perm(6);
    std::iota(perm.begin(), perm.end(), Vertex{0});
    for (std::size_t j = perm.size(); j > 1; --j) std::swap(perm[j - 1], perm[rng.below(j)]);
    CHECK(s.value(p) == s.value(relabel(p, perm)));
  }
}

TEST_CASE("resource limits") {
  CHECK_THROWS_AS(Solver(12, GoalSpec::single_clique(3)), GameError);
  SolverConfig tiny;
  tiny.budget = 10;
  Solver s(6, GoalSpec::single_clique(3), tiny);
  try {
    (void)s.solve();
    FAIL("budget ignored");
  } catch (const GameError& e) {
    CHECK(e.code() == ErrorCode::resource_limit);
  }
  SolverConfig zero;
  zero.budget = 0;
  CHECK_THROWS_AS(Solver(4, GoalSpec::single_clique(2), zero), GameError);
  CHECK_THROWS_AS(Solver(6, GoalSpec::clique_factor(4)), GameError);
}
