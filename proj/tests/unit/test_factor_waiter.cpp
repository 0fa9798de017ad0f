#include <doctest.h>

#include "oracles/oracles.hpp"
#include "wcg/detectors.hpp"
#include "wcg/strategy.hpp"

using namespace wcg;

namespace {

struct FactorRun {
  Round rounds = 0;
  bool won = false;
  bool witness_ok = false;
  std::size_t blocks = 0;
};

FactorRun play(int k, const StageParameters& plan, Vertex n, std::uint64_t seed) {
  FactorWaiter w(k, plan, n);
  RandomClient c(seed);
  Board b(n);
  while (true) {
    const auto o = w.next_offer(b);
    if (!o) break;
    const Edge e = c.choose(b, *o);
    b.apply_round(*o, e);
    w.on_choice(b, *o, e);
  }
  CHECK(w.stage() == FactorStage::done);
  FactorRun r;
  r.rounds = b.round();
  r.blocks = w.blocks().size();
  // The blocks the strategy reports must themselves be a red factor.
  std::vector<char> seen(n, 0);
  bool ok = w.blocks().size() * k == n;
  for (const auto& blk : w.blocks()) {
    ok = ok && static_cast<int>(blk.size()) == k && oracle::all_red(b, blk);
    for (Vertex v : blk) ok = ok && !seen[v]++;
  }
  r.witness_ok = ok;
  r.won = find_red_factor(b, k).has_value();
  return r;
}

// Smallest n for which (k, r) is a valid plan.
Vertex smallest_valid(int k, int r) {
  const std::uint64_t s0 = (std::uint64_t{1} << r) - 1;
  for (std::uint64_t n = s0 / k * k; n < (s0 + 16) * k; n += k) {
    if (stage_plan_valid(k, r, n)) return static_cast<Vertex>(n);
  }
  FAIL("no valid n");
  return 0;
}

}  // namespace

TEST_CASE("stage parameters for k = 3") {
  const StageParameters p = stage_parameters(3);
  CHECK(p.k == 3);
  CHECK(p.r == 17);
  CHECK(p.s0 == 131071);
  CHECK(p.n_min == 393183);
  CHECK(p.n_min % 3 == 0);
  CHECK(stage_plan_valid(3, p.r, p.n_min));
  CHECK_FALSE(stage_plan_valid(3, p.r, p.n_min - 3));
  CHECK(stage_plan_valid(3, p.r, 2 * p.n_min));
}

TEST_CASE("stage parameters beyond 64 bits") {
  CHECK_THROWS_AS(stage_parameters(6), GameError);
  CHECK_THROWS_AS(stage_parameters(1), GameError);
  CHECK_THROWS_AS(stage_parameters(5), GameError);
  const StageParameters p4 = stage_parameters(4);
  CHECK(p4.r >= 3 * 15 + 4);
  CHECK(stage_plan_valid(4, p4.r, p4.n_min));
  CHECK(stage_plan_valid_log2(6, 320, 330));
  CHECK_FALSE(stage_plan_valid_log2(6, 200, 330));
}

TEST_CASE("factor waiter rejects bad boards") {
  const StageParameters p = stage_parameters(2);
  CHECK_THROWS_AS(FactorWaiter(2, p, static_cast<Vertex>(p.n_min + 1)), GameError);
  CHECK_THROWS_AS(FactorWaiter(2, p, static_cast<Vertex>(p.n_min - 2)), GameError);
  try {
    FactorWaiter(3, p, 12);
    FAIL("accepted mismatched plan");
  } catch (const GameError& e) {
    CHECK(e.code() == ErrorCode::board_too_small);
  }
}

TEST_CASE("k = 2: perfect matching on every valid n, rounds as predicted") {
  const StageParameters p = stage_parameters(2);
  for (Vertex n = static_cast<Vertex>(p.n_min); n < p.n_min + 40; n += 2) {
    if (!stage_plan_valid(2, p.r, n)) continue;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const FactorRun r = play(2, p, n, seed);
      CHECK(r.won);
      CHECK(r.witness_ok);
      CHECK(r.rounds == factor_strategy_rounds(p, n));
    }
  }
}

TEST_CASE("k = 3 on reduced plans") {
  int plans = 0;
  for (int r = 10; r <= 13; ++r) {
    if (!stage_plan_valid(3, r, ((std::uint64_t{1} << r) - 1) * 3 + 30)) continue;
    ++plans;
    const Vertex n0 = smallest_valid(3, r);
    StageParameters p{3, r, (std::uint64_t{1} << r) - 1, n0};
    for (Vertex n = n0; n < n0 + 60; n += 3) {
      if (!stage_plan_valid(3, r, n)) continue;
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const FactorRun run = play(3, p, n, seed * 31 + n);
        CHECK(run.won);
        CHECK(run.witness_ok);
        CHECK(run.rounds == factor_strategy_rounds(p, n));
      }
    }
  }
  CHECK(plans >= 2);
}

TEST_CASE("k = 3 at n_min with the default plan") {
  const StageParameters p = stage_parameters(3);
  const FactorRun run = play(3, p, static_cast<Vertex>(p.n_min), 1);
  CHECK(run.won);
  CHECK(run.witness_ok);
  CHECK(run.rounds == factor_strategy_rounds(p, p.n_min));
  CHECK(run.blocks == p.n_min / 3);
}
