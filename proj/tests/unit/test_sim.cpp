#include <doctest.h>

#include "oracles/oracles.hpp"
#include "wcg/sim.hpp"

using namespace wcg;

namespace {

SimConfig triangle_config() {
  SimConfig c;
  c.n = 12;
  c.goal = GoalSpec::single_clique(4);
  c.waiter = "greedy";
  c.client = "random";
  c.games = 40;
  c.seed = 17;
  return c;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const GameError& e) {
    return e.code();
  }
  FAIL("no GameError thrown");
  return ErrorCode::config_error;
}

}  // namespace

TEST_CASE("output is identical for any worker count") {
  SimConfig c = triangle_config();
  c.events = EventParams{4, 5, 1, EventVariant::good_pairs, 64};
  const StatsReport one = run_games(c);
  for (unsigned w : {2u, 3u, 8u}) {
    c.workers = w;
    const StatsReport many = run_games(c);
    CHECK(many.to_csv() == one.to_csv());
    CHECK(many.to_json() == one.to_json());
  }
  CHECK(one.to_json().find("time") == std::string::npos);
}

TEST_CASE("per-game records") {
  SimConfig c = triangle_config();
  c.keep_transcripts = true;
  const StatsReport r = run_games(c);
  REQUIRE(r.records.size() == c.games);
  std::uint64_t wins = 0;
  for (const auto& g : r.records) {
    CHECK(g.red == g.rounds);
    CHECK(g.blue == g.rounds);
    CHECK(g.rounds <= c.effective_round_cap());
    CHECK(g.waiter_seed == derive_seed(c.seed, g.index, 0));
    CHECK(g.client_seed == derive_seed(c.seed, g.index, 1));
    REQUIRE(g.transcript);
    const Board b = replay(*g.transcript);
    CHECK(b.round() == g.rounds);
    CHECK(b.red_count() == g.red);
    CHECK(oracle::has_red_clique(b, 4) == g.waiter_won);
    if (g.waiter_won) {
      REQUIRE(g.witness.size() == 1);
      CHECK(oracle::all_red(b, g.witness[0]));
    }
    wins += g.waiter_won;
    CHECK(play_game(c, g.index).rounds == g.rounds);
  }
  CHECK(r.waiter_wins == wins);
  CHECK(r.min_rounds <= r.max_rounds);
  CHECK(r.to_csv().rfind("game_index,waiter_seed,client_seed,outcome,rounds,red,blue\n", 0) == 0);
}

TEST_CASE("round cap") {
  SimConfig c = triangle_config();
  c.goal = GoalSpec::single_clique(6);
  c.round_cap = 5;
  const StatsReport r = run_games(c);
  CHECK(r.max_rounds <= 5);
  CHECK(c.effective_round_cap() == 5);
  c.round_cap.reset();
  CHECK(c.effective_round_cap() == 33);
}

TEST_CASE("configuration errors") {
  SimConfig c = triangle_config();
  c.games = 0;
  CHECK(code_of([&] { run_games(c); }) == ErrorCode::config_error);
  c = triangle_config();
  c.goal = GoalSpec::clique_factor(5);
  CHECK(code_of([&] { run_games(c); }) == ErrorCode::config_error);
  c = triangle_config();
  c.waiter = "unknown";
  CHECK(code_of([&] { run_games(c); }) == ErrorCode::config_error);
  c = triangle_config();
  c.round_cap = 0;
  CHECK(code_of([&] { run_games(c); }) == ErrorCode::config_error);
}

TEST_CASE("degenerate event parameters") {
  SimConfig c = triangle_config();
  c.games = 20;
  c.events = EventParams{4, 100, 4, EventVariant::good_pairs, 64};  // more than C(3,2) pairs
  const StatsReport r = run_games(c);
  CHECK(r.mean_y == 0);
  CHECK(r.mean_s == 0);
  CHECK(r.mean_x == c.n);
  c.events = EventParams{4, 0, 0, EventVariant::good_pairs, 64};  // nobody is below degree 0
  const StatsReport z = run_games(c);
  CHECK(z.mean_x == 0);
  CHECK(z.mean_s == 0);
  CHECK(z.mean_y > 0);
}

TEST_CASE("factor games with the staged waiter at k = 2") {
  const StageParameters p = stage_parameters(2);
  SimConfig c;
  c.n = static_cast<Vertex>(p.n_min);
  c.goal = GoalSpec::clique_factor(2);
  c.waiter = "factor";
  c.games = 10;
  c.seed = 3;
  const StatsReport r = run_games(c);
  CHECK(r.waiter_wins == 10);
  for (const auto& g : r.records) CHECK(g.rounds == factor_strategy_rounds(p, c.n));
}

TEST_CASE("realizing waiter") {
  CHECK(RealizingWaiter::prebuilt_spokes(4) == 2);
  CHECK(RealizingWaiter::prebuilt_spokes(5) == 3);
  CHECK(RealizingWaiter::coin_rounds(4) == 2);
  CHECK(RealizingWaiter::coin_rounds(5) == 3);
  CHECK(RealizingWaiter::board_size(4) == 21);
  CHECK(RealizingWaiter::board_size(5) == 69);
  CHECK_THROWS_AS(RealizingWaiter(7), GameError);

  const TEstimate t4 = estimate_T_probability(4, 4000, 1);
  CHECK(t4.frequency == doctest::Approx(0.25).epsilon(0.1));
  CHECK(t4.within_bound());
  CHECK(t4.bound == doctest::Approx(0.5));
  CHECK(t4.wilson_low <= t4.frequency);
  CHECK(t4.frequency <= t4.wilson_high);
  const TEstimate t5 = estimate_T_probability(5, 4000, 2, true, 3);
  CHECK(t5.frequency == doctest::Approx(0.125).epsilon(0.15));
  CHECK(t5.within_bound());
  CHECK(estimate_T_probability(5, 4000, 2, true, 1).successes == t5.successes);

  // Without rim offers the clique never closes.
  CHECK(estimate_T_probability(4, 200, 1, false).successes == 0);
  CHECK_THROWS_AS(estimate_T_probability(4, 0, 1), GameError);
}

TEST_CASE("wilson interval") {
  auto [lo, hi] = wilson_interval(0, 100, 1.96);
  CHECK(lo == 0);
  CHECK(hi > 0);
  CHECK(hi < 0.05);
  std::tie(lo, hi) = wilson_interval(50, 100, 1.0);
  CHECK(lo == doctest::Approx(0.45).epsilon(0.01));
  CHECK(hi == doctest::Approx(0.55).epsilon(0.01));
  std::tie(lo, hi) = wilson_interval(100, 100, 1.96);
  CHECK(hi == doctest::Approx(1.0));
}

TEST_CASE("S expectation") {
  SimConfig c = triangle_config();
  c.n = 30;
  c.goal = GoalSpec::single_clique(5);
  c.games = 30;
  c.events = EventParams{4, 8, 1, EventVariant::good_pairs, 64};
  const SEstimate s = estimate_S_expectation(c);
  CHECK(s.low <= s.mean);
  CHECK(s.mean <= s.high);
  CHECK(s.n_over_4k == doctest::Approx(30.0 / 16));
  c.events.reset();
  CHECK_THROWS_AS(estimate_S_expectation(c), GameError);
}
