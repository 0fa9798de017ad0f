#include <doctest.h>

#include <set>

#include "oracles/oracles.hpp"
#include "wcg/lemma_lab.hpp"
#include "wcg/rng.hpp"

using namespace wcg;

namespace {

// Component of x in the graph of the first `prefix` edges, by BFS.
std::vector<int> component(int k, const std::vector<std::pair<int, int>>& edges, std::size_t prefix, int x) {
  std::vector<char> in(k, 0);
  std::vector<int> out{x};
  in[x] = 1;
  for (std::size_t head = 0; head < out.size(); ++head) {
    for (std::size_t i = 0; i < prefix; ++i) {
      auto [a, b] = edges[i];
      for (auto [p, q] : {std::pair{a, b}, std::pair{b, a}}) {
        if (p == out[head] && !in[q]) {
          in[q] = 1;
          out.push_back(q);
        }
      }
    }
  }
  return out;
}

double doubling_ratio(int t) {
  const EdgeOrdering o = doubling_ordering(t);
  const auto c = component_pair_counts(o.timeline());
  return c[0] / (static_cast<double>(o.k) * o.k / 3.0);
}

}  // namespace

TEST_CASE("good-pair lemma holds exhaustively for k <= 5") {
  const PairSurvey s3 = verify_good_pair_lemma(3);
  CHECK(s3.orderings == 6);
  CHECK(s3.min_of_max == 1);
  const PairSurvey s4 = verify_good_pair_lemma(4);
  CHECK(s4.orderings == 720);
  CHECK(s4.required == 1);
  CHECK(s4.holds());
  CHECK(s4.sum_violations == 0);
  const PairSurvey s5 = verify_good_pair_lemma(5, 2);
  CHECK(s5.orderings == 3628800);
  CHECK(s5.required == 2);
  CHECK(s5.min_of_max >= 2);
  CHECK(s5.sum_violations == 0);
  // The witness attains the reported minimum.
  const auto counts = oracle::good_pairs(5, s5.witness.edges);
  CHECK(*std::max_element(counts.begin(), counts.end()) == s5.min_of_max);
  CHECK_THROWS_AS(verify_good_pair_lemma(6), GameError);
}

TEST_CASE("exhaustive minima agree with a brute force over all orderings at k = 4") {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) edges.emplace_back(a, b);
  std::sort(edges.begin(), edges.end());
  int good_min = 100, comp_min = 100;
  do {
    const auto g = oracle::good_pairs(4, edges);
    const auto c = oracle::component_pairs(4, edges);
    good_min = std::min(good_min, *std::max_element(g.begin(), g.end()));
    comp_min = std::min(comp_min, *std::max_element(c.begin(), c.end()));
  } while (std::next_permutation(edges.begin(), edges.end()));
  CHECK(survey_good_pairs(4, SurveyMode::all()).min_of_max == good_min);
  CHECK(survey_component_pairs(4, SurveyMode::all()).min_of_max == comp_min);
}

TEST_CASE("surveys are independent of the worker count") {
  for (int k : {4, 5}) {
    const PairSurvey a = survey_component_pairs(k, SurveyMode::all(), 1);
    const PairSurvey b = survey_component_pairs(k, SurveyMode::all(), 3);
    CHECK(a.min_of_max == b.min_of_max);
    CHECK(a.witness.edges == b.witness.edges);
  }
  const PairSurvey c = survey_good_pairs(8, SurveyMode::sampled(3000, 5), 1);
  const PairSurvey d = survey_good_pairs(8, SurveyMode::sampled(3000, 5), 4);
  CHECK(c.orderings == 3000);
  CHECK(c.min_of_max == d.min_of_max);
  CHECK(c.witness.edges == d.witness.edges);
  CHECK(c.sum_violations == 0);
}

TEST_CASE("pinned component-pair minima") {
  CHECK(survey_component_pair_lemma(4, SurveyMode::all()).min_of_max == 3);
  CHECK(survey_component_pair_lemma(5, SurveyMode::all()).min_of_max == 6);
}

TEST_CASE("orderings") {
  const EdgeOrdering o = random_ordering(7, 3);
  o.validate();
  CHECK(o.edges.size() == 21);
  CHECK(random_ordering(7, 3).edges == o.edges);
  CHECK(random_ordering(7, 4).edges != o.edges);
  CHECK(EdgeOrdering::from_text(o.to_text()).edges == o.edges);
  CHECK(EdgeOrdering::from_text("1 0\n2 0\n1 2\n").edges == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});
  CHECK_THROWS_AS(EdgeOrdering::from_text("0 1\n0 1\n1 2\n"), GameError);
  CHECK_THROWS_AS(EdgeOrdering::from_text("0 1\n0 x\n"), GameError);
  CHECK_THROWS_AS(EdgeOrdering::from_text("0 1\n0 2\n"), GameError);
  EdgeOrdering bad{3, {{0, 1}, {0, 2}, {1, 1}}};
  CHECK_THROWS_AS(bad.validate(), GameError);
}

TEST_CASE("doubling ordering") {
  CHECK(component_pair_counts(doubling_ordering(2).timeline()) == std::vector<int>{3, 3, 3, 3});
  double prev = 0;
  for (int t = 1; t <= 6; ++t) {
    const EdgeOrdering o = doubling_ordering(t);
    o.validate();
    // After each stage every block of 2^(j+1) consecutive vertices is a clique.
    std::size_t pos = 0;
    for (int j = 0; j < t; ++j) {
      const int block = 2 << j;
      pos += static_cast<std::size_t>(o.k / block) * (block / 2) * (block / 2);
      std::set<std::pair<int, int>> seen(o.edges.begin(), o.edges.begin() + static_cast<long>(pos));
      for (int a = 0; a < o.k; ++a)
        for (int b = a + 1; b < o.k; ++b) CHECK(seen.contains({a, b}) == (a / block == b / block));
    }
    const auto c = component_pair_counts(o.timeline());
    CHECK(std::all_of(c.begin(), c.end(), [&](int x) { return x == c[0]; }));
    CHECK(c == oracle::component_pairs(o.k, o.edges));
    const double r = doubling_ratio(t);
    if (t >= 2) {
      CHECK(r > prev);
      CHECK(r >= 0.55);
      CHECK(r <= 1.05);
    }
    prev = r;
  }
  CHECK_THROWS_AS(doubling_ordering(0), GameError);
}

TEST_CASE("random-order good pairs average C(k-1,2)/3") {
  const int k = 12;
  double total = 0;
  const int samples = 4000;
  for (int s = 0; s < samples; ++s) total += good_pair_counts(random_ordering(k, derive_seed(77, s)).timeline())[0];
  CHECK(total / samples == doctest::Approx(55.0 / 3.0).epsilon(0.03));
}

TEST_CASE("rare and connective edges") {
  // Matching stage of the doubling ordering: every edge is the first at both ends.
  const EdgeOrdering d = doubling_ordering(4);
  const auto rep = classify_rare_connective(d, {1, 1});
  for (int i = 0; i < 8; ++i) CHECK(rep.labels[i].rare);
  for (std::size_t i = 8; i < rep.labels.size(); ++i) CHECK_FALSE(rep.labels[i].rare);

  const auto none = classify_rare_connective(d, {64, 64});
  CHECK(none.connective == 0);
  CHECK(none.rare == d.edges.size());

  // Oracle replay on path orders and random orders.
  std::vector<EdgeOrdering> cases;
  EdgeOrdering path{8, {}};
  for (int a = 0; a + 1 < 8; ++a) path.edges.emplace_back(a, a + 1);
  for (int a = 0; a < 8; ++a)
    for (int b = a + 2; b < 8; ++b) path.edges.emplace_back(a, b);
  cases.push_back(path);
  for (std::uint64_t s = 0; s < 40; ++s) cases.push_back(random_ordering(8 + static_cast<int>(s % 5), s));
  for (const auto& o : cases) {
    for (RareConnectiveThresholds th : {RareConnectiveThresholds{2, 2}, RareConnectiveThresholds{3, 3}}) {
      const auto r = classify_rare_connective(o, th);
      std::vector<std::uint64_t> at(o.k, 0);
      std::uint64_t rare = 0;
      for (std::size_t i = 0; i < o.edges.size(); ++i) {
        auto [a, b] = o.edges[i];
        int before_a = 0, before_b = 0;
        for (std::size_t j = 0; j < i; ++j) {
          before_a += o.edges[j].first == a || o.edges[j].second == a;
          before_b += o.edges[j].first == b || o.edges[j].second == b;
        }
        const bool is_rare = before_a < th.rare_count || before_b < th.rare_count;
        const auto ca = component(o.k, o.edges, i, a);
        const auto cb = component(o.k, o.edges, i, b);
        const bool merge = std::find(ca.begin(), ca.end(), b) == ca.end();
        const bool at_a = merge && static_cast<int>(cb.size()) >= th.component_size;
        const bool at_b = merge && static_cast<int>(ca.size()) >= th.component_size;
        CHECK(r.labels[i].rare == is_rare);
        CHECK(r.labels[i].connective_at_first == at_a);
        CHECK(r.labels[i].connective_at_second == at_b);
        rare += is_rare;
        at[a] += at_a;
        at[b] += at_b;
      }
      CHECK(r.rare == rare);
      CHECK(r.connective_at == at);
      CHECK(r.rare <= static_cast<std::uint64_t>(o.k) * th.rare_count);
      for (int z = 0; z < o.k; ++z) CHECK(r.connective_at[z] <= static_cast<std::uint64_t>(o.k / th.component_size));
    }
  }
}

TEST_CASE("doubling counts do not depend on the order inside a stage") {
  for (int t = 2; t <= 5; ++t) {
    const EdgeOrdering base = doubling_ordering(t);
    const auto expect = component_pair_counts(base.timeline());
    CounterRng rng(derive_seed(31, t));
    for (int trial = 0; trial < 20; ++trial) {
      EdgeOrdering o = base;
      std::size_t begin = 0;
      for (int j = 0; j < t; ++j) {
        const int block = 2 << j;
        const std::size_t len = static_cast<std::size_t>(o.k / block) * (block / 2) * (block / 2);
        for (std::size_t i = len; i > 1; --i) std::swap(o.edges[begin + i - 1], o.edges[begin + rng.below(i)]);
        begin += len;
      }
      o.validate();
      CHECK(component_pair_counts(o.timeline()) == expect);
    }
  }
}
