#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wcg/detectors.hpp"

namespace wcg {

// The order in which the C(k,2) edges of a K_k are added.
struct EdgeOrdering {
  int k = 0;
  std::vector<std::pair<int, int>> edges;  // a < b

  // Throws bad_ordering unless every edge appears exactly once.
  void validate() const;
  CliqueTimeline timeline() const;

  // One "a b" pair per line.
  std::string to_text() const;
  static EdgeOrdering from_text(const std::string& text);
};

EdgeOrdering random_ordering(int k, std::uint64_t seed);

// Perfect matching first, then all edges between paired components of size
// 2^j for j = 1..t-1, each stage in lexicographic order. k = 2^t.
EdgeOrdering doubling_ordering(int t);

struct PairSurvey {
  int k = 0;
  bool exhaustive = false;
  std::uint64_t orderings = 0;
  std::uint64_t seed = 0;          // sampled mode only
  int min_of_max = 0;              // min over orderings of the largest vertex count
  std::int64_t required = 0;       // good pairs: ceil((k-1)(k-2)/6)
  std::uint64_t sum_violations = 0;  // orderings whose good-pair total differs from C(k,3)
  EdgeOrdering witness;            // first ordering attaining min_of_max

  bool holds() const { return min_of_max >= required; }
};

struct SurveyMode {
  bool exhaustive = true;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;

  static SurveyMode all() { return {}; }
  static SurveyMode sampled(std::uint64_t samples, std::uint64_t seed) { return {false, samples, seed}; }
};

constexpr int kMaxExhaustiveK = 5;

// Exhaustive for k <= 5 (throws resource_limit above), sampled otherwise.
PairSurvey survey_good_pairs(int k, SurveyMode mode, unsigned workers = 1);
PairSurvey survey_component_pairs(int k, SurveyMode mode, unsigned workers = 1);

// Exhaustive survey of the good-pair lemma; throws resource_limit for k > 5.
PairSurvey verify_good_pair_lemma(int k, unsigned workers = 1);
PairSurvey survey_component_pair_lemma(int k, SurveyMode mode, unsigned workers = 1);

struct RareConnectiveThresholds {
  int rare_count = 1;      // first rare_count edges at a vertex are rare
  int component_size = 1;  // components at least this large make edges connective
};

struct EdgeLabel {
  bool rare = false;
  bool connective_at_first = false;   // connective at edges[i].first
  bool connective_at_second = false;  // connective at edges[i].second
  bool connective() const { return connective_at_first || connective_at_second; }
};

struct RareConnectiveReport {
  std::vector<EdgeLabel> labels;  // parallel to the ordering
  std::uint64_t rare = 0;
  std::uint64_t connective = 0;
  std::vector<std::uint64_t> connective_at;  // per vertex
};

RareConnectiveReport classify_rare_connective(const EdgeOrdering& ordering,
                                              const RareConnectiveThresholds& thresholds);

}  // namespace wcg
