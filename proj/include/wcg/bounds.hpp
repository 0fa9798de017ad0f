#pragma once

#include <cstdint>

#include "wcg/detectors.hpp"

namespace wcg {

// Union bound over the index set of the T-events, all in log2.
//   good_pairs:      |Y| = C(d, k-1), d = floor(2^(k/6 - k/(2 log2 k))), P(T) <= 2^(-k^2/6 + k)
//   component_pairs: |Z| = d^(k-1) (k-1)!, d = floor(2^(k/3 - k/(2 log2 k))),
//                    P(T) <= 2^(-k^2/3 + k^2/(log2 k)^2)
struct BoundReport {
  std::int64_t k = 0;
  EventVariant variant = EventVariant::good_pairs;
  double log2_degree_cap = 0;   // log2 d, -inf when d = 0
  double log2_index_set = 0;    // -inf for an empty index set
  double log2_event = 0;
  double log2_union = 0;        // log2_index_set + log2_event
  double log2_target = 0;       // log2(1/(4k))
  bool index_set_exact = true;  // false when d is too large to floor exactly; then an upper bound
  bool below_target = false;
};

// Evaluated with 256-bit MPFR arithmetic. Throws config_error for k < 4.
BoundReport union_bound_value(std::int64_t k, EventVariant variant);

}  // namespace wcg
