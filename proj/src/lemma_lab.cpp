#include "wcg/lemma_lab.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "wcg/rng.hpp"

namespace wcg {

void EdgeOrdering::validate() const {
  if (k < 2) throw GameError(ErrorCode::bad_ordering, "k must be >= 2");
  const std::size_t m = static_cast<std::size_t>(k) * (k - 1) / 2;
  if (edges.size() != m) {
    throw GameError(ErrorCode::bad_ordering,
                    "expected " + std::to_string(m) + " edges, got " + std::to_string(edges.size()));
  }
  std::vector<char> seen(m, 0);
  for (auto [a, b] : edges) {
    if (a < 0 || b >= k || a >= b) {
      throw GameError(ErrorCode::bad_ordering, "bad pair " + std::to_string(a) + " " + std::to_string(b));
    }
    auto idx = edge_index(static_cast<Vertex>(a), static_cast<Vertex>(b));
    if (seen[idx]++) {
      throw GameError(ErrorCode::bad_ordering, "repeated pair " + std::to_string(a) + " " + std::to_string(b));
    }
  }
}

CliqueTimeline EdgeOrdering::timeline() const {
  validate();
  std::vector<std::vector<std::int64_t>> times(k, std::vector<std::int64_t>(k, -1));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto [a, b] = edges[i];
    times[a][b] = times[b][a] = static_cast<std::int64_t>(i);
  }
  return CliqueTimeline(std::move(times));
}

std::string EdgeOrdering::to_text() const {
  std::string out;
  for (auto [a, b] : edges) out += std::to_string(a) + " " + std::to_string(b) + "\n";
  return out;
}

EdgeOrdering EdgeOrdering::from_text(const std::string& text) {
  EdgeOrdering o;
  std::istringstream in(text);
  std::string line;
  int max_vertex = -1;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    int a, b;
    std::string extra;
    if (!(fields >> a >> b) || (fields >> extra)) {
      throw GameError(ErrorCode::parse_error, "expected 'a b', got '" + line + "'");
    }
    if (a > b) std::swap(a, b);
    o.edges.emplace_back(a, b);
    max_vertex = std::max(max_vertex, b);
  }
  o.k = max_vertex + 1;
  o.validate();
  return o;
}

EdgeOrdering random_ordering(int k, std::uint64_t seed) {
  EdgeOrdering o;
  o.k = k;
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) o.edges.emplace_back(a, b);
  }
  CounterRng rng(seed);
  for (std::size_t i = o.edges.size(); i > 1; --i) {
    std::swap(o.edges[i - 1], o.edges[rng.below(i)]);
  }
  return o;
}

EdgeOrdering doubling_ordering(int t) {
  if (t < 1 || t > 12) throw GameError(ErrorCode::config_error, "t must be in [1, 12]");
  EdgeOrdering o;
  o.k = 1 << t;
  for (int j = 0; j < t; ++j) {
    const int size = 1 << j;
    for (int left = 0; left < o.k; left += 2 * size) {
      for (int a = left; a < left + size; ++a) {
        for (int b = left + size; b < left + 2 * size; ++b) o.edges.emplace_back(a, b);
      }
    }
  }
  return o;
}

namespace {

enum class Statistic { good, component };

struct Partial {
  std::uint64_t orderings = 0;
  int min_of_max = std::numeric_limits<int>::max();
  std::uint64_t sum_violations = 0;
  std::vector<std::pair<int, int>> witness;

  void absorb(const Partial& other) {
    orderings += other.orderings;
    sum_violations += other.sum_violations;
    if (other.min_of_max < min_of_max) {
      min_of_max = other.min_of_max;
      witness = other.witness;
    }
  }
};

std::int64_t binom3(int k) { return static_cast<std::int64_t>(k) * (k - 1) * (k - 2) / 6; }

// Depth-first enumeration of all orderings with a fixed first edge, keeping
// good-pair and component-pair counts incrementally.
class Enumerator {
 public:
  Enumerator(int k, Statistic stat) : k_(k), stat_(stat) {
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) pairs_.emplace_back(a, b);
    }
    placed_.assign(pairs_.size(), 0);
    adj_.assign(k, std::vector<char>(k, 0));
    good_.assign(k, 0);
    comp_.assign(k, 0);
    labels_.assign(pairs_.size() + 1, std::vector<int>(k));
    std::iota(labels_[0].begin(), labels_[0].end(), 0);
  }

  std::size_t edge_count() const { return pairs_.size(); }

  Partial run(std::size_t first) {
    Partial out;
    place(0, first);
    dfs(1, out);
    unplace(0, first);
    return out;
  }

 private:
  void place(std::size_t depth, std::size_t e) {
    auto [a, b] = pairs_[e];
    placed_[e] = 1;
    order_.push_back(pairs_[e]);
    for (int c = 0; c < k_; ++c) {
      if (adj_[a][c] && adj_[b][c]) ++good_[c];
    }
    adj_[a][b] = adj_[b][a] = 1;
    const auto& cur = labels_[depth];
    auto& next = labels_[depth + 1];
    next = cur;
    if (cur[a] == cur[b]) {
      for (int x = 0; x < k_; ++x) {
        if (cur[x] == cur[a]) ++comp_[x];
      }
    } else {
      for (int x = 0; x < k_; ++x) {
        if (cur[x] == cur[b]) next[x] = cur[a];
      }
    }
  }

  void unplace(std::size_t depth, std::size_t e) {
    auto [a, b] = pairs_[e];
    placed_[e] = 0;
    order_.pop_back();
    adj_[a][b] = adj_[b][a] = 0;
    for (int c = 0; c < k_; ++c) {
      if (adj_[a][c] && adj_[b][c]) --good_[c];
    }
    const auto& cur = labels_[depth];
    if (cur[a] == cur[b]) {
      for (int x = 0; x < k_; ++x) {
        if (cur[x] == cur[a]) --comp_[x];
      }
    }
  }

  void dfs(std::size_t depth, Partial& out) {
    if (depth == pairs_.size()) {
      ++out.orderings;
      if (std::accumulate(good_.begin(), good_.end(), std::int64_t{0}) != binom3(k_)) ++out.sum_violations;
      const auto& counts = stat_ == Statistic::good ? good_ : comp_;
      const int mx = *std::max_element(counts.begin(), counts.end());
      if (mx < out.min_of_max) {
        out.min_of_max = mx;
        out.witness = order_;
      }
      return;
    }
    for (std::size_t e = 0; e < pairs_.size(); ++e) {
      if (placed_[e]) continue;
      place(depth, e);
      dfs(depth + 1, out);
      unplace(depth, e);
    }
  }

  int k_;
  Statistic stat_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<char> placed_;
  std::vector<std::vector<char>> adj_;
  std::vector<int> good_;
  std::vector<int> comp_;
  std::vector<std::vector<int>> labels_;
  std::vector<std::pair<int, int>> order_;
};

// Runs job(i) for i in [0, count) on `workers` threads; results in index order.
template <class Job>
std::vector<Partial> parallel_partials(std::size_t count, unsigned workers, Job job) {
  std::vector<Partial> parts(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) parts[i] = job(i);
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  return parts;
}

PairSurvey survey(int k, SurveyMode mode, unsigned workers, Statistic stat) {
  if (k < 3) throw GameError(ErrorCode::config_error, "k must be >= 3");
  PairSurvey s;
  s.k = k;
  s.exhaustive = mode.exhaustive;
  s.required = stat == Statistic::good ? pair_threshold(k, EventVariant::good_pairs)
                                       : pair_threshold(k, EventVariant::component_pairs);
  std::vector<Partial> parts;
  if (mode.exhaustive) {
    if (k > kMaxExhaustiveK) {
      throw GameError(ErrorCode::resource_limit,
                      "exhaustive enumeration is capped at k = " + std::to_string(kMaxExhaustiveK) +
                          "; use sampled mode");
    }
    const std::size_t m = static_cast<std::size_t>(k) * (k - 1) / 2;
    parts = parallel_partials(m, workers, [&](std::size_t first) { return Enumerator(k, stat).run(first); });
  } else {
    if (mode.samples == 0) throw GameError(ErrorCode::config_error, "samples must be >= 1");
    s.seed = mode.seed;
    constexpr std::uint64_t kChunk = 1024;
    const std::size_t chunks = (mode.samples + kChunk - 1) / kChunk;
    parts = parallel_partials(chunks, workers, [&](std::size_t c) {
      Partial p;
      const std::uint64_t end = std::min<std::uint64_t>(mode.samples, (c + 1) * kChunk);
      for (std::uint64_t i = c * kChunk; i < end; ++i) {
        const EdgeOrdering o = random_ordering(k, derive_seed(mode.seed, i));
        const CliqueTimeline t = o.timeline();
        const auto good = good_pair_counts(t);
        ++p.orderings;
        if (std::accumulate(good.begin(), good.end(), std::int64_t{0}) != binom3(k)) ++p.sum_violations;
        const auto counts = stat == Statistic::good ? good : component_pair_counts(t);
        const int mx = *std::max_element(counts.begin(), counts.end());
        if (mx < p.min_of_max) {
          p.min_of_max = mx;
          p.witness = o.edges;
        }
      }
      return p;
    });
  }
  Partial total;
  for (const auto& p : parts) total.absorb(p);
  s.orderings = total.orderings;
  s.min_of_max = total.min_of_max;
  s.sum_violations = total.sum_violations;
  s.witness.k = k;
  s.witness.edges = total.witness;
  return s;
}

}  // namespace

PairSurvey survey_good_pairs(int k, SurveyMode mode, unsigned workers) {
  return survey(k, mode, workers, Statistic::good);
}

PairSurvey survey_component_pairs(int k, SurveyMode mode, unsigned workers) {
  return survey(k, mode, workers, Statistic::component);
}

PairSurvey verify_good_pair_lemma(int k, unsigned workers) {
  return survey(k, SurveyMode::all(), workers, Statistic::good);
}

PairSurvey survey_component_pair_lemma(int k, SurveyMode mode, unsigned workers) {
  return survey(k, mode, workers, Statistic::component);
}

RareConnectiveReport classify_rare_connective(const EdgeOrdering& ordering,
                                              const RareConnectiveThresholds& thresholds) {
  ordering.validate();
  const int k = ordering.k;
  RareConnectiveReport report;
  report.connective_at.assign(k, 0);
  std::vector<int> added(k, 0);
  std::vector<int> parent(k), size(k, 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : ordering.edges) {
    EdgeLabel label;
    label.rare = ++added[a] <= thresholds.rare_count;
    label.rare = (++added[b] <= thresholds.rare_count) || label.rare;
    const int ra = find(a), rb = find(b);
    if (ra != rb) {
      label.connective_at_first = size[rb] >= thresholds.component_size;
      label.connective_at_second = size[ra] >= thresholds.component_size;
      parent[ra] = rb;
      size[rb] += size[ra];
    }
    report.rare += label.rare;
    report.connective += label.connective();
    report.connective_at[a] += label.connective_at_first;
    report.connective_at[b] += label.connective_at_second;
    report.labels.push_back(label);
  }
  return report;
}

}  // namespace wcg
