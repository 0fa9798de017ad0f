#include "wcg/strategy.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace wcg {

Edge ScriptedClient::choose(const Board&, const Offer& offer) {
  if (next_ >= bits_.size()) {
    throw GameError(ErrorCode::script_underrun,
                    "script of length " + std::to_string(bits_.size()) + " exhausted");
  }
  return bits_[next_++] ? offer.first : offer.second;
}

std::string ScriptedClient::name() const {
  std::string s = "scripted:";
  for (bool b : bits_) s += b ? '1' : '0';
  return s;
}

std::unique_ptr<ClientStrategy> random_client(std::uint64_t seed) {
  return std::make_unique<RandomClient>(seed);
}

std::unique_ptr<ClientStrategy> scripted_client(std::vector<bool> bits) {
  return std::make_unique<ScriptedClient>(std::move(bits));
}

// --- CliqueBuilder ---------------------------------------------------------------

CliqueBuilder::CliqueBuilder(int l, std::vector<Vertex> candidates) : l_(l) {
  if (l < 2 || l > 40) throw GameError(ErrorCode::bad_budget, "clique size " + std::to_string(l));
  const std::uint64_t need = (std::uint64_t{1} << l) - 1;
  if (candidates.size() != need) {
    throw GameError(ErrorCode::bad_budget, "need " + std::to_string(need) + " candidates, got " +
                                               std::to_string(candidates.size()));
  }
  std::vector<Vertex> sorted = candidates;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw GameError(ErrorCode::bad_budget, "candidates are not distinct");
  }
  current_ = std::move(candidates);
  clique_.push_back(current_.front());
}

std::unique_ptr<CliqueBuilder> clique_builder(int l, std::vector<Vertex> candidates) {
  return std::make_unique<CliqueBuilder>(l, std::move(candidates));
}

void CliqueBuilder::check_clean(const Board& board) const {
  const std::size_t s = current_.size();
  for (Vertex v : current_) {
    if (v >= board.n()) throw GameError(ErrorCode::bad_budget, "candidate outside the board");
  }
  const std::uint64_t pair_checks = static_cast<std::uint64_t>(s) * (s - 1) / 2;
  auto dirty = [](const Edge& e) {
    return GameError(ErrorCode::dirty_board,
                     "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") already claimed");
  };
  if (pair_checks <= board.claimed_count()) {
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t j = i + 1; j < s; ++j) {
        Edge e(current_[i], current_[j]);
        if (!board.is_unclaimed(e)) throw dirty(e);
      }
    }
    return;
  }
  std::vector<char> member(board.n(), 0);
  for (Vertex v : current_) member[v] = 1;
  std::optional<Edge> bad;
  board.for_each_claimed([&](const Edge& e, EdgeColor, Round) {
    if (!bad && member[e.u] && member[e.v]) bad = e;
  });
  if (bad) throw dirty(*bad);
}

std::optional<Offer> CliqueBuilder::next_offer(const Board& board) {
  if (!checked_) {
    check_clean(board);
    checked_ = true;
  }
  if (done()) return std::nullopt;
  const Vertex w = current_.front();
  return Offer{Edge(w, current_[cursor_]), Edge(w, current_[cursor_ + 1])};
}

void CliqueBuilder::on_choice(const Board&, const Offer&, const Edge& chosen) {
  const Vertex w = current_.front();
  next_.push_back(chosen.other(w));
  cursor_ += 2;
  ++rounds_;
  if (cursor_ >= current_.size()) advance();
}

void CliqueBuilder::advance() {
  current_.swap(next_);
  next_.clear();
  clique_.push_back(current_.front());
  cursor_ = 1;
  // |S_j| = 2^m - 1, so the vertices paired against w_j always come in pairs.
  assert(current_.size() % 2 == 1);
}

// --- Baselines -------------------------------------------------------------------

std::optional<Offer> RandomOfferWaiter::next_offer(const Board& board) {
  const EdgeIndex total = board.total_edges();
  const EdgeIndex free = board.unclaimed_count();
  if (free < 2) return std::nullopt;
  if (free * 4 >= total) {
    auto draw = [&] {
      for (;;) {
        Edge e = Edge::from_index(rng_.below(total));
        if (board.is_unclaimed(e)) return e;
      }
    };
    Edge a = draw();
    Edge b = draw();
    while (b == a) b = draw();
    return Offer{a, b};
  }
  std::vector<EdgeIndex> unclaimed;
  unclaimed.reserve(free);
  for (EdgeIndex i = 0; i < total; ++i) {
    if (board.is_unclaimed(Edge::from_index(i))) unclaimed.push_back(i);
  }
  const std::uint64_t a = rng_.below(unclaimed.size());
  std::uint64_t b = rng_.below(unclaimed.size() - 1);
  if (b >= a) ++b;
  return Offer{Edge::from_index(unclaimed[a]), Edge::from_index(unclaimed[b])};
}

std::optional<Offer> GreedyDegreeWaiter::next_offer(const Board& board) {
  if (!board.can_continue()) return std::nullopt;
  std::vector<Vertex> order(board.n());
  std::iota(order.begin(), order.end(), Vertex{0});
  std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) {
    return board.red_degree(a) > board.red_degree(b);
  });
  for (Vertex x : order) {
    std::optional<Edge> first;
    for (Vertex y = 0; y < board.n(); ++y) {
      if (y == x) continue;
      Edge e(x, y);
      if (!board.is_unclaimed(e)) continue;
      if (!first) {
        first = e;
      } else {
        return Offer{*first, e};
      }
    }
  }
  std::optional<Edge> first;
  for (EdgeIndex i = 0; i < board.total_edges(); ++i) {
    Edge e = Edge::from_index(i);
    if (!board.is_unclaimed(e)) continue;
    if (!first) {
      first = e;
    } else {
      return Offer{*first, e};
    }
  }
  return std::nullopt;
}

}  // namespace wcg
