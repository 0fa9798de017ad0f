#include "wcg/board.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wcg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_size: return "invalid-size";
    case ErrorCode::loop_edge: return "loop-edge";
    case ErrorCode::vertex_out_of_range: return "vertex-out-of-range";
    case ErrorCode::illegal_offer: return "illegal-offer";
    case ErrorCode::illegal_choice: return "illegal-choice";
    case ErrorCode::replay_error: return "replay-error";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::script_underrun: return "script-underrun";
    case ErrorCode::bad_budget: return "bad-budget";
    case ErrorCode::dirty_board: return "dirty-board";
    case ErrorCode::board_too_small: return "board-too-small";
    case ErrorCode::indivisible: return "indivisible";
    case ErrorCode::resource_limit: return "resource-limit";
    case ErrorCode::game_over: return "game-over";
    case ErrorCode::bad_ordering: return "bad-ordering";
    case ErrorCode::not_encodable: return "not-encodable";
    case ErrorCode::neighborhood_cap: return "neighborhood-cap";
    case ErrorCode::config_error: return "config-error";
  }
  return "unknown";
}

EdgeIndex edge_index(Vertex u, Vertex v) {
  if (u == v) throw GameError(ErrorCode::loop_edge, "vertex " + std::to_string(u));
  if (u > v) std::swap(u, v);
  return static_cast<EdgeIndex>(v) * (v - 1) / 2 + u;
}

Edge::Edge(Vertex a, Vertex b) {
  if (a == b) throw GameError(ErrorCode::loop_edge, "vertex " + std::to_string(a));
  u = std::min(a, b);
  v = std::max(a, b);
}

Edge Edge::from_index(EdgeIndex index) {
  // Largest v with v(v-1)/2 <= index; the floating estimate is corrected below.
  auto v = static_cast<EdgeIndex>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(index))) / 2.0);
  while (v * (v - 1) / 2 > index) --v;
  while ((v + 1) * v / 2 <= index) ++v;
  Edge e;
  e.v = static_cast<Vertex>(v);
  e.u = static_cast<Vertex>(index - v * (v - 1) / 2);
  return e;
}

Board::Board(Vertex n) : n_(n) {
  if (n < 2) throw GameError(ErrorCode::invalid_size, "n = " + std::to_string(n) + " < 2");
  red_adj_.resize(n);
}

void Board::check_edge(const Edge& e) const {
  if (e.v >= n_) {
    throw GameError(ErrorCode::vertex_out_of_range,
                    "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                        ") on n = " + std::to_string(n_));
  }
}

EdgeColor Board::color(const Edge& e) const {
  auto it = colors_.find(e.index());
  return it == colors_.end() ? EdgeColor::unclaimed : unpack_color(it->second);
}

bool Board::is_red(Vertex a, Vertex b) const {
  if (a == b) return false;
  auto it = colors_.find(edge_index(a, b));
  return it != colors_.end() && (it->second & 1);
}

std::optional<Round> Board::placed_round(const Edge& e) const {
  auto it = colors_.find(e.index());
  if (it == colors_.end()) return std::nullopt;
  return unpack_round(it->second);
}

void Board::check_offer(const Offer& offer) const {
  if (offer.first == offer.second) {
    throw GameError(ErrorCode::illegal_offer, "offer repeats edge " + std::to_string(offer.first.index()));
  }
  for (const Edge& e : {offer.first, offer.second}) {
    if (e.v >= n_) throw GameError(ErrorCode::illegal_offer, "edge outside the board");
    if (colors_.contains(e.index())) {
      throw GameError(ErrorCode::illegal_offer, "edge " + std::to_string(e.index()) + " already claimed");
    }
  }
}

void Board::apply_round(const Offer& offer, const Edge& choice) {
  check_offer(offer);
  if (!offer.contains(choice)) {
    throw GameError(ErrorCode::illegal_choice, "edge " + std::to_string(choice.index()) + " not offered");
  }
  const Edge& rejected = offer.other(choice);
  ++round_;
  colors_.emplace(choice.index(), (round_ << 1) | 1);
  colors_.emplace(rejected.index(), round_ << 1);
  red_adj_[choice.u].push_back(choice.v);
  red_adj_[choice.v].push_back(choice.u);
  ++red_count_;
}

bool Board::finish(LeftoverPolicy policy) {
  if (policy != LeftoverPolicy::to_waiter || unclaimed_count() != 1) return false;
  for (EdgeIndex i = 0; i < total_edges(); ++i) {
    if (!colors_.contains(i)) {
      colors_.emplace(i, round_ << 1);
      return true;
    }
  }
  return false;
}

std::vector<ClaimedEdge> Board::claimed_edges() const {
  std::vector<ClaimedEdge> out;
  out.reserve(colors_.size());
  for_each_claimed([&](const Edge& e, EdgeColor c, Round r) { out.push_back({e, c, r}); });
  std::sort(out.begin(), out.end(),
            [](const ClaimedEdge& a, const ClaimedEdge& b) { return a.edge.index() < b.edge.index(); });
  return out;
}

}  // namespace wcg
