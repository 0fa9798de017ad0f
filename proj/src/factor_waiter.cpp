#include <algorithm>
#include <cassert>
#include <cmath>

#include "wcg/strategy.hpp"

namespace wcg {

namespace {

std::uint64_t pow2(int e) { return std::uint64_t{1} << e; }

// Stage III: each leftover vertex consumes k-1 anchors and needs 2(k-1) of them.
bool stage_three_fits(int k, std::uint64_t r, std::uint64_t leftovers) {
  std::uint64_t rf = r;
  const std::uint64_t need = 2 * static_cast<std::uint64_t>(k - 1);
  for (std::uint64_t i = 0; i < leftovers; ++i) {
    if (rf < need) return false;
    rf -= k - 1;
  }
  return true;
}

struct Accounting {
  bool valid = false;
  std::uint64_t b_runs = 0;
  std::uint64_t a_runs = 0;
  std::uint64_t leftovers = 0;
};

Accounting account(int k, int r, std::uint64_t n) {
  Accounting acc;
  if (k < 2 || r < k || r >= 63 || n % k != 0) return acc;
  const std::uint64_t s0 = pow2(r) - 1;
  if (n < s0) return acc;
  const std::uint64_t run = pow2(k) - 1;
  const std::uint64_t b = s0 - r;
  std::uint64_t pool = n - s0;
  if (b > 0) {
    // The last B-led run still needs 2^k - 2 vertices of A minus F.
    const std::uint64_t used_before_last = (b - 1) * (k - 1);
    if (pool < used_before_last || pool - used_before_last < run - 1) return acc;
    pool -= b * (k - 1);
  }
  acc.b_runs = b;
  if (pool >= run) {
    acc.a_runs = (pool - run) / k + 1;
    pool -= acc.a_runs * k;
  }
  acc.leftovers = pool;
  if (!stage_three_fits(k, r, pool)) return acc;
  const std::uint64_t rf_left = r - pool * (k - 1);
  acc.valid = rf_left % k == 0;
  return acc;
}

}  // namespace

bool stage_plan_valid(int k, int r, std::uint64_t n) { return account(k, r, n).valid; }

bool stage_plan_valid_log2(int k, double r, double log2_n) {
  if (k < 2) return false;
  // Stage III supply for the worst case of 2^k - 2 leftovers.
  const double stage_three = (std::ldexp(1.0, k) - 1.0) * (k - 1);
  // n_min <= s0 + (k-1) s0 + 2^k <= k 2^r once r >= k.
  return r >= stage_three && r >= k && log2_n >= r + std::log2(static_cast<double>(k));
}

StageParameters stage_parameters(int k) {
  if (k < 2) throw GameError(ErrorCode::config_error, "k must be >= 2");
  if (k > 5) throw GameError(ErrorCode::resource_limit, "stage sizes for k > 5 overflow 64 bits");
  int r = (k - 1) * (static_cast<int>(pow2(k)) - 1) + k;
  while (!stage_three_fits(k, r, pow2(k) - 2)) ++r;
  if (r >= 63) {
    throw GameError(ErrorCode::resource_limit,
                    "anchor clique of size " + std::to_string(r) + " needs 2^" + std::to_string(r) +
                        " vertices");
  }
  StageParameters p;
  p.k = k;
  p.r = r;
  p.s0 = pow2(r) - 1;
  const std::uint64_t b = p.s0 - r;
  std::uint64_t n = p.s0 + (b > 0 ? (b - 1) * (k - 1) + pow2(k) - 2 : 0);
  n = (n + k - 1) / k * k;
  while (!stage_plan_valid(k, r, n)) n += k;
  while (n >= p.s0 + k && stage_plan_valid(k, r, n - k)) n -= k;
  p.n_min = n;
  return p;
}

std::uint64_t factor_strategy_rounds(const StageParameters& plan, std::uint64_t n) {
  const Accounting acc = account(plan.k, plan.r, n);
  if (!acc.valid) throw GameError(ErrorCode::board_too_small, "plan does not cover n = " + std::to_string(n));
  return CliqueBuilder::exact_rounds(plan.r) +
         (acc.b_runs + acc.a_runs) * CliqueBuilder::exact_rounds(plan.k) +
         acc.leftovers * (plan.k - 1);
}

// --- FactorWaiter ------------------------------------------------------------------

FactorWaiter::FactorWaiter(int k, StageParameters plan, Vertex n) : k_(k), plan_(plan), n_(n) {
  if (k < 2 || n % static_cast<Vertex>(k) != 0) {
    throw GameError(ErrorCode::indivisible, std::to_string(k) + " does not divide n = " + std::to_string(n));
  }
  if (plan.k != k || n < plan.n_min || !stage_plan_valid(k, plan.r, n)) {
    throw GameError(ErrorCode::board_too_small,
                    "n = " + std::to_string(n) + " below n_min = " + std::to_string(plan.n_min));
  }
  in_r_.assign(n, 0);
  in_f_.assign(n, 0);
  std::vector<Vertex> s0(plan.s0);
  for (Vertex v = 0; v < s0.size(); ++v) s0[v] = v;
  builder_ = std::make_unique<CliqueBuilder>(plan.r, std::move(s0));
}

std::optional<Offer> FactorWaiter::next_offer(const Board& board) {
  switch (stage_) {
    case FactorStage::stage_one:
    case FactorStage::stage_two:
      return builder_->next_offer(board);
    case FactorStage::stage_three:
      return stage_three_offer(board);
    case FactorStage::done:
      return std::nullopt;
  }
  return std::nullopt;
}

void FactorWaiter::on_choice(const Board& board, const Offer& offer, const Edge& chosen) {
  if (stage_ == FactorStage::stage_one || stage_ == FactorStage::stage_two) {
    builder_->on_choice(board, offer, chosen);
    if (!builder_->done()) return;
    if (stage_ == FactorStage::stage_one) {
      r_set_ = builder_->clique();
      for (Vertex v : r_set_) in_r_[v] = 1;
      for (Vertex v = 0; v < plan_.s0; ++v) {
        if (!in_r_[v]) b_pool_.push_back(v);
      }
      for (Vertex v = static_cast<Vertex>(plan_.s0); v < n_; ++v) a_pool_.push_back(v);
      stage_ = FactorStage::stage_two;
    } else {
      finish_run();
    }
    start_stage_two_run();
    return;
  }
  if (stage_ == FactorStage::stage_three) {
    const Vertex z = z_list_[z_pos_];
    z_red_.push_back(chosen.other(z));
    rf_cursor_ += 2;
    if (z_red_.size() == static_cast<std::size_t>(k_ - 1)) {
      std::vector<Vertex> block{z};
      block.insert(block.end(), z_red_.begin(), z_red_.end());
      add_block(std::move(block));
      std::erase_if(rf_, [&](Vertex v) { return in_f_[v] != 0; });
      rf_cursor_ = 0;
      z_red_.clear();
      if (++z_pos_ == z_list_.size()) close_out();
    }
  }
}

void FactorWaiter::start_stage_two_run() {
  const std::size_t run = pow2(k_) - 1;
  run_candidates_.clear();
  if (!b_pool_.empty()) {
    assert(a_pool_.size() >= run - 1);
    run_candidates_.push_back(b_pool_.front());
    b_pool_.pop_front();
  } else if (a_pool_.size() < run) {
    start_stage_three();
    return;
  }
  while (run_candidates_.size() < run) {
    run_candidates_.push_back(a_pool_.front());
    a_pool_.pop_front();
  }
  builder_ = std::make_unique<CliqueBuilder>(k_, run_candidates_);
}

void FactorWaiter::finish_run() {
  const auto& clique = builder_->clique();
  add_block(clique);
  // Scratch vertices only carry edges into the new block, so they stay usable.
  for (Vertex v : run_candidates_) {
    if (!in_f_[v]) a_pool_.push_back(v);
  }
}

void FactorWaiter::start_stage_three() {
  stage_ = FactorStage::stage_three;
  builder_.reset();
  z_list_.assign(a_pool_.begin(), a_pool_.end());
  a_pool_.clear();
  z_pos_ = 0;
  rf_.clear();
  for (Vertex v : r_set_) {
    if (!in_f_[v]) rf_.push_back(v);
  }
  rf_cursor_ = 0;
  if (z_list_.empty()) close_out();
}

std::optional<Offer> FactorWaiter::stage_three_offer(const Board&) {
  const Vertex z = z_list_[z_pos_];
  assert(rf_cursor_ + 1 < rf_.size());
  return Offer{Edge(z, rf_[rf_cursor_]), Edge(z, rf_[rf_cursor_ + 1])};
}

void FactorWaiter::close_out() {
  // R is a red clique, so whatever is left of it splits into k-cliques.
  assert(rf_.size() % k_ == 0);
  for (std::size_t i = 0; i < rf_.size(); i += k_) {
    add_block(std::vector<Vertex>(rf_.begin() + i, rf_.begin() + i + k_));
  }
  rf_.clear();
  stage_ = FactorStage::done;
}

void FactorWaiter::add_block(std::vector<Vertex> block) {
  for (Vertex v : block) in_f_[v] = 1;
  blocks_.push_back(std::move(block));
}

}  // namespace wcg
