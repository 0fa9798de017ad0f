#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wcg/board.hpp"
#include "wcg/rng.hpp"

namespace wcg {

class WaiterStrategy {
 public:
  virtual ~WaiterStrategy() = default;
  // The next offer, or nullopt when the strategy has nothing left to offer.
  virtual std::optional<Offer> next_offer(const Board& board) = 0;
  // Called after the round has been applied to `board`.
  virtual void on_choice(const Board& board, const Offer& offer, const Edge& chosen) {
    (void)board, (void)offer, (void)chosen;
  }
  virtual std::string name() const = 0;
};

class ClientStrategy {
 public:
  virtual ~ClientStrategy() = default;
  virtual Edge choose(const Board& board, const Offer& offer) = 0;
  virtual std::string name() const = 0;
};

// --- Clients ---------------------------------------------------------------

// Each offered edge with probability 1/2, independently, from a seeded stream.
class RandomClient : public ClientStrategy {
 public:
  explicit RandomClient(std::uint64_t seed) : rng_(seed) {}
  Edge choose(const Board&, const Offer& offer) override {
    return rng_.coin() ? offer.first : offer.second;
  }
  std::string name() const override { return "random"; }

 private:
  CounterRng rng_;
};

// Round i keeps the first edge iff bits[i]. Running out throws script_underrun.
class ScriptedClient : public ClientStrategy {
 public:
  explicit ScriptedClient(std::vector<bool> bits) : bits_(std::move(bits)) {}
  Edge choose(const Board& board, const Offer& offer) override;
  std::string name() const override;
  std::size_t used() const { return next_; }

 private:
  std::vector<bool> bits_;
  std::size_t next_ = 0;
};

std::unique_ptr<ClientStrategy> random_client(std::uint64_t seed);
std::unique_ptr<ClientStrategy> scripted_client(std::vector<bool> bits);

// --- Clique builder ----------------------------------------------------------

// Builds a red K_l out of 2^l - 1 candidates whose mutual edges are unclaimed:
// w_1 is the first candidate; sweep j offers the edges from w_j to the rest of
// S_j in consecutive pairs, S_{j+1} is the red half and w_{j+1} its earliest
// candidate. Uses exactly 2^l - l - 1 rounds against any client, and every
// edge it places touches one of w_1..w_l.
class CliqueBuilder : public WaiterStrategy {
 public:
  // Throws bad_budget unless candidates.size() == 2^l - 1 (distinct, l >= 2).
  CliqueBuilder(int l, std::vector<Vertex> candidates);

  std::optional<Offer> next_offer(const Board& board) override;
  void on_choice(const Board& board, const Offer& offer, const Edge& chosen) override;
  std::string name() const override { return "clique_builder:" + std::to_string(l_); }

  bool done() const { return static_cast<int>(clique_.size()) == l_; }
  int target() const { return l_; }
  // w_1..w_j chosen so far (all of them once done()).
  const std::vector<Vertex>& clique() const { return clique_; }
  // Current candidate set S_j.
  const std::vector<Vertex>& candidates() const { return current_; }
  std::uint64_t rounds_used() const { return rounds_; }

  static std::uint64_t exact_rounds(int l) { return (std::uint64_t{1} << l) - l - 1; }

 private:
  void check_clean(const Board& board) const;
  void advance();

  int l_;
  std::vector<Vertex> current_;  // S_j in candidate order, current_[0] == w_j
  std::vector<Vertex> next_;     // red survivors of the running sweep
  std::vector<Vertex> clique_;
  std::size_t cursor_ = 1;       // next unpaired position in current_
  std::uint64_t rounds_ = 0;
  bool checked_ = false;
};

std::unique_ptr<CliqueBuilder> clique_builder(int l, std::vector<Vertex> candidates);

// --- Three-stage factor strategy ------------------------------------------------

// Sizes for the factor strategy: Stage I builds a red clique R of size r out of
// s0 = 2^r - 1 vertices; n_min is the least multiple of k the plan works for.
struct StageParameters {
  int k = 0;
  int r = 0;
  std::uint64_t s0 = 0;
  std::uint64_t n_min = 0;
};

// Minimal r >= (k-1)(2^k - 1) + k such that Stage III never runs out of R,
// then the least valid n. Throws resource_limit when 2^r does not fit in 64 bits
// (k >= 5); use stage_plan_valid_log2 there.
StageParameters stage_parameters(int k);

// Exact vertex accounting of all three stages for (k, r, n): B is exhausted in
// Stage II and every Stage III vertex finds 2(k-1) fresh anchors in R minus F.
bool stage_plan_valid(int k, int r, std::uint64_t n);
// Same predicate in log2 space for astronomically large r and n (r may exceed 64).
bool stage_plan_valid_log2(int k, double r, double log2_n);

// Exact round count of the factor strategy on n vertices (independent of Client).
std::uint64_t factor_strategy_rounds(const StageParameters& plan, std::uint64_t n);

enum class FactorStage { stage_one, stage_two, stage_three, done };

class FactorWaiter : public WaiterStrategy {
 public:
  // Throws indivisible if k does not divide n, board_too_small if n < plan.n_min.
  FactorWaiter(int k, StageParameters plan, Vertex n);

  std::optional<Offer> next_offer(const Board& board) override;
  void on_choice(const Board& board, const Offer& offer, const Edge& chosen) override;
  std::string name() const override { return "factor:" + std::to_string(k_); }

  FactorStage stage() const { return stage_; }
  const StageParameters& plan() const { return plan_; }
  // Finished red k-cliques, in completion order; their union is F.
  const std::vector<std::vector<Vertex>>& blocks() const { return blocks_; }
  std::uint64_t finished_vertices() const { return blocks_.size() * static_cast<std::uint64_t>(k_); }
  const std::vector<Vertex>& anchor_clique() const { return r_set_; }
  bool in_anchor(Vertex v) const { return v < in_r_.size() && in_r_[v]; }
  bool finished(Vertex v) const { return v < in_f_.size() && in_f_[v]; }

 private:
  void start_stage_two_run();
  void finish_run();
  void start_stage_three();
  std::optional<Offer> stage_three_offer(const Board& board);
  void close_out();
  void add_block(std::vector<Vertex> block);

  int k_;
  StageParameters plan_;
  Vertex n_;
  FactorStage stage_ = FactorStage::stage_one;
  std::unique_ptr<CliqueBuilder> builder_;
  std::vector<Vertex> run_candidates_;

  std::vector<Vertex> r_set_;
  std::vector<char> in_r_, in_f_;
  std::deque<Vertex> b_pool_;
  std::deque<Vertex> a_pool_;  // A minus F, scratch vertices return to the back

  // Stage III
  std::vector<Vertex> z_list_;
  std::size_t z_pos_ = 0;
  std::vector<Vertex> rf_;          // R minus F in anchor order
  std::size_t rf_cursor_ = 0;
  std::vector<Vertex> z_red_;       // red anchors of the current z

  std::vector<std::vector<Vertex>> blocks_;
};

// --- Baselines ------------------------------------------------------------------

// A uniformly random pair of unclaimed edges.
class RandomOfferWaiter : public WaiterStrategy {
 public:
  explicit RandomOfferWaiter(std::uint64_t seed) : rng_(seed) {}
  std::optional<Offer> next_offer(const Board& board) override;
  std::string name() const override { return "random"; }

 private:
  CounterRng rng_;
};

// Two unclaimed edges at a vertex of maximum red degree (smallest id on ties,
// smallest other endpoints); any two unclaimed edges if no vertex has two.
class GreedyDegreeWaiter : public WaiterStrategy {
 public:
  std::optional<Offer> next_offer(const Board& board) override;
  std::string name() const override { return "greedy"; }
};

}  // namespace wcg
