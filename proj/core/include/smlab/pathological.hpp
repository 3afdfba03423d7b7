#pragma once

#include <cstdint>
#include <vector>

#include "smlab/bandit.hpp"
#include "smlab/game.hpp"
#include "smlab/search.hpp"

namespace smlab {

// Action indices in the counterexample game.
namespace cx {
inline constexpr int kX = 0;
inline constexpr int kY = 1;
inline constexpr int kU = 0;
inline constexpr int kD = 1;
inline constexpr int kL = 0;
inline constexpr int kR = 1;

inline const std::vector<int> kPatternI{kY, kX, kX, kY};
inline const std::vector<int> kPatternJ1{kU, kU, kD, kD};
inline const std::vector<int> kPatternJ2{kL, kR, kR, kL};
}  // namespace cx

// Emits a fixed action pattern cyclically and ignores rewards.
class ScriptedPolicy final : public SelectionPolicy {
 public:
  ScriptedPolicy(std::vector<int> pattern, int num_actions);

  // Next pattern element; advances the cursor.
  int scripted_step();

  int num_actions() const override { return num_actions_; }
  Selection select(Rng& rng) override;
  void update(int action, double reward) override;
  std::vector<double> current_mixed() const override;
  std::unique_ptr<SelectionPolicy> clone() const override;
  std::string name() const override { return "scripted"; }

  std::size_t cursor() const { return cursor_; }

 private:
  std::vector<int> pattern_;
  int num_actions_;
  std::size_t cursor_ = 0;
  std::vector<double> one_hot_;
  int pending_ = -1;
};

enum class PathologicalRole { kI, kJ1, kJ2 };

// How "the running check estimate threatens to exceed the threshold during
// the next iteration" is read.
enum class ThreatRule {
  // Exceeds it if the next step were a failed check: (S + 1/eps)/(t+1).
  kLookahead,
  // Exceeds it already: S/t.
  kCurrent,
};

struct HcParams {
  double epsilon = 0.05;
  std::int64_t first_buffer = 64;  // b_n = first_buffer * 2^n
  ThreatRule rule = ThreatRule::kLookahead;
};

// Epsilon-Hannan-consistent imitation of the scripted counterexample
// players. Alternates buffer phases (an Exp3 fallback with gamma = epsilon,
// resumed across phases) with cooperation phases that follow the role's
// pattern, check the opponent with probability epsilon and quit when the
// check estimate grows too large. The J roles simulate each other in
// lockstep, so both leave cooperation together. The I role inserts each
// check as two consecutive off-pattern plays and holds its pattern cursor.
class HcPathologicalPolicy final : public SelectionPolicy {
 public:
  // Throws std::invalid_argument unless 0 < epsilon < 1/3 and
  // first_buffer >= 1.
  HcPathologicalPolicy(PathologicalRole role, HcParams params);

  int num_actions() const override { return 2; }
  Selection select(Rng& rng) override;
  void update(int action, double reward) override;
  std::vector<double> current_mixed() const override;
  std::unique_ptr<SelectionPolicy> clone() const override;
  std::string name() const override { return "pathological-hc"; }

  std::int64_t buffer_length(int round) const;
  bool in_buffer() const { return in_buffer_; }
  int round() const { return round_; }
  std::int64_t cooperation_step() const { return coop_t_; }
  double check_sum() const { return ch_sum_; }
  double simulated_opponent_check_sum() const { return opp_ch_sum_; }
  std::int64_t cooperation_steps_total() const { return coop_steps_total_; }
  std::int64_t off_pattern_steps_total() const { return off_pattern_total_; }
  double exit_threshold() const;

 private:
  enum class Step { kBuffer, kPattern, kCheckFirst, kCheckRepeat };

  int pattern_action() const;
  void finish_cooperation_step(double ch, double opp_ch);
  bool threatens(double sum) const;
  void start_buffer();

  PathologicalRole role_;
  HcParams params_;
  Exp3Policy fallback_;
  std::vector<double> mixed_ = std::vector<double>(2, 0.0);

  int round_ = 0;
  bool in_buffer_ = true;
  std::int64_t buffer_left_ = 0;

  std::int64_t coop_t_ = 0;
  std::size_t cursor_ = 0;
  double ch_sum_ = 0.0;
  double opp_ch_sum_ = 0.0;
  int check_left_ = 0;
  int check_action_ = 0;
  int last_y_payoff_ = -1;

  int pending_ = -1;
  Step pending_step_ = Step::kBuffer;

  std::int64_t coop_steps_total_ = 0;
  std::int64_t off_pattern_total_ = 0;
};

enum class CounterexampleMode { kDeterministic, kHc };

// Policies for the counterexample game only: the root gets the I role (and
// a single-action player 2), the matching-pennies node the J roles. Throws
// std::invalid_argument for any other game shape.
PolicyFactory make_counterexample_factory(CounterexampleMode mode,
                                          HcParams params = {});

// Records every visit and evaluates local external regret against the
// realized reward assignment: an unselected action's reward at visit s is
// the reward its child delivers on the next visit of that child (the reward
// "waits" until used), or the child's utility when the child is terminal.
class RegretTracer final : public SearchObserver {
 public:
  explicit RegretTracer(const Game& game);

  void on_visit(const VisitRecord& record) override;

  std::int64_t visits(NodeId h) const;
  // Length of the longest visit prefix of h whose counterfactual rewards
  // are all determined.
  std::int64_t resolved_prefix(NodeId h) const;
  // Average external regret of `player` at h after each of the first
  // resolved_prefix(h) visits; entry T-1 covers visits 1..T.
  std::vector<double> average_regret_series(NodeId h, Player player) const;
  // The rewards x_i(s) player 1 would have got with row i at visit s,
  // s = 1..resolved_prefix(h); row-major by visit.
  std::vector<double> counterfactual_rewards(NodeId h, Player player) const;
  // Actions chosen by `player` at h, in visit order.
  std::vector<int> actions(NodeId h, Player player) const;
  // Update arguments received at h, in visit order.
  std::vector<double> rewards(NodeId h) const;

 private:
  struct Visit {
    int i;
    int j;
    double reward;
  };
  const Game* game_;
  std::vector<std::vector<Visit>> log_;
};

struct CounterexampleReport {
  std::int64_t iterations = 0;
  double avg_reward_I = 0.0;
  double regret_I = 0.0;
  double regret_J_p1 = 0.0;
  double regret_J_p2 = 0.0;
  double expl1 = 0.0;  // of the empirical strategy
  // Worst values over every T = 4k <= iterations.
  double max_avg_reward_error = 0.0;  // |avg reward at I - 1/4|
  double max_regret = 0.0;            // over I and both players at J
  std::vector<int> actions_I;
  std::vector<double> rewards_I;
  std::vector<double> rewards_J;
};

// Runs SM-MCTS with the deterministic scripted policies on the fully
// expanded counterexample game. Throws std::invalid_argument unless
// iterations is a positive multiple of 4.
CounterexampleReport verify_counterexample(std::int64_t iterations);

}  // namespace smlab
