#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "smlab/game.hpp"
#include "smlab/matrix_game.hpp"
#include "smlab/rng.hpp"

namespace smlab {

// Outcome of one select() call. `distribution` is the exact distribution the
// action was drawn from; it views policy-owned storage and stays valid until
// the next select() on the same policy. `explored` marks draws that came from
// the uniform exploration component.
struct Selection {
  int action = 0;
  bool explored = false;
  std::span<const double> distribution;
};

// A bandit learner for one player at one tree node. Every select() must be
// followed by exactly one update() for the selected action.
class SelectionPolicy {
 public:
  virtual ~SelectionPolicy() = default;

  virtual int num_actions() const = 0;
  virtual Selection select(Rng& rng) = 0;
  // Throws std::invalid_argument for a reward outside [0,1] and
  // std::logic_error for an action other than the last selected one.
  virtual void update(int action, double reward) = 0;
  // The distribution select() would draw from now.
  virtual std::vector<double> current_mixed() const = 0;
  virtual std::unique_ptr<SelectionPolicy> clone() const = 0;
  // Weight of the uniform component in every emitted distribution; the
  // amount extract_strategies can remove.
  virtual double exploration() const { return 0.0; }
  virtual std::string name() const = 0;
};

// Exp3 with uniform exploration gamma.
struct Exp3State {
  int num_actions = 0;
  double gamma = 0.1;
  std::vector<double> estimates;  // cumulative importance-weighted rewards

  Exp3State(int k, double g);
};

// Fills `exploit` with the softmax of (gamma/K) * estimates and `mixed` with
// (1-gamma) * exploit + gamma/K.
void exp3_distribution(const Exp3State& s, std::span<double> exploit,
                       std::span<double> mixed);
// Two-stage draw: with probability gamma uniform (explored), otherwise from
// the softmax part. Returns the action; `mixed` receives the emitted
// distribution.
Selection exp3_select(const Exp3State& s, Rng& rng, std::vector<double>& exploit,
                      std::vector<double>& mixed);
void exp3_update(Exp3State& s, int action, double reward,
                 std::span<const double> distribution_used);

// Regret matching with uniform exploration gamma.
struct RmState {
  int num_actions = 0;
  double gamma = 0.1;
  std::vector<double> regrets;

  RmState(int k, double g);
};

// Fills `exploit` with R+ / sum R+ (uniform when no regret is positive) and
// `mixed` with (1-gamma) * exploit + gamma/K.
void rm_distribution(const RmState& s, std::span<double> exploit,
                     std::span<double> mixed);
Selection rm_select(const RmState& s, Rng& rng, std::vector<double>& exploit,
                    std::vector<double>& mixed);
void rm_update(RmState& s, int action, double reward,
               std::span<const double> distribution_used);

class Exp3Policy final : public SelectionPolicy {
 public:
  Exp3Policy(int num_actions, double gamma);

  int num_actions() const override { return state_.num_actions; }
  Selection select(Rng& rng) override;
  void update(int action, double reward) override;
  std::vector<double> current_mixed() const override;
  std::unique_ptr<SelectionPolicy> clone() const override;
  double exploration() const override { return state_.gamma; }
  std::string name() const override { return "exp3"; }

  const Exp3State& state() const { return state_; }

 private:
  Exp3State state_;
  std::vector<double> exploit_;
  std::vector<double> mixed_;
  int pending_ = -1;
};

class RmPolicy final : public SelectionPolicy {
 public:
  RmPolicy(int num_actions, double gamma);

  int num_actions() const override { return state_.num_actions; }
  Selection select(Rng& rng) override;
  void update(int action, double reward) override;
  std::vector<double> current_mixed() const override;
  std::unique_ptr<SelectionPolicy> clone() const override;
  double exploration() const override { return state_.gamma; }
  std::string name() const override { return "rm"; }

  const RmState& state() const { return state_; }

 private:
  RmState state_;
  std::vector<double> exploit_;
  std::vector<double> mixed_;
  int pending_ = -1;
};

enum class WrapperMode { kNone, kFixed, kSqrt };

// Explores uniformly with probability gamma (kFixed) or 1/sqrt(t) at wrapper
// step t (kSqrt) without touching the inner policy; otherwise runs one full
// select/update round of the inner policy.
class ExplorationWrapper final : public SelectionPolicy {
 public:
  // gamma must lie in (0,1] for kFixed; it is ignored for kSqrt.
  ExplorationWrapper(std::unique_ptr<SelectionPolicy> inner, WrapperMode mode,
                     double gamma = 0.0);

  int num_actions() const override { return inner_->num_actions(); }
  Selection select(Rng& rng) override;
  void update(int action, double reward) override;
  std::vector<double> current_mixed() const override;
  std::unique_ptr<SelectionPolicy> clone() const override;
  double exploration() const override;
  std::string name() const override;

  // Exploration probability used at wrapper step t (1-based).
  double exploration_probability(long long t) const;
  const SelectionPolicy& inner() const { return *inner_; }
  long long steps() const { return steps_; }

 private:
  std::unique_ptr<SelectionPolicy> inner_;
  WrapperMode mode_;
  double gamma_;
  long long steps_ = 0;
  std::vector<double> mixed_;
  int pending_ = -1;
  bool pending_explored_ = false;
};

// Samples an index from a distribution with one uniform draw.
int sample_index(std::span<const double> distribution, Rng& rng);

// Where a policy is being installed.
struct PolicyContext {
  const Game* game = nullptr;
  NodeId node = kNoNode;
  Player player = Player::kFirst;
  int num_actions = 0;
};

using PolicyFactory =
    std::function<std::unique_ptr<SelectionPolicy>(const PolicyContext&)>;

enum class BanditAlgo { kExp3, kRm };

struct PolicyConfig {
  BanditAlgo algo = BanditAlgo::kRm;
  double gamma = 0.1;
  WrapperMode wrapper = WrapperMode::kNone;
  double wrapper_gamma = 0.1;
};

// Throws std::invalid_argument for gamma outside (0,1).
PolicyFactory make_policy_factory(const PolicyConfig& config);

}  // namespace smlab
