#include "smlab/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smlab {

namespace {

void check_gamma(double gamma, const char* who) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument(std::string(who) + ": gamma must lie in (0,1), got " +
                                std::to_string(gamma));
  }
}

void check_reward(double reward) {
  if (!(reward >= 0.0 && reward <= 1.0)) {
    throw std::invalid_argument("reward outside [0,1]: " + std::to_string(reward));
  }
}

void check_pending(int& pending, int action) {
  if (pending < 0 || action != pending) {
    throw std::logic_error("update for action " + std::to_string(action) +
                           " does not match the last selected action " +
                           std::to_string(pending));
  }
  pending = -1;
}

void mix_uniform(std::span<const double> exploit, double gamma,
                 std::span<double> mixed) {
  const double floor = gamma / static_cast<double>(exploit.size());
  for (std::size_t a = 0; a < exploit.size(); ++a) {
    mixed[a] = (1.0 - gamma) * exploit[a] + floor;
  }
}

Selection two_stage(double gamma, int k, Rng& rng, std::span<const double> exploit,
                    std::span<const double> mixed) {
  Selection s;
  s.distribution = mixed;
  if (rng.bernoulli(gamma)) {
    s.action = static_cast<int>(rng.below(static_cast<std::uint32_t>(k)));
    s.explored = true;
  } else {
    s.action = sample_index(exploit, rng);
  }
  return s;
}

}  // namespace

int sample_index(std::span<const double> distribution, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  const int last = static_cast<int>(distribution.size()) - 1;
  for (int a = 0; a < last; ++a) {
    acc += distribution[a];
    if (u < acc) return a;
  }
  // Rounding can leave the cumulative sum just below 1; skip zero-mass tails.
  for (int a = last; a > 0; --a) {
    if (distribution[a] > 0.0) return a;
  }
  return 0;
}

Exp3State::Exp3State(int k, double g) : num_actions(k), gamma(g), estimates(k, 0.0) {
  if (k < 1) throw std::invalid_argument("exp3: need at least one action");
  check_gamma(g, "exp3");
}

void exp3_distribution(const Exp3State& s, std::span<double> exploit,
                       std::span<double> mixed) {
  const double eta = s.gamma / s.num_actions;
  const double top = *std::max_element(s.estimates.begin(), s.estimates.end());
  double z = 0.0;
  for (int a = 0; a < s.num_actions; ++a) {
    exploit[a] = std::exp(eta * (s.estimates[a] - top));
    z += exploit[a];
  }
  for (int a = 0; a < s.num_actions; ++a) exploit[a] /= z;
  mix_uniform(exploit, s.gamma, mixed);
}

Selection exp3_select(const Exp3State& s, Rng& rng, std::vector<double>& exploit,
                      std::vector<double>& mixed) {
  exploit.resize(s.num_actions);
  mixed.resize(s.num_actions);
  exp3_distribution(s, exploit, mixed);
  return two_stage(s.gamma, s.num_actions, rng, exploit, mixed);
}

void exp3_update(Exp3State& s, int action, double reward,
                 std::span<const double> distribution_used) {
  check_reward(reward);
  s.estimates[action] += reward / distribution_used[action];
}

RmState::RmState(int k, double g) : num_actions(k), gamma(g), regrets(k, 0.0) {
  if (k < 1) throw std::invalid_argument("rm: need at least one action");
  check_gamma(g, "rm");
}

void rm_distribution(const RmState& s, std::span<double> exploit,
                     std::span<double> mixed) {
  double total = 0.0;
  for (int a = 0; a < s.num_actions; ++a) {
    exploit[a] = std::max(0.0, s.regrets[a]);
    total += exploit[a];
  }
  if (total > 0.0) {
    for (int a = 0; a < s.num_actions; ++a) exploit[a] /= total;
  } else {
    std::fill(exploit.begin(), exploit.end(), 1.0 / s.num_actions);
  }
  mix_uniform(exploit, s.gamma, mixed);
}

Selection rm_select(const RmState& s, Rng& rng, std::vector<double>& exploit,
                    std::vector<double>& mixed) {
  exploit.resize(s.num_actions);
  mixed.resize(s.num_actions);
  rm_distribution(s, exploit, mixed);
  return two_stage(s.gamma, s.num_actions, rng, exploit, mixed);
}

void rm_update(RmState& s, int action, double reward,
               std::span<const double> distribution_used) {
  check_reward(reward);
  for (double& r : s.regrets) r -= reward;
  s.regrets[action] += reward / distribution_used[action];
}

Exp3Policy::Exp3Policy(int num_actions, double gamma)
    : state_(num_actions, gamma), exploit_(num_actions), mixed_(num_actions) {}

Selection Exp3Policy::select(Rng& rng) {
  Selection s = exp3_select(state_, rng, exploit_, mixed_);
  pending_ = s.action;
  return s;
}

void Exp3Policy::update(int action, double reward) {
  check_reward(reward);
  check_pending(pending_, action);
  exp3_update(state_, action, reward, mixed_);
}

std::vector<double> Exp3Policy::current_mixed() const {
  std::vector<double> exploit(state_.num_actions), mixed(state_.num_actions);
  exp3_distribution(state_, exploit, mixed);
  return mixed;
}

std::unique_ptr<SelectionPolicy> Exp3Policy::clone() const {
  return std::make_unique<Exp3Policy>(*this);
}

RmPolicy::RmPolicy(int num_actions, double gamma)
    : state_(num_actions, gamma), exploit_(num_actions), mixed_(num_actions) {}

Selection RmPolicy::select(Rng& rng) {
  Selection s = rm_select(state_, rng, exploit_, mixed_);
  pending_ = s.action;
  return s;
}

void RmPolicy::update(int action, double reward) {
  check_reward(reward);
  check_pending(pending_, action);
  rm_update(state_, action, reward, mixed_);
}

std::vector<double> RmPolicy::current_mixed() const {
  std::vector<double> exploit(state_.num_actions), mixed(state_.num_actions);
  rm_distribution(state_, exploit, mixed);
  return mixed;
}

std::unique_ptr<SelectionPolicy> RmPolicy::clone() const {
  return std::make_unique<RmPolicy>(*this);
}

ExplorationWrapper::ExplorationWrapper(std::unique_ptr<SelectionPolicy> inner,
                                       WrapperMode mode, double gamma)
    : inner_(std::move(inner)), mode_(mode), gamma_(gamma) {
  if (!inner_) throw std::invalid_argument("wrapper: null inner policy");
  if (mode_ == WrapperMode::kNone) {
    throw std::invalid_argument("wrapper: mode must be fixed or sqrt");
  }
  if (mode_ == WrapperMode::kFixed && !(gamma_ > 0.0 && gamma_ <= 1.0)) {
    throw std::invalid_argument("wrapper: gamma must lie in (0,1], got " +
                                std::to_string(gamma_));
  }
  mixed_.resize(inner_->num_actions());
}

double ExplorationWrapper::exploration_probability(long long t) const {
  if (mode_ == WrapperMode::kFixed) return gamma_;
  return 1.0 / std::sqrt(static_cast<double>(std::max(1LL, t)));
}

Selection ExplorationWrapper::select(Rng& rng) {
  ++steps_;
  const double p = exploration_probability(steps_);
  const int k = inner_->num_actions();
  const double floor = p / k;
  Selection s;
  if (rng.bernoulli(p)) {
    const std::vector<double> inner_mixed = inner_->current_mixed();
    for (int a = 0; a < k; ++a) mixed_[a] = (1.0 - p) * inner_mixed[a] + floor;
    s.action = static_cast<int>(rng.below(static_cast<std::uint32_t>(k)));
    s.explored = true;
    pending_explored_ = true;
  } else {
    const Selection in = inner_->select(rng);
    for (int a = 0; a < k; ++a) mixed_[a] = (1.0 - p) * in.distribution[a] + floor;
    s.action = in.action;
    s.explored = in.explored;
    pending_explored_ = false;
  }
  s.distribution = mixed_;
  pending_ = s.action;
  return s;
}

void ExplorationWrapper::update(int action, double reward) {
  check_reward(reward);
  check_pending(pending_, action);
  if (pending_explored_) return;
  inner_->update(action, reward);
}

std::vector<double> ExplorationWrapper::current_mixed() const {
  const double p = exploration_probability(steps_ + 1);
  std::vector<double> mixed = inner_->current_mixed();
  for (double& m : mixed) m = (1.0 - p) * m + p / static_cast<double>(mixed.size());
  return mixed;
}

std::unique_ptr<SelectionPolicy> ExplorationWrapper::clone() const {
  auto copy = std::make_unique<ExplorationWrapper>(inner_->clone(), mode_, gamma_);
  copy->steps_ = steps_;
  copy->mixed_ = mixed_;
  copy->pending_ = pending_;
  copy->pending_explored_ = pending_explored_;
  return copy;
}

double ExplorationWrapper::exploration() const {
  // The sqrt schedule decays, so only the inner policy's part is permanent.
  if (mode_ == WrapperMode::kSqrt) return inner_->exploration();
  return 1.0 - (1.0 - gamma_) * (1.0 - inner_->exploration());
}

std::string ExplorationWrapper::name() const {
  return (mode_ == WrapperMode::kFixed ? "fixed(" : "sqrt(") + inner_->name() + ")";
}

PolicyFactory make_policy_factory(const PolicyConfig& config) {
  check_gamma(config.gamma, "policy");
  if (config.wrapper == WrapperMode::kFixed &&
      !(config.wrapper_gamma > 0.0 && config.wrapper_gamma <= 1.0)) {
    throw std::invalid_argument("wrapper_gamma must lie in (0,1], got " +
                                std::to_string(config.wrapper_gamma));
  }
  return [config](const PolicyContext& ctx) -> std::unique_ptr<SelectionPolicy> {
    std::unique_ptr<SelectionPolicy> p;
    if (config.algo == BanditAlgo::kExp3) {
      p = std::make_unique<Exp3Policy>(ctx.num_actions, config.gamma);
    } else {
      p = std::make_unique<RmPolicy>(ctx.num_actions, config.gamma);
    }
    if (config.wrapper != WrapperMode::kNone) {
      p = std::make_unique<ExplorationWrapper>(std::move(p), config.wrapper,
                                               config.wrapper_gamma);
    }
    return p;
  };
}

}  // namespace smlab
