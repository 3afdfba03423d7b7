#include "smlab/pathological.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "smlab/games.hpp"
#include "smlab/strategy.hpp"

namespace smlab {

namespace {

void check_reward(double reward) {
  if (!(reward >= 0.0 && reward <= 1.0)) {
    throw std::invalid_argument("reward outside [0,1]: " + std::to_string(reward));
  }
}

void take_pending(int& pending, int action) {
  if (pending < 0 || action != pending) {
    throw std::logic_error("update for action " + std::to_string(action) +
                           " does not match the last selected action " +
                           std::to_string(pending));
  }
  pending = -1;
}

const std::vector<int>& own_pattern(PathologicalRole role) {
  switch (role) {
    case PathologicalRole::kI: return cx::kPatternI;
    case PathologicalRole::kJ1: return cx::kPatternJ1;
    case PathologicalRole::kJ2: return cx::kPatternJ2;
  }
  return cx::kPatternI;
}

}  // namespace

ScriptedPolicy::ScriptedPolicy(std::vector<int> pattern, int num_actions)
    : pattern_(std::move(pattern)), num_actions_(num_actions), one_hot_(num_actions, 0.0) {
  if (pattern_.empty()) throw std::invalid_argument("scripted: empty pattern");
  for (int a : pattern_) {
    if (a < 0 || a >= num_actions_) {
      throw std::invalid_argument("scripted: action " + std::to_string(a) + " out of range");
    }
  }
}

int ScriptedPolicy::scripted_step() {
  const int a = pattern_[cursor_];
  cursor_ = (cursor_ + 1) % pattern_.size();
  return a;
}

Selection ScriptedPolicy::select(Rng&) {
  const int a = scripted_step();
  std::fill(one_hot_.begin(), one_hot_.end(), 0.0);
  one_hot_[a] = 1.0;
  pending_ = a;
  return {a, false, one_hot_};
}

void ScriptedPolicy::update(int action, double reward) {
  check_reward(reward);
  take_pending(pending_, action);
}

std::vector<double> ScriptedPolicy::current_mixed() const {
  std::vector<double> d(num_actions_, 0.0);
  d[pattern_[cursor_]] = 1.0;
  return d;
}

std::unique_ptr<SelectionPolicy> ScriptedPolicy::clone() const {
  return std::make_unique<ScriptedPolicy>(*this);
}

HcPathologicalPolicy::HcPathologicalPolicy(PathologicalRole role, HcParams params)
    : role_(role),
      params_(params),
      fallback_(2, (params.epsilon > 0.0 && params.epsilon < 1.0) ? params.epsilon : 0.5) {
  if (!(params_.epsilon > 0.0 && params_.epsilon < 1.0 / 3.0)) {
    throw std::invalid_argument("pathological: epsilon must lie in (0,1/3), got " +
                                std::to_string(params_.epsilon));
  }
  if (params_.first_buffer < 1) {
    throw std::invalid_argument("pathological: first_buffer must be >= 1");
  }
  start_buffer();
}

std::int64_t HcPathologicalPolicy::buffer_length(int round) const {
  return params_.first_buffer << std::min(round, 40);
}

double HcPathologicalPolicy::exit_threshold() const {
  return (role_ == PathologicalRole::kI ? 3.0 : 2.0) * params_.epsilon;
}

void HcPathologicalPolicy::start_buffer() {
  in_buffer_ = true;
  buffer_left_ = buffer_length(round_);
  coop_t_ = 0;
  cursor_ = 0;
  ch_sum_ = 0.0;
  opp_ch_sum_ = 0.0;
  check_left_ = 0;
}

int HcPathologicalPolicy::pattern_action() const {
  return own_pattern(role_)[cursor_];
}

Selection HcPathologicalPolicy::select(Rng& rng) {
  Selection s;
  if (in_buffer_) {
    s = fallback_.select(rng);
    std::copy(s.distribution.begin(), s.distribution.end(), mixed_.begin());
    pending_step_ = Step::kBuffer;
  } else if (check_left_ > 0) {
    s.action = check_action_;
    mixed_.assign(2, 0.0);
    mixed_[check_action_] = 1.0;
    pending_step_ = Step::kCheckRepeat;
  } else {
    const int p = pattern_action();
    mixed_[p] = 1.0 - params_.epsilon;
    mixed_[1 - p] = params_.epsilon;
    if (rng.bernoulli(params_.epsilon)) {
      s.action = 1 - p;
      pending_step_ = Step::kCheckFirst;
    } else {
      s.action = p;
      pending_step_ = Step::kPattern;
    }
  }
  s.distribution = mixed_;
  pending_ = s.action;
  return s;
}

bool HcPathologicalPolicy::threatens(double sum) const {
  const double thr = exit_threshold();
  const auto t = static_cast<double>(coop_t_);
  if (params_.rule == ThreatRule::kLookahead) {
    return (sum + 1.0 / params_.epsilon) / (t + 1.0) > thr;
  }
  return sum / t > thr;
}

void HcPathologicalPolicy::finish_cooperation_step(double ch, double opp_ch) {
  ++coop_t_;
  ++coop_steps_total_;
  ch_sum_ += ch;
  opp_ch_sum_ += opp_ch;
  const double b = static_cast<double>(buffer_length(round_));
  const auto t = static_cast<double>(coop_t_);
  const double eps = params_.epsilon;
  if (eps * b / (b + t) + t / (b + t) < exit_threshold()) return;
  if (threatens(ch_sum_) || threatens(opp_ch_sum_)) {
    ++round_;
    start_buffer();
  }
}

void HcPathologicalPolicy::update(int action, double reward) {
  check_reward(reward);
  take_pending(pending_, action);
  const int payoff = reward > 0.5 ? 1 : 0;
  if (pending_step_ == Step::kBuffer) {
    fallback_.update(action, reward);
    if (role_ == PathologicalRole::kI && action == cx::kY) last_y_payoff_ = payoff;
    if (--buffer_left_ == 0) in_buffer_ = false;
    return;
  }
  const double spike = 1.0 / params_.epsilon;
  if (role_ == PathologicalRole::kI) {
    double ch = 0.0;
    if (pending_step_ == Step::kCheckFirst) {
      // X always pays 0; Y alternates 1, 0, 1, ...
      const bool expected =
          action == cx::kX ? payoff == 0
                           : (last_y_payoff_ < 0 || payoff == 1 - last_y_payoff_);
      if (!expected) ch = spike;
      check_action_ = action;
      check_left_ = 1;
    } else if (pending_step_ == Step::kCheckRepeat) {
      check_left_ = 0;
    } else {
      cursor_ = (cursor_ + 1) % cx::kPatternI.size();
    }
    if (pending_step_ != Step::kPattern) ++off_pattern_total_;
    if (action == cx::kY) last_y_payoff_ = payoff;
    finish_cooperation_step(ch, 0.0);
    return;
  }
  // In matching pennies our action and payoff reveal the opponent's action:
  // player 1 wins exactly when the indices agree.
  const bool first = role_ == PathologicalRole::kJ1;
  const bool agree = first ? payoff == 1 : payoff == 0;
  const int opponent = agree ? action : 1 - action;
  const auto& opp_pattern = first ? cx::kPatternJ2 : cx::kPatternJ1;
  const bool we_checked = action != pattern_action();
  const bool they_checked = opponent != opp_pattern[cursor_];
  // Each side flags the other only when its own check met an off-pattern
  // opponent; the simulated opponent applies the same rule to us.
  const double ch = we_checked && they_checked ? spike : 0.0;
  const double opp_ch = they_checked && we_checked ? spike : 0.0;
  if (we_checked) ++off_pattern_total_;
  cursor_ = (cursor_ + 1) % 4;
  finish_cooperation_step(ch, opp_ch);
}

std::vector<double> HcPathologicalPolicy::current_mixed() const {
  if (in_buffer_) return fallback_.current_mixed();
  std::vector<double> d(2, 0.0);
  if (check_left_ > 0) {
    d[check_action_] = 1.0;
  } else {
    d[pattern_action()] = 1.0 - params_.epsilon;
    d[1 - pattern_action()] = params_.epsilon;
  }
  return d;
}

std::unique_ptr<SelectionPolicy> HcPathologicalPolicy::clone() const {
  return std::make_unique<HcPathologicalPolicy>(*this);
}

PolicyFactory make_counterexample_factory(CounterexampleMode mode, HcParams params) {
  if (mode == CounterexampleMode::kHc) {
    (void)HcPathologicalPolicy(PathologicalRole::kI, params);  // validate eagerly
  }
  return [mode, params](const PolicyContext& ctx) -> std::unique_ptr<SelectionPolicy> {
    const Game& g = *ctx.game;
    const bool shape_ok = g.rows(g.root()) == 2 && g.cols(g.root()) == 1 &&
                          g.is_terminal(g.child(g.root(), cx::kX, 0)) &&
                          !g.is_terminal(g.child(g.root(), cx::kY, 0)) &&
                          g.rows(g.child(g.root(), cx::kY, 0)) == 2 &&
                          g.cols(g.child(g.root(), cx::kY, 0)) == 2;
    if (!shape_ok) {
      throw std::invalid_argument("pathological policies need the counterexample game");
    }
    const bool at_root = ctx.node == g.root();
    if (at_root && ctx.player == Player::kSecond) {
      return std::make_unique<ScriptedPolicy>(std::vector<int>{0}, 1);
    }
    PathologicalRole role = PathologicalRole::kI;
    if (!at_root) {
      role = ctx.player == Player::kFirst ? PathologicalRole::kJ1 : PathologicalRole::kJ2;
    }
    if (mode == CounterexampleMode::kDeterministic) {
      return std::make_unique<ScriptedPolicy>(own_pattern(role), 2);
    }
    return std::make_unique<HcPathologicalPolicy>(role, params);
  };
}

RegretTracer::RegretTracer(const Game& game) : game_(&game), log_(game.num_nodes()) {}

void RegretTracer::on_visit(const VisitRecord& r) {
  log_[r.node].push_back({r.i, r.j, r.update_arg});
}

std::int64_t RegretTracer::visits(NodeId h) const {
  return static_cast<std::int64_t>(log_[h].size());
}

std::vector<int> RegretTracer::actions(NodeId h, Player player) const {
  std::vector<int> out;
  out.reserve(log_[h].size());
  for (const Visit& v : log_[h]) out.push_back(player == Player::kFirst ? v.i : v.j);
  return out;
}

std::vector<double> RegretTracer::rewards(NodeId h) const {
  std::vector<double> out;
  out.reserve(log_[h].size());
  for (const Visit& v : log_[h]) out.push_back(v.reward);
  return out;
}

std::vector<double> RegretTracer::counterfactual_rewards(NodeId h, Player player) const {
  const Game& g = *game_;
  const int rows = g.rows(h);
  const int cols = g.cols(h);
  const int k = player == Player::kFirst ? rows : cols;
  const auto& log = log_[h];
  // Realized reward sequence of every joint action.
  std::vector<std::vector<double>> pool(static_cast<std::size_t>(rows * cols));
  for (const Visit& v : log) pool[v.i * cols + v.j].push_back(v.reward);
  std::vector<std::size_t> used(pool.size(), 0);
  std::vector<double> out;
  out.reserve(log.size() * static_cast<std::size_t>(k));
  std::vector<double> row(k);
  for (const Visit& v : log) {
    for (int a = 0; a < k; ++a) {
      const int i = player == Player::kFirst ? a : v.i;
      const int j = player == Player::kFirst ? v.j : a;
      const int idx = i * cols + j;
      const NodeId c = g.child(h, i, j);
      double x1;
      if (g.is_terminal(c)) {
        x1 = g.utility(c);
      } else if (used[idx] < pool[idx].size()) {
        x1 = pool[idx][used[idx]];
      } else {
        return out;
      }
      row[a] = player == Player::kFirst ? x1 : 1.0 - x1;
    }
    out.insert(out.end(), row.begin(), row.end());
    ++used[v.i * cols + v.j];
  }
  return out;
}

std::int64_t RegretTracer::resolved_prefix(NodeId h) const {
  const int k = game_->rows(h);
  return static_cast<std::int64_t>(counterfactual_rewards(h, Player::kFirst).size()) / k;
}

std::vector<double> RegretTracer::average_regret_series(NodeId h, Player player) const {
  const int k = player == Player::kFirst ? game_->rows(h) : game_->cols(h);
  const std::vector<double> x = counterfactual_rewards(h, player);
  const std::size_t n = x.size() / static_cast<std::size_t>(k);
  std::vector<double> cum(k, 0.0);
  double got = 0.0;
  std::vector<double> series(n);
  for (std::size_t s = 0; s < n; ++s) {
    const Visit& v = log_[h][s];
    for (int a = 0; a < k; ++a) cum[a] += x[s * k + a];
    got += x[s * k + (player == Player::kFirst ? v.i : v.j)];
    const double best = *std::max_element(cum.begin(), cum.end());
    series[s] = (best - got) / static_cast<double>(s + 1);
  }
  return series;
}

CounterexampleReport verify_counterexample(std::int64_t iterations) {
  if (iterations < 4 || iterations % 4 != 0) {
    throw std::invalid_argument("verify_counterexample: iterations must be a positive "
                                "multiple of 4");
  }
  const Game game = build_counterexample_game();
  const NodeId node_i = game.root();
  const NodeId node_j = game.child(node_i, cx::kY, 0);
  SearchOptions opts;
  opts.expand_all = true;
  opts.track_upo = false;
  SearchTree tree(game, make_counterexample_factory(CounterexampleMode::kDeterministic),
                  0, opts);
  RegretTracer tracer(game);
  tree.set_observer(&tracer);
  run_until(tree, Variant::kSmMcts, iterations);

  CounterexampleReport r;
  r.iterations = iterations;
  r.actions_I = tracer.actions(node_i, Player::kFirst);
  r.rewards_I = tracer.rewards(node_i);
  r.rewards_J = tracer.rewards(node_j);
  const auto reg_i = tracer.average_regret_series(node_i, Player::kFirst);
  const auto reg_j1 = tracer.average_regret_series(node_j, Player::kFirst);
  const auto reg_j2 = tracer.average_regret_series(node_j, Player::kSecond);

  // Both patterns have period 4 in their own node's visits, so I is judged
  // at I-visit counts 4k and J at J-visit counts 4k.
  double reward_sum = 0.0;
  for (std::int64_t t = 1; t <= iterations; ++t) {
    reward_sum += r.rewards_I[t - 1];
    if (t % 4 != 0) continue;
    const double avg = reward_sum / static_cast<double>(t);
    r.max_avg_reward_error = std::max(r.max_avg_reward_error, std::abs(avg - 0.25));
    if (static_cast<std::size_t>(t) <= reg_i.size()) {
      r.max_regret = std::max(r.max_regret, reg_i[t - 1]);
    }
  }
  for (std::size_t t = 4; t <= reg_j1.size(); t += 4) {
    r.max_regret = std::max({r.max_regret, reg_j1[t - 1], reg_j2[t - 1]});
  }
  r.avg_reward_I = reward_sum / static_cast<double>(iterations);
  r.regret_I = reg_i.empty() ? 0.0 : reg_i.back();
  r.regret_J_p1 = reg_j1.empty() ? 0.0 : reg_j1.back();
  r.regret_J_p2 = reg_j2.empty() ? 0.0 : reg_j2.back();
  const auto strategies = extract_strategies(tree, 0.0);
  r.expl1 = exploitability(game, strategies.empirical).expl1;
  return r;
}

}  // namespace smlab
