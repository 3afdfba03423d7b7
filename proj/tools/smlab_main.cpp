// Command line front end: run experiments, solve games, replay the
// deterministic counterexample.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "smlab/experiment.hpp"
#include "smlab/games.hpp"
#include "smlab/pathological.hpp"
#include "smlab/strategy.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 1;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw smlab::ConfigError("config", "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simultaneous-move MCTS simulation lab"};
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::string> overrides;
  auto* run = app.add_subcommand("run", "Run a seeded learning experiment and write CSV");
  run->add_option("--config", config_path, "key=value config file");
  const std::pair<const char*, const char*> flags[] = {
      {"--game", "game"},   {"--variant", "variant"}, {"--algo", "algo"},
      {"--gamma", "gamma"}, {"--iters", "iterations"}, {"--seeds", "seeds"},
      {"--out", "out"},     {"--denoise", "denoise"}};
  for (const auto& [flag, key] : flags) {
    run->add_option_function<std::string>(
        flag, [&overrides, key = std::string(key)](const std::string& v) { overrides[key] = v; },
        "overrides '" + std::string(key) + "'");
  }

  std::string solve_game;
  bool solve_all = false;
  auto* solve = app.add_subcommand("solve", "Print subgame values of a game");
  solve->add_option("--game", solve_game, "game spec, e.g. goofspiel:d=4")->required();
  solve->add_flag("--all", solve_all, "print every node, not just the root");

  std::int64_t verify_iters = 100000;
  auto* verify = app.add_subcommand(
      "verify-counterexample", "Replay the scripted counterexample and report regrets");
  verify->add_option("--iters", verify_iters, "iterations (multiple of 4)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) {
      const std::string text = config_path.empty() ? std::string() : read_file(config_path);
      const smlab::ExperimentConfig config = smlab::parse_config(text, overrides);
      std::cerr << "# effective config\n" << smlab::to_string(config);
      smlab::run_experiment(config);
    } else if (*solve) {
      smlab::GameSpec spec;
      try {
        spec = smlab::parse_game_spec(solve_game);
      } catch (const std::invalid_argument& e) {
        throw smlab::ConfigError("game", e.what());
      }
      const smlab::Game game = smlab::build_game(spec);
      const auto values = smlab::subgame_values(game);
      std::printf("game=%s nodes=%zu\nroot_value=%.12g\n", smlab::to_string(spec).c_str(),
                  game.num_nodes(), values[game.root()]);
      if (solve_all) {
        std::printf("node,depth,terminal,value\n");
        for (smlab::NodeId h = 0; h < static_cast<smlab::NodeId>(game.num_nodes()); ++h) {
          std::printf("%d,%d,%d,%.12g\n", h, game.node_depth(h), game.is_terminal(h) ? 1 : 0,
                      values[h]);
        }
      }
    } else if (*verify) {
      if (verify_iters < 4 || verify_iters % 4 != 0) {
        throw smlab::ConfigError("iters", "must be a positive multiple of 4");
      }
      const auto r = smlab::verify_counterexample(verify_iters);
      std::printf(
          "iterations=%lld\navg_reward_I=%.12g\nregret_I=%.12g\nregret_J_p1=%.12g\n"
          "regret_J_p2=%.12g\nexpl1=%.12g\nmax_avg_reward_error=%.3g\nmax_regret=%.3g\n",
          static_cast<long long>(r.iterations), r.avg_reward_I, r.regret_I, r.regret_J_p1,
          r.regret_J_p2, r.expl1, r.max_avg_reward_error, r.max_regret);
    }
  } catch (const smlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
