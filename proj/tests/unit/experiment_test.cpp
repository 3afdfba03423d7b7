#include "smlab/experiment.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace smlab {
namespace {

std::string config_error_key(std::string_view text,
                             const std::map<std::string, std::string>& overrides = {}) {
  try {
    parse_config(text, overrides);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

// Drops the trailing wall_ns column.
std::string without_timing(const std::string& row) { return row.substr(0, row.rfind(',')); }

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::path(::testing::TempDir()) / name;
}

TEST(Config, MinimalUsesDefaults) {
  const auto c = parse_config("game = goofspiel:d=4\nalgo = rm\niterations = 1e7\n");
  EXPECT_EQ(c.iterations, 10000000);
  EXPECT_EQ(c.variant, Variant::kSmMcts);
  EXPECT_EQ(c.wrapper, WrapperMode::kNone);
  EXPECT_EQ(c.seeds, std::vector<std::uint64_t>{1});
  EXPECT_TRUE(c.denoise);
  EXPECT_EQ(c.parallel_runs, 1);
  EXPECT_NEAR(c.checkpoint_ratio, std::pow(10.0, 0.25), 1e-12);
  EXPECT_EQ(c.wrapper_gamma, c.gamma);
}

TEST(Config, FullFileWithComments) {
  const auto c = parse_config(
      "# experiment\n"
      "game = oshizumo:N=5,K=2\n"
      "variant = smmctsa   # averaged\n"
      "algo = exp3\n"
      "wrapper = fixed\n"
      "gamma = 0.05\n"
      "wrapper_gamma = 0.2\n"
      "iterations = 1000\n"
      "checkpoint_ratio = 2\n"
      "seeds = 3,4,5\n"
      "out = x.csv\n"
      "denoise = off\n"
      "parallel_runs = 3\n");
  EXPECT_EQ(c.variant, Variant::kSmMctsA);
  EXPECT_EQ(c.algo, Algo::kExp3);
  EXPECT_EQ(c.wrapper, WrapperMode::kFixed);
  EXPECT_EQ(c.wrapper_gamma, 0.2);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{3, 4, 5}));
  EXPECT_FALSE(c.denoise);
  EXPECT_EQ(c.out, "x.csv");
  EXPECT_NEAR(effective_exploration(c), 1 - 0.8 * 0.95, 1e-15);
}

TEST(Config, OverridesWin) {
  const auto c = parse_config("game = anti:D=5\nalgo = rm\niterations = 10\ngamma = 0.1\n",
                              {{"gamma", "0.3"}, {"iterations", "20"}});
  EXPECT_EQ(c.gamma, 0.3);
  EXPECT_EQ(c.iterations, 20);
  // Overrides alone can supply the required keys.
  EXPECT_NO_THROW(parse_config("", {{"game", "counterexample"}, {"algo", "exp3"},
                                    {"iterations", "4"}}));
}

TEST(Config, RoundTripsThroughText) {
  const auto c = parse_config(
      "game=linbound:D=4,gamma=0.3,eta=0.01\nalgo=exp3\ngamma=0.3\niterations=100\nseeds=1,2\n");
  const auto again = parse_config(to_string(c));
  EXPECT_EQ(to_string(again), to_string(c));
}

TEST(Config, ErrorsNameTheKey) {
  const std::string base = "game = matching_pennies\nalgo = rm\niterations = 10\n";
  EXPECT_EQ(config_error_key(base + "variant = smmctsb\n"), "variant");
  EXPECT_EQ(config_error_key(base + "colour = red\n"), "colour");
  EXPECT_EQ(config_error_key(base + "gamma = 1.5\n"), "gamma");
  EXPECT_EQ(config_error_key(base + "gamma = abc\n"), "gamma");
  EXPECT_EQ(config_error_key(base + "seeds = 1,x\n"), "seeds");
  EXPECT_EQ(config_error_key(base + "denoise = maybe\n"), "denoise");
  EXPECT_EQ(config_error_key(base + "parallel_runs = 0\n"), "parallel_runs");
  EXPECT_EQ(config_error_key(base + "checkpoint_ratio = 1\n"), "checkpoint_ratio");
  EXPECT_EQ(config_error_key(base + "wrapper = fixed\nwrapper_gamma = 0\n"), "wrapper_gamma");
  EXPECT_EQ(config_error_key(base + "algo = rm\n"), "algo");  // duplicate
  EXPECT_EQ(config_error_key("game = matching_pennies\nalgo = rm\n"), "iterations");
  EXPECT_EQ(config_error_key("game = chess\nalgo = rm\niterations = 1\n"), "game");
  EXPECT_EQ(config_error_key("game = matching_pennies\nalgo = pathological-det\niterations = 4\n"),
            "algo");
  EXPECT_EQ(config_error_key("game = counterexample\nalgo = pathological-hc\niterations = 4\n"
                             "epsilon = 0.5\n"),
            "epsilon");
  EXPECT_EQ(config_error_key("game = counterexample\nalgo = pathological-det\niterations = 4\n"
                             "wrapper = sqrt\n"),
            "wrapper");
  EXPECT_EQ(config_error_key(base + "iterations = 0\n", {}), "iterations");
  EXPECT_EQ(config_error_key(base + "just text\n").rfind("line", 0), 0u);
}

TEST(Checkpoints, GeometricGrid) {
  const auto c = geometric_checkpoints(10000, std::pow(10.0, 0.25));
  EXPECT_EQ(c, (std::vector<std::int64_t>{1, 2, 3, 6, 10, 18, 32, 56, 100, 178, 316, 562, 1000,
                                          1778, 3162, 5623, 10000}));
  EXPECT_EQ(geometric_checkpoints(1, 2.0), std::vector<std::int64_t>{1});
  EXPECT_EQ(geometric_checkpoints(5, 2.0), (std::vector<std::int64_t>{1, 2, 4, 5}));
  EXPECT_THROW(geometric_checkpoints(0, 2.0), std::invalid_argument);
}

TEST(Csv, HeaderAndRowShape) {
  EXPECT_EQ(kCsvHeader,
            "run_id,seed,iteration,expl_sigma_p1,expl_sigma_p2,expl_mu_p1,expl_mu_p2,"
            "expl_mu_total,subgame_gap,bias_max,root_value_exact,wall_ns");
  RunRecord r;
  r.run_id = 2;
  r.seed = 7;
  r.iteration = 100;
  r.expl_mu_p1 = 0.125;
  r.root_value_exact = 0.5;
  r.wall_ns = 99;
  EXPECT_EQ(to_csv_row(r), "2,7,100,0,0,0.125,0,0,0,0,0.5,99");
}

TEST(RunSingle, CheckpointRecords) {
  auto c = parse_config("game = matching_pennies\nalgo = rm\niterations = 1000\n");
  std::vector<std::int64_t> seen;
  const auto records =
      run_single(c, 0, 5, [&](const RunRecord& r) { seen.push_back(r.iteration); });
  EXPECT_EQ(seen, geometric_checkpoints(1000, c.checkpoint_ratio));
  for (const auto& r : records) {
    EXPECT_EQ(r.root_value_exact, 0.5);
    EXPECT_NEAR(r.expl_mu_total, r.expl_mu_p1 + r.expl_mu_p2, 1e-15);
    EXPECT_GE(r.bias_max, 0.0);
  }
}

TEST(RunSingle, DeterministicCounterexampleExploitability) {
  const auto c = parse_config(
      "game = counterexample\nalgo = pathological-det\niterations = 100000\n");
  const auto records = run_single(c, 0, 1);
  EXPECT_NEAR(records.back().expl_sigma_p1, 0.25, 0.01);
  EXPECT_NEAR(records.back().bias_max, 0.25, 1e-9);
}

TEST(RunSingle, MatchingPenniesConverges) {
  const auto c = parse_config(
      "game = matching_pennies\nalgo = rm\ngamma = 0.05\niterations = 1000000\n");
  EXPECT_LE(run_single(c, 0, 1).back().expl_mu_total, 0.07);
}

TEST(RunExperiment, ByteIdenticalAcrossRunsAndThreads) {
  const auto a = temp_path("a.csv"), b = temp_path("b.csv"), p = temp_path("p.csv");
  const std::string text =
      "game = goofspiel:d=3\nalgo = exp3\nvariant = smmctsa\niterations = 20000\nseeds = 1,2,3\n";
  run_experiment(parse_config(text, {{"out", a.string()}}));
  run_experiment(parse_config(text, {{"out", b.string()}}));
  run_experiment(parse_config(text, {{"out", p.string()}, {"parallel_runs", "3"}}));
  const auto la = read_lines(a), lb = read_lines(b), lp = read_lines(p);
  ASSERT_EQ(la.size(), 1 + 3 * geometric_checkpoints(20000, std::pow(10.0, 0.25)).size());
  ASSERT_EQ(la.size(), lb.size());
  ASSERT_EQ(la.size(), lp.size());
  EXPECT_EQ(la[0], kCsvHeader);
  for (std::size_t k = 1; k < la.size(); ++k) {
    EXPECT_EQ(without_timing(la[k]), without_timing(lb[k]));
    EXPECT_EQ(without_timing(la[k]), without_timing(lp[k]));
  }
  for (const auto& f : std::filesystem::directory_iterator(::testing::TempDir())) {
    EXPECT_EQ(f.path().string().find(".part"), std::string::npos) << f.path();
  }
}

// A run's rows depend on its own seed only.
TEST(RunExperiment, SeedIsolation) {
  const auto a = temp_path("s1.csv"), b = temp_path("s2.csv");
  const std::string text = "game = random:B=2,D=3,seed=4\nalgo = rm\niterations = 5000\n";
  run_experiment(parse_config(text, {{"out", a.string()}, {"seeds", "10,11,12"}}));
  run_experiment(parse_config(text, {{"out", b.string()}, {"seeds", "10,99,12"}}));
  const auto la = read_lines(a), lb = read_lines(b);
  ASSERT_EQ(la.size(), lb.size());
  const std::size_t per_run = (la.size() - 1) / 3;
  for (std::size_t k = 1; k < la.size(); ++k) {
    const bool middle = k > per_run && k <= 2 * per_run;
    if (!middle) EXPECT_EQ(without_timing(la[k]), without_timing(lb[k]));
  }
  EXPECT_NE(without_timing(la[2 * per_run]), without_timing(lb[2 * per_run]));
}

TEST(RunExperiment, UnwritableOutput) {
  const auto c = parse_config("game = matching_pennies\nalgo = rm\niterations = 10\n",
                              {{"out", "/nonexistent_dir/x.csv"}});
  EXPECT_THROW(run_experiment(c), std::runtime_error);
}

}  // namespace
}  // namespace smlab
