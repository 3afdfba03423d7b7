#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smlab/bandit.hpp"
#include "smlab/games.hpp"
#include "smlab/pathological.hpp"
#include "smlab/search.hpp"

namespace smlab {

enum class Algo { kExp3, kRm, kPathologicalDet, kPathologicalHc };

struct ExperimentConfig {
  GameSpec game = MatchingPenniesSpec{};
  Variant variant = Variant::kSmMcts;
  Algo algo = Algo::kRm;
  WrapperMode wrapper = WrapperMode::kNone;
  double gamma = 0.1;
  double wrapper_gamma = 0.1;  // defaults to gamma
  std::int64_t iterations = 1;
  double checkpoint_ratio = 1.7782794100389228;  // 10^(1/4)
  std::vector<std::uint64_t> seeds{1};
  std::string out = "results.csv";
  bool denoise = true;
  int parallel_runs = 1;
  double epsilon = 0.05;  // pathological-hc only
};

// A configuration problem tied to one key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Flat "key = value" lines; '#' starts a comment. `overrides` win over the
// file. game, algo and iterations are required. Throws ConfigError naming
// the key for unknown keys, malformed values and out-of-range values.
ExperimentConfig parse_config(std::string_view text,
                              const std::map<std::string, std::string>& overrides = {});

// The effective configuration as parseable key=value lines.
std::string to_string(const ExperimentConfig& config);

std::string_view to_string(Algo algo);
std::string_view to_string(Variant variant);
std::string_view to_string(WrapperMode mode);

// Iterations 1 = c_0 < c_1 < ... < c_k = iterations with c_n = round(ratio^n).
std::vector<std::int64_t> geometric_checkpoints(std::int64_t iterations, double ratio);

// The uniform weight every emitted distribution carries under `config`.
double effective_exploration(const ExperimentConfig& config);

struct RunRecord {
  std::size_t run_id = 0;
  std::uint64_t seed = 0;
  std::int64_t iteration = 0;
  double expl_sigma_p1 = 0.0;
  double expl_sigma_p2 = 0.0;
  double expl_mu_p1 = 0.0;
  double expl_mu_p2 = 0.0;
  double expl_mu_total = 0.0;
  double subgame_gap = 0.0;
  double bias_max = 0.0;
  double root_value_exact = 0.0;
  std::int64_t wall_ns = 0;
};

inline constexpr std::string_view kCsvHeader =
    "run_id,seed,iteration,expl_sigma_p1,expl_sigma_p2,expl_mu_p1,expl_mu_p2,"
    "expl_mu_total,subgame_gap,bias_max,root_value_exact,wall_ns";

std::string to_csv_row(const RunRecord& record);

// Hands each record to `sink` as soon as its checkpoint is evaluated.
using RecordSink = std::function<void(const RunRecord&)>;

// One seeded learning run. Streams derive from `seed` alone.
std::vector<RunRecord> run_single(const ExperimentConfig& config, std::size_t run_id,
                                  std::uint64_t seed, const RecordSink& sink = {});

// Runs every seed and writes the CSV to config.out ("-" for stdout). With
// parallel_runs > 1 runs execute on worker threads into per-run part files
// that are merged in run order. Throws std::runtime_error when the output
// cannot be written.
void run_experiment(const ExperimentConfig& config);

}  // namespace smlab
