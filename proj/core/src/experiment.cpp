#include "smlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "smlab/strategy.hpp"

namespace smlab {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, std::string_view v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x)) {
    throw ConfigError(key, "expected a number, got '" + std::string(v) + "'");
  }
  return x;
}

// Accepts plain integers and integral scientific forms such as 1e7.
std::int64_t parse_int(const std::string& key, std::string_view v) {
  std::int64_t n = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
  if (ec == std::errc() && p == v.data() + v.size()) return n;
  double x = 0.0;
  const auto [q, ec2] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec2 == std::errc() && q == v.data() + v.size() && std::isfinite(x) &&
      x == std::floor(x) && std::fabs(x) < 9e18) {
    return static_cast<std::int64_t>(x);
  }
  throw ConfigError(key, "expected an integer, got '" + std::string(v) + "'");
}

std::vector<std::uint64_t> parse_seeds(const std::string& key, std::string_view v) {
  std::vector<std::uint64_t> seeds;
  while (!v.empty()) {
    const auto comma = v.find(',');
    const std::string_view item = trim(v.substr(0, comma));
    std::uint64_t s = 0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), s);
    if (item.empty() || ec != std::errc() || p != item.data() + item.size()) {
      throw ConfigError(key, "expected a comma-separated list of non-negative integers");
    }
    seeds.push_back(s);
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  if (seeds.empty()) throw ConfigError(key, "at least one seed is required");
  return seeds;
}

template <class E>
E parse_enum(const std::string& key, std::string_view v,
             std::initializer_list<std::pair<std::string_view, E>> choices) {
  std::string names;
  for (const auto& [name, value] : choices) {
    if (v == name) return value;
    names += names.empty() ? "" : "|";
    names += name;
  }
  throw ConfigError(key, "expected one of " + names + ", got '" + std::string(v) + "'");
}

std::string format_double(double x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

constexpr std::string_view kKeys[] = {
    "game",  "variant", "algo", "wrapper", "gamma",         "wrapper_gamma", "iterations",
    "checkpoint_ratio", "seeds", "out", "denoise", "parallel_runs", "epsilon"};

}  // namespace

std::string_view to_string(Algo algo) {
  switch (algo) {
    case Algo::kExp3: return "exp3";
    case Algo::kRm: return "rm";
    case Algo::kPathologicalDet: return "pathological-det";
    case Algo::kPathologicalHc: return "pathological-hc";
  }
  return "?";
}

std::string_view to_string(Variant variant) {
  return variant == Variant::kSmMcts ? "smmcts" : "smmctsa";
}

std::string_view to_string(WrapperMode mode) {
  switch (mode) {
    case WrapperMode::kNone: return "none";
    case WrapperMode::kFixed: return "fixed";
    case WrapperMode::kSqrt: return "sqrt";
  }
  return "?";
}

ExperimentConfig parse_config(std::string_view text,
                              const std::map<std::string, std::string>& overrides) {
  std::map<std::string, std::string> kv;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (!kv.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
      throw ConfigError(key, "given more than once");
    }
  }
  for (const auto& [k, v] : overrides) kv[k] = v;

  for (const auto& [k, v] : kv) {
    if (std::find(std::begin(kKeys), std::end(kKeys), k) == std::end(kKeys)) {
      throw ConfigError(k, "unknown key");
    }
  }
  for (const char* required : {"game", "algo", "iterations"}) {
    if (!kv.contains(required)) throw ConfigError(required, "required key missing");
  }

  ExperimentConfig c;
  try {
    c.game = parse_game_spec(kv.at("game"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("game", e.what());
  }
  c.algo = parse_enum<Algo>("algo", kv.at("algo"),
                            {{"exp3", Algo::kExp3},
                             {"rm", Algo::kRm},
                             {"pathological-det", Algo::kPathologicalDet},
                             {"pathological-hc", Algo::kPathologicalHc}});
  c.iterations = parse_int("iterations", kv.at("iterations"));
  if (auto it = kv.find("variant"); it != kv.end()) {
    c.variant = parse_enum<Variant>(
        "variant", it->second, {{"smmcts", Variant::kSmMcts}, {"smmctsa", Variant::kSmMctsA}});
  }
  if (auto it = kv.find("wrapper"); it != kv.end()) {
    c.wrapper = parse_enum<WrapperMode>("wrapper", it->second,
                                        {{"none", WrapperMode::kNone},
                                         {"fixed", WrapperMode::kFixed},
                                         {"sqrt", WrapperMode::kSqrt}});
  }
  if (auto it = kv.find("gamma"); it != kv.end()) c.gamma = parse_double("gamma", it->second);
  c.wrapper_gamma = c.gamma;
  if (auto it = kv.find("wrapper_gamma"); it != kv.end()) {
    c.wrapper_gamma = parse_double("wrapper_gamma", it->second);
  }
  if (auto it = kv.find("checkpoint_ratio"); it != kv.end()) {
    c.checkpoint_ratio = parse_double("checkpoint_ratio", it->second);
  }
  if (auto it = kv.find("seeds"); it != kv.end()) c.seeds = parse_seeds("seeds", it->second);
  if (auto it = kv.find("out"); it != kv.end()) c.out = it->second;
  if (auto it = kv.find("denoise"); it != kv.end()) {
    c.denoise = parse_enum<bool>("denoise", it->second, {{"on", true}, {"off", false}});
  }
  if (auto it = kv.find("parallel_runs"); it != kv.end()) {
    const auto n = parse_int("parallel_runs", it->second);
    if (n < 1 || n > 1024) throw ConfigError("parallel_runs", "must lie in [1,1024]");
    c.parallel_runs = static_cast<int>(n);
  }
  if (auto it = kv.find("epsilon"); it != kv.end()) {
    c.epsilon = parse_double("epsilon", it->second);
  }

  if (c.iterations < 1) throw ConfigError("iterations", "must be >= 1");
  const bool bandit = c.algo == Algo::kExp3 || c.algo == Algo::kRm;
  if (bandit && !(c.gamma > 0.0 && c.gamma < 1.0)) {
    throw ConfigError("gamma", "must lie in (0,1)");
  }
  if (c.wrapper == WrapperMode::kFixed && !(c.wrapper_gamma > 0.0 && c.wrapper_gamma < 1.0)) {
    throw ConfigError(kv.contains("wrapper_gamma") ? "wrapper_gamma" : "gamma",
                      "must lie in (0,1) for the fixed wrapper");
  }
  if (!(c.checkpoint_ratio > 1.0)) throw ConfigError("checkpoint_ratio", "must exceed 1");
  if (c.out.empty()) throw ConfigError("out", "must not be empty");
  if (!bandit) {
    if (!std::holds_alternative<CounterexampleSpec>(c.game)) {
      throw ConfigError("algo", "pathological policies need game=counterexample");
    }
    if (c.wrapper != WrapperMode::kNone) {
      throw ConfigError("wrapper", "pathological policies cannot be wrapped");
    }
    if (!(c.epsilon > 0.0 && c.epsilon < 1.0 / 3.0)) {
      throw ConfigError("epsilon", "must lie in (0,1/3)");
    }
  }
  return c;
}

std::string to_string(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "game=" << to_string(c.game) << '\n'
     << "variant=" << to_string(c.variant) << '\n'
     << "algo=" << to_string(c.algo) << '\n'
     << "wrapper=" << to_string(c.wrapper) << '\n'
     << "gamma=" << format_double(c.gamma) << '\n'
     << "wrapper_gamma=" << format_double(c.wrapper_gamma) << '\n'
     << "iterations=" << c.iterations << '\n'
     << "checkpoint_ratio=" << format_double(c.checkpoint_ratio) << '\n'
     << "seeds=";
  for (std::size_t k = 0; k < c.seeds.size(); ++k) os << (k ? "," : "") << c.seeds[k];
  os << '\n'
     << "out=" << c.out << '\n'
     << "denoise=" << (c.denoise ? "on" : "off") << '\n'
     << "parallel_runs=" << c.parallel_runs << '\n'
     << "epsilon=" << format_double(c.epsilon) << '\n';
  return os.str();
}

std::vector<std::int64_t> geometric_checkpoints(std::int64_t iterations, double ratio) {
  if (iterations < 1) throw std::invalid_argument("checkpoints: iterations must be >= 1");
  if (!(ratio > 1.0)) throw std::invalid_argument("checkpoints: ratio must exceed 1");
  std::vector<std::int64_t> out{1};
  for (int n = 1;; ++n) {
    const double c = std::round(std::pow(ratio, n));
    if (c >= static_cast<double>(iterations)) break;
    const auto k = static_cast<std::int64_t>(c);
    if (k > out.back()) out.push_back(k);
  }
  if (iterations > out.back()) out.push_back(iterations);
  return out;
}

double effective_exploration(const ExperimentConfig& c) {
  if (c.algo == Algo::kPathologicalDet || c.algo == Algo::kPathologicalHc) return 0.0;
  if (c.wrapper == WrapperMode::kFixed) {
    return 1.0 - (1.0 - c.wrapper_gamma) * (1.0 - c.gamma);
  }
  return c.gamma;
}

std::string to_csv_row(const RunRecord& r) {
  std::string s;
  s += std::to_string(r.run_id);
  s += ',' + std::to_string(r.seed);
  s += ',' + std::to_string(r.iteration);
  for (double x : {r.expl_sigma_p1, r.expl_sigma_p2, r.expl_mu_p1, r.expl_mu_p2,
                   r.expl_mu_total, r.subgame_gap, r.bias_max, r.root_value_exact}) {
    s += ',' + format_double(x);
  }
  s += ',' + std::to_string(r.wall_ns);
  return s;
}

std::vector<RunRecord> run_single(const ExperimentConfig& config, std::size_t run_id,
                                  std::uint64_t seed, const RecordSink& sink) {
  const auto start = std::chrono::steady_clock::now();
  const Game game = build_game(config.game);
  const std::vector<double> values = subgame_values(game);

  PolicyFactory factory;
  SearchOptions opts;
  switch (config.algo) {
    case Algo::kExp3:
    case Algo::kRm:
      factory = make_policy_factory(
          {config.algo == Algo::kExp3 ? BanditAlgo::kExp3 : BanditAlgo::kRm, config.gamma,
           config.wrapper, config.wrapper_gamma});
      break;
    case Algo::kPathologicalDet:
    case Algo::kPathologicalHc:
      factory = make_counterexample_factory(config.algo == Algo::kPathologicalDet
                                                ? CounterexampleMode::kDeterministic
                                                : CounterexampleMode::kHc,
                                            {config.epsilon});
      opts.expand_all = true;
      break;
  }
  SearchTree tree(game, std::move(factory), seed, opts);
  const double gamma = config.denoise ? effective_exploration(config) : 0.0;

  std::vector<RunRecord> records;
  std::int64_t done = 0;
  for (const std::int64_t checkpoint : geometric_checkpoints(config.iterations,
                                                             config.checkpoint_ratio)) {
    run_until(tree, config.variant, checkpoint - done);
    done = checkpoint;
    const ExtractedStrategies ex = extract_strategies(tree, gamma);
    const EvalReport sigma = exploitability(game, ex.average, values);
    const EvalReport mu = config.denoise ? exploitability(game, ex.denoised, values) : sigma;
    RunRecord r;
    r.run_id = run_id;
    r.seed = seed;
    r.iteration = checkpoint;
    r.expl_sigma_p1 = sigma.expl1;
    r.expl_sigma_p2 = sigma.expl2;
    r.expl_mu_p1 = mu.expl1;
    r.expl_mu_p2 = mu.expl2;
    r.expl_mu_total = mu.expl_total;
    r.subgame_gap = mu.subgame_gap;
    for (NodeId h = 0; h < static_cast<NodeId>(game.num_nodes()); ++h) {
      if (const NodeStats* s = tree.stats(h)) r.bias_max = std::max(r.bias_max, s->upo.max_bias());
    }
    r.root_value_exact = values[game.root()];
    r.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    if (sink) sink(r);
    records.push_back(r);
  }
  return records;
}

namespace {

std::ofstream open_or_throw(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

void write_row(std::ostream& os, const RunRecord& r) {
  os << to_csv_row(r) << '\n';
  os.flush();
  if (!os) throw std::runtime_error("write failed");
}

}  // namespace

void run_experiment(const ExperimentConfig& config) {
  const bool to_stdout = config.out == "-";
  std::ofstream file;
  if (!to_stdout) file = open_or_throw(config.out);
  std::ostream& out = to_stdout ? std::cout : file;
  out << kCsvHeader << '\n';
  out.flush();

  const std::size_t runs = config.seeds.size();
  const auto workers = static_cast<std::size_t>(config.parallel_runs);
  if (workers <= 1 || runs <= 1) {
    for (std::size_t k = 0; k < runs; ++k) {
      run_single(config, k, config.seeds[k], [&](const RunRecord& r) { write_row(out, r); });
    }
    return;
  }

  const std::filesystem::path base =
      to_stdout ? std::filesystem::temp_directory_path() /
                      ("smlab-" + std::to_string(std::hash<std::thread::id>{}(
                                      std::this_thread::get_id())))
                : std::filesystem::path(config.out);
  auto part = [&](std::size_t k) {
    return std::filesystem::path(base.string() + ".part" + std::to_string(k));
  };
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t k = next++; k < runs; k = next++) {
      try {
        std::ofstream f = open_or_throw(part(k));
        run_single(config, k, config.seeds[k], [&](const RunRecord& r) { write_row(f, r); });
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, runs); ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  // Merge completed parts in run order, even after a failure.
  for (std::size_t k = 0; k < runs; ++k) {
    std::ifstream in(part(k), std::ios::binary);
    if (in && in.peek() != std::ifstream::traits_type::eof()) out << in.rdbuf();
    in.close();
    std::error_code ec;
    std::filesystem::remove(part(k), ec);
  }
  out.flush();
  if (error) std::rethrow_exception(error);
}

}  // namespace smlab
