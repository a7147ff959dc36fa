#include "ofw/cli.hpp"

#include "ofw/algorithms.hpp"
#include "ofw/bench.hpp"
#include "ofw/problems.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace ofw::cli {

namespace {

using nlohmann::json;

constexpr std::uint64_t kDataSalt = 0x64617461u;
constexpr std::uint64_t kAlgSalt = 0x616c6721u;
constexpr std::uint64_t kNoiseSalt = 0x6e6f6973u;

bool is_stochastic_experiment(const std::string& experiment) {
  return experiment == "flow" || experiment == "matcomp" ||
         experiment == "synthetic-convex";
}

json config_to_json(const RunConfig& c) {
  return json{{"experiment", c.experiment},
              {"algorithm", c.algorithm},
              {"T", c.horizon},
              {"K", c.inner_steps},
              {"seed", c.seed},
              {"sigma", c.sigma},
              {"output", c.output},
              {"ratings", c.ratings_path},
              {"topics", c.topics_path},
              {"network", c.network_path},
              {"ratings_lo", c.ratings_lo},
              {"ratings_hi", c.ratings_hi},
              {"batch", c.batch},
              {"budget", c.budget},
              {"flow_value", c.flow_value},
              {"lambda", c.lambda},
              {"trace_radius", c.trace_radius},
              {"offline_steps", c.offline_steps},
              {"jobs", c.jobs}};
}

std::vector<std::string> apply_json_config(const json& j, RunConfig& c) {
  std::vector<std::string> keys;
  auto load = [&](const char* key, auto& field) {
    if (j.contains(key)) {
      j.at(key).get_to(field);
      keys.push_back(key);
    }
  };
  load("experiment", c.experiment);
  load("algorithm", c.algorithm);
  load("T", c.horizon);
  load("K", c.inner_steps);
  load("seed", c.seed);
  load("sigma", c.sigma);
  load("output", c.output);
  load("ratings", c.ratings_path);
  load("topics", c.topics_path);
  load("network", c.network_path);
  load("ratings_lo", c.ratings_lo);
  load("ratings_hi", c.ratings_hi);
  load("batch", c.batch);
  load("budget", c.budget);
  load("flow_value", c.flow_value);
  load("lambda", c.lambda);
  load("trace_radius", c.trace_radius);
  load("offline_steps", c.offline_steps);
  load("jobs", c.jobs);
  return keys;
}

struct ExperimentDefaults {
  int batch = 1;
  double budget = 1.0;
};

ExperimentDefaults experiment_defaults(const std::string& experiment) {
  if (experiment == "facility-cont") return {5, 1.0};
  if (experiment == "facility-disc") return {40, 10.0};
  if (experiment == "coverage") return {50, 45.0};
  if (experiment == "matcomp") return {100, 0.0};
  if (experiment == "synthetic-submodular") return {5, 3.0};
  return {1, 3.0};
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{
      "facility-cont", "facility-disc", "coverage",           "flow",
      "matcomp",       "synthetic-convex", "synthetic-submodular"};
  return names;
}

const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names{"meta-fw", "meta-fw-novr", "os-fw",
                                              "os-fw-novr", "rofw", "pga",
                                              "online-greedy"};
  return names;
}

int effective_inner_steps(const RunConfig& config) {
  if (config.inner_steps > 0) return config.inner_steps;
  return static_cast<int>(
      std::ceil(std::pow(static_cast<double>(config.horizon), 1.5)));
}

RunConfig parse_config(int argc, const char* const* argv) {
  RunConfig config;

  // Config file first, so that flags override its values.
  std::string config_path;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  std::vector<std::string> file_keys;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw IoError("cannot open config file: " + config_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ParseError("bad config file " + config_path + ": " + e.what());
    }
    file_keys = apply_json_config(j, config);
  }

  CLI::App app{"Projection-free online optimization benchmark runner"};
  app.add_option("--config", config_path, "JSON config file (flags take precedence)");
  app.add_option("--exp,--experiment", config.experiment, "experiment name")
      ->check(CLI::IsMember(experiment_names()))
      ->capture_default_str();
  app.add_option("--alg,--algorithm", config.algorithm, "algorithm name")
      ->check(CLI::IsMember(algorithm_names()))
      ->capture_default_str();
  app.add_option("--T", config.horizon, "number of online rounds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--K", config.inner_steps,
                 "meta-fw inner steps (default ceil(T^1.5))")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", config.seed, "run seed")->capture_default_str();
  app.add_option("--sigma", config.sigma, "gradient noise level")
      ->capture_default_str();
  app.add_option("--out,--output", config.output,
                 "output basename for <out>.csv and <out>.json")
      ->capture_default_str();
  app.add_option("--ratings", config.ratings_path, "ratings CSV (facility)");
  app.add_option("--topics", config.topics_path, "topic-distribution CSV (coverage)");
  app.add_option("--network", config.network_path, "edge-list network file (flow)")
      ->capture_default_str();
  app.add_option("--ratings-lo", config.ratings_lo, "ratings CSV input range low")
      ->capture_default_str();
  app.add_option("--ratings-hi", config.ratings_hi, "ratings CSV input range high")
      ->capture_default_str();
  app.add_option("--B,--batch", config.batch, "per-round batch size (0 = default)");
  app.add_option("--budget", config.budget, "constraint budget (<0 = default)");
  app.add_option("--flow-value", config.flow_value,
                 "required flow value (<0 = network file value)");
  app.add_option("--lambda", config.lambda, "rofw regularizer (<0 = sqrt(T))");
  app.add_option("--trace-radius", config.trace_radius,
                 "nuclear-ball radius (<0 = ||target||_*)");
  app.add_option("--offline-steps", config.offline_steps,
                 "comparator FW steps (0 = 200 hindsight / 2000 stochastic)");
  app.add_option("--jobs", config.jobs, "fan out this many consecutive seeds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help() << std::flush;
    throw HelpRequested{};
  } catch (const CLI::ParseError& e) {
    throw ConfigError(std::string("usage error: ") + e.what());
  }
  for (const std::string& key : file_keys) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (key == "T" || key == "K") flag = "--" + key;
    if (app.count(flag) > 0)
      std::cerr << "[config] flag " << flag << " overrides config-file value\n";
  }
  validate_config(config);
  return config;
}

void validate_config(const RunConfig& config) {
  const auto& exps = experiment_names();
  const auto& algs = algorithm_names();
  if (std::find(exps.begin(), exps.end(), config.experiment) == exps.end())
    throw ConfigError("unknown experiment: " + config.experiment);
  if (std::find(algs.begin(), algs.end(), config.algorithm) == algs.end())
    throw ConfigError("unknown algorithm: " + config.algorithm);
  if (config.horizon < 1) throw ConfigError("T must be at least 1");
  if (config.inner_steps < 0)
    throw ConfigError("K must be at least 1 (or 0 for the default)");
  if (config.sigma < 0.0) throw ConfigError("sigma must be nonnegative");
  if (config.jobs < 1) throw ConfigError("jobs must be at least 1");
  if (config.algorithm == "pga" && config.experiment == "flow")
    throw ConfigError(
        "pga requires a projection oracle; the flow polytope does not expose one");
  if (config.algorithm == "online-greedy" && config.experiment != "facility-disc")
    throw ConfigError("online-greedy needs a discrete experiment (facility-disc)");
}

namespace {

struct PreparedRun {
  std::shared_ptr<problems::ExperimentStream> stream;
  bool discrete = false;
};

PreparedRun prepare_stream(const RunConfig& config) {
  const ExperimentDefaults defaults = experiment_defaults(config.experiment);
  const int batch = config.batch > 0 ? config.batch : defaults.batch;
  const double budget = config.budget > 0.0 ? config.budget : defaults.budget;
  const std::uint64_t data_seed = core::mix_seed(config.seed, kDataSalt);
  PreparedRun prep;

  if (config.experiment == "facility-cont" || config.experiment == "facility-disc" ||
      config.experiment == "synthetic-submodular") {
    const int items = config.experiment == "synthetic-submodular" ? 20 : 100;
    Matrix ratings;
    if (!config.ratings_path.empty()) {
      ratings = problems::load_ratings_csv(config.ratings_path, config.ratings_lo,
                                           config.ratings_hi);
    } else {
      const int users =
          std::max(200, batch * config.horizon);  // keep batches disjoint
      ratings = problems::synthetic_ratings(
          users, items, config.experiment == "synthetic-submodular" ? 3 : 5,
          data_seed);
    }
    prep.stream = std::make_shared<problems::ExperimentStream>(
        problems::facility_stream(ratings, batch, config.horizon, budget,
                                  config.seed));
    prep.discrete = config.experiment == "facility-disc";
    return prep;
  }
  if (config.experiment == "coverage") {
    Matrix topics = !config.topics_path.empty()
                        ? problems::load_topics_csv(config.topics_path)
                        : problems::synthetic_topics(
                              std::max(500, 4 * batch), 10, 0.3, data_seed);
    prep.stream = std::make_shared<problems::ExperimentStream>(
        problems::coverage_stream(topics, batch, config.horizon, budget,
                                  config.seed));
    return prep;
  }
  if (config.experiment == "flow") {
    lmo::FlowNetwork loaded = lmo::FlowNetwork::load(config.network_path);
    const double value =
        config.flow_value >= 0.0 ? config.flow_value : loaded.flow_value();
    auto network = std::make_shared<lmo::FlowNetwork>(
        loaded.num_vertices(), loaded.arcs(), loaded.source(), loaded.sink(), value);
    prep.stream = std::make_shared<problems::ExperimentStream>(
        problems::flow_stream(network, config.horizon, config.sigma, config.seed));
    return prep;
  }
  if (config.experiment == "matcomp") {
    const Matrix target = problems::synthetic_low_rank(50, 50, 10, data_seed);
    const double radius =
        config.trace_radius > 0.0
            ? config.trace_radius
            : Eigen::BDCSVD<Matrix>(target).singularValues().sum();
    prep.stream = std::make_shared<problems::ExperimentStream>(
        problems::matrix_completion_stream(target, batch, config.horizon, radius,
                                           config.seed));
    return prep;
  }
  // synthetic-convex
  auto set = std::make_shared<lmo::BudgetedBox>(10, budget);
  prep.stream = std::make_shared<problems::ExperimentStream>(
      problems::quadratic_stream(set, config.horizon, config.sigma,
                                 core::mix_seed(config.seed, kDataSalt),
                                 core::mix_seed(config.seed, kNoiseSalt)));
  return prep;
}

std::unique_ptr<algorithms::OnlineAlgorithm> make_algorithm(
    const RunConfig& config, const problems::ExperimentStream& stream) {
  const core::ConstraintSet& set = stream.constraint();
  const double eps = 1.0 / std::sqrt(static_cast<double>(config.horizon));
  if (config.algorithm == "meta-fw" || config.algorithm == "meta-fw-novr") {
    algorithms::MetaFwOptions opt;
    opt.inner_steps = effective_inner_steps(config);
    opt.sense = stream.sense();
    opt.seed = core::mix_seed(config.seed, kAlgSalt);
    opt.perturbation_rate = eps;
    opt.variance_reduction = config.algorithm == "meta-fw";
    return std::make_unique<algorithms::MetaFrankWolfe>(set, std::move(opt));
  }
  if (config.algorithm == "os-fw" || config.algorithm == "os-fw-novr") {
    algorithms::OneShotOptions opt;
    opt.sense = stream.sense();
    opt.horizon = config.horizon;
    opt.variance_reduction = config.algorithm == "os-fw";
    return std::make_unique<algorithms::OneShotFrankWolfe>(set, std::move(opt));
  }
  if (config.algorithm == "rofw") {
    algorithms::RegularizedOfwOptions opt;
    opt.sense = stream.sense();
    opt.lambda = config.lambda >= 0.0
                     ? config.lambda
                     : std::sqrt(static_cast<double>(config.horizon));
    return std::make_unique<algorithms::RegularizedOnlineFw>(set, std::move(opt));
  }
  if (config.algorithm == "pga") {
    algorithms::ProjectedGradientOptions opt;
    opt.sense = stream.sense();
    return std::make_unique<algorithms::ProjectedGradient>(set, std::move(opt));
  }
  throw ConfigError("algorithm " + config.algorithm + " has no continuous driver");
}

// Comparator values for each round, alpha for the ledger.
struct Comparator {
  std::vector<double> per_round;
  double alpha = 1.0;
};

Comparator hindsight_comparator(const RunConfig& config,
                                const problems::ExperimentStream& stream,
                                bool discrete) {
  const int T = config.horizon;
  std::vector<core::SmoothObjective> objectives;
  std::vector<std::shared_ptr<const submodular::SetFunction>> discrete_fs;
  objectives.reserve(T);
  for (int t = 1; t <= T; ++t) {
    problems::StreamRound round = stream.round(t);
    objectives.push_back(round.objective);
    discrete_fs.push_back(round.set_function);
  }
  const core::SmoothObjective total = bench::sum_objectives(objectives);
  Comparator comp;
  comp.per_round.resize(T);
  const int steps = config.offline_steps > 0 ? config.offline_steps : 200;
  const int n = stream.constraint().dimension();

  if (stream.sense() == core::ObjectiveSense::MaximizeDRSubmodular && n <= 12 &&
      !discrete) {
    // Small instances afford the exact optimum; report (1-1/e)-regret.
    auto box = dynamic_cast<const lmo::BudgetedBox*>(&stream.constraint());
    submodular::SetFunction summed(n, [&objectives, n](const submodular::IndexSet& s) {
      const Vector x = submodular::indicator(s, n);
      double v = 0.0;
      for (const auto& o : objectives) v += o.value(x);
      return v;
    });
    if (box) {
      const bench::BruteForceResult best = bench::brute_force_opt(summed, *box);
      const Vector x_star = submodular::indicator(best.best, n);
      for (int t = 0; t < T; ++t) comp.per_round[t] = objectives[t].value(x_star);
      comp.alpha = 1.0 - std::exp(-1.0);
      return comp;
    }
  }

  const Vector x_star = bench::offline_fw(total, stream.constraint(), steps,
                                          stream.sense());
  if (!discrete) {
    for (int t = 0; t < T; ++t) comp.per_round[t] = objectives[t].value(x_star);
    return comp;
  }
  // Discrete runs compare against the rounded offline solution.
  auto box = dynamic_cast<const lmo::BudgetedBox*>(&stream.constraint());
  if (!box) throw ConfigError("discrete comparator needs a budgeted box");
  const Vector rounded = submodular::pipage_round(x_star, *box, total.value);
  const submodular::IndexSet fixed_set = submodular::support_set(rounded);
  for (int t = 0; t < T; ++t)
    comp.per_round[t] = discrete_fs[t]->evaluate(fixed_set);
  return comp;
}

Comparator stochastic_comparator(const RunConfig& config,
                                 const problems::ExperimentStream& stream) {
  const core::SmoothObjective& expected = *stream.expected_objective();
  const int steps = config.offline_steps > 0 ? config.offline_steps : 2000;
  const Vector x_star =
      bench::offline_fw(expected, stream.constraint(), steps, stream.sense());
  Comparator comp;
  comp.per_round.assign(config.horizon, expected.value(x_star));
  return comp;
}

void write_sidecar(const RunConfig& config, long grad_queries, long lmo_calls,
                   double seconds) {
  json sidecar{{"config", config_to_json(config)},
               {"grad_queries", grad_queries},
               {"lmo_calls", lmo_calls},
               {"seconds", seconds}};
  std::ofstream out(config.output + ".json");
  if (!out) throw IoError("cannot write sidecar: " + config.output + ".json");
  out << sidecar.dump(2) << '\n';
}

void validate_csv(const std::string& path, int expected_rows) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot re-open csv for validation: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "t,played,comparator,cum_regret")
    throw IoError("csv header mismatch in " + path);
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    int cells = 0;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      (void)std::stod(cell, &used);
      if (used != cell.size()) throw IoError("non-numeric csv cell in " + path);
      ++cells;
    }
    if (cells != 4) throw IoError("csv row with wrong arity in " + path);
    ++rows;
  }
  if (rows != expected_rows)
    throw IoError("csv row count mismatch in " + path + ": " +
                  std::to_string(rows) + " != " + std::to_string(expected_rows));
}

}  // namespace

int run(const RunConfig& config) {
  validate_config(config);
  const auto start = std::chrono::steady_clock::now();
  PreparedRun prep = prepare_stream(config);
  const problems::ExperimentStream& stream = *prep.stream;
  const int T = config.horizon;

  const bool stochastic = is_stochastic_experiment(config.experiment) &&
                          stream.expected_objective().has_value();
  Comparator comparator = stochastic
                              ? stochastic_comparator(config, stream)
                              : hindsight_comparator(config, stream, prep.discrete);

  bench::RegretLedger ledger(stream.sense(), comparator.alpha);
  const long lmo_base = stream.constraint().lmo_call_count();
  long grad_queries = 0;

  if (config.algorithm == "online-greedy") {
    const ExperimentDefaults defaults = experiment_defaults(config.experiment);
    const double budget = config.budget > 0.0 ? config.budget : defaults.budget;
    algorithms::OnlineGreedyOptions opt;
    opt.budget = static_cast<int>(std::lround(budget));
    opt.perturbation_rate = 1.0 / std::sqrt(static_cast<double>(T));
    opt.seed = core::mix_seed(config.seed, kAlgSalt);
    algorithms::OnlineGreedy greedy(stream.constraint().dimension(), opt);
    for (int t = 1; t <= T; ++t) {
      problems::StreamRound round = stream.round(t);
      const auto [played, value] = greedy.step(*round.set_function);
      ledger.record_round(value, comparator.per_round[t - 1]);
    }
  } else {
    std::unique_ptr<algorithms::OnlineAlgorithm> algorithm =
        make_algorithm(config, stream);
    auto box = dynamic_cast<const lmo::BudgetedBox*>(&stream.constraint());
    for (int t = 1; t <= T; ++t) {
      problems::StreamRound round = stream.round(t);
      const Vector x = algorithm->play();
      double played_value;
      if (prep.discrete) {
        const Vector rounded = submodular::pipage_round(x, *box, round.objective.value);
        played_value = round.set_function->evaluate(submodular::support_set(rounded));
      } else if (stochastic) {
        played_value = stream.expected_objective()->value(x);
      } else {
        played_value = round.objective.value(x);
      }
      ledger.record_round(played_value, comparator.per_round[t - 1]);
      algorithm->feedback(*round.oracle);
    }
    grad_queries = algorithm->grad_queries();
  }

  const std::string csv_path = config.output + ".csv";
  {
    std::ofstream out(csv_path);
    if (!out) throw IoError("cannot write csv: " + csv_path);
    ledger.write_csv(out);
  }
  validate_csv(csv_path, T);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_sidecar(config, grad_queries, stream.constraint().lmo_call_count() - lmo_base,
                seconds);
  return 0;
}

int run_cli(int argc, const char* const* argv) {
  try {
    const RunConfig config = parse_config(argc, argv);
    if (config.jobs == 1) return run(config);
    std::vector<std::thread> workers;
    std::vector<int> codes(config.jobs, 0);
    for (int j = 0; j < config.jobs; ++j) {
      workers.emplace_back([&, j] {
        RunConfig local = config;
        local.jobs = 1;
        local.seed = config.seed + static_cast<std::uint64_t>(j);
        local.output = config.output + "-seed" + std::to_string(local.seed);
        try {
          codes[j] = run(local);
        } catch (const std::exception& e) {
          std::cerr << "[seed " << local.seed << "] " << e.what() << '\n';
          codes[j] = 1;
        }
      });
    }
    for (auto& w : workers) w.join();
    return *std::max_element(codes.begin(), codes.end());
  } catch (const HelpRequested&) {
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ofw::cli
