// lapmm: build instances, run Laplacian-regularized MM solves and regularization sweeps.
//
//   lapmm solve-portfolio   --config portfolio.json --out run/ [--workers k]
//   lapmm solve-covariance  --config cov.json       --out run/ [--workers k]
//   lapmm reg-path          --config path.json      --out run/ [--workers k]
//   lapmm validate-graph    --graph edges.txt | --matrix dense.txt
//
// Exit status: 0 converged, 2 iteration limit reached, 1 error.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lapmm/covariance.hpp"
#include "lapmm/error.hpp"
#include "lapmm/io.hpp"
#include "lapmm/portfolio.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitError = 1;
constexpr int kExitMaxIter = 2;

// Failure while reading or interpreting the config.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failure while turning a valid config into a problem instance.
struct InstanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  int workers = 0;  // 0: take from config, else 1
  bool timing = true;
  std::string graph_path;
  std::string matrix_path;
};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
}

template <class T>
T field(const json& cfg, const char* key) {
  if (!cfg.contains(key)) throw ConfigError(std::string("config is missing \"") + key + "\"");
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field \"") + key + "\": " + e.what());
  }
}

template <class T>
T field_or(const json& cfg, const char* key, T fallback) {
  return cfg.contains(key) ? field<T>(cfg, key) : fallback;
}

lapmm::SolveOptions solve_options(const json& cfg, const RunConfig& run,
                                  lapmm::SolveOptions defaults) {
  lapmm::SolveOptions opts = defaults;
  opts.eps_abs = field_or(cfg, "eps_abs", opts.eps_abs);
  opts.eps_rel = field_or(cfg, "eps_rel", opts.eps_rel);
  opts.max_iter = field_or(cfg, "max_iter", opts.max_iter);
  opts.workers = run.workers > 0 ? run.workers : field_or(cfg, "workers", 1);
  if (!(opts.eps_abs > 0.0)) throw ConfigError("eps_abs must be positive");
  if (opts.eps_rel < 0.0) throw ConfigError("eps_rel must be nonnegative");
  if (opts.max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (opts.workers < 1) throw ConfigError("workers must be at least 1");
  return opts;
}

fs::path prepare_out(const RunConfig& run) {
  fs::path out(run.out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw ConfigError("cannot create output directory " + out.string());
  return out;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

void write_csv_matrix(std::ostream& out, const lapmm::Matrix& m) {
  for (lapmm::Index r = 0; r < m.rows(); ++r) {
    for (lapmm::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << lapmm::format_double(m(r, c));
    }
    out << '\n';
  }
}

json trace_summary(const lapmm::SolveTrace& trace, double wall_ms) {
  json s;
  s["iterations"] = trace.num_iterations();
  s["final_residual"] = trace.final_residual();
  const auto obj = trace.final_objective();
  s["final_objective"] = obj ? json(*obj) : json(nullptr);
  s["wall_ms"] = wall_ms;
  s["status"] = trace.status == lapmm::SolveStatus::kConverged ? "converged" : "max_iter";
  return s;
}

void write_summary(const fs::path& out, const json& summary) {
  auto f = open_out(out / "summary.json");
  f << summary.dump(2) << '\n';
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

int status_exit(lapmm::SolveStatus status) {
  return status == lapmm::SolveStatus::kConverged ? kExitConverged : kExitMaxIter;
}

int run_portfolio(const RunConfig& run) {
  const json cfg = load_config(run.config_path);
  lapmm::portfolio::GeneratorOptions gen;
  gen.n = field<lapmm::Index>(cfg, "n");
  gen.T = field<lapmm::Index>(cfg, "T");
  gen.factors = field<lapmm::Index>(cfg, "factors");
  gen.seed = field<std::uint64_t>(cfg, "seed");
  gen.gamma = field<double>(cfg, "gamma");
  gen.shorting = field_or(cfg, "shorting", true);
  const double factor = field_or(cfg, "majorizer_factor", lapmm::kDefaultFactor);
  lapmm::SolveOptions defaults;
  defaults.eps_abs = 1e-6;
  const lapmm::SolveOptions opts = solve_options(cfg, run, defaults);
  const fs::path out = prepare_out(run);

  lapmm::portfolio::PortfolioInstance inst;
  lapmm::portfolio::PortfolioLrmp lrmp;
  lapmm::DiagonalMajorizer maj;
  try {
    inst = lapmm::portfolio::generate_instance(gen);
    lrmp = lapmm::portfolio::build_problem(inst);
    maj = lapmm::diagonal_majorizer(lrmp.L, factor);
  } catch (const lapmm::Error& e) {
    throw InstanceError(e.what());
  }

  const auto start = std::chrono::steady_clock::now();
  const lapmm::SolveResult res =
      lapmm::solve(lrmp.L, lrmp.partition, maj, *lrmp.problem, std::nullopt, opts);
  const double wall = elapsed_ms(start);

  auto trace = open_out(out / "trace.csv");
  lapmm::write_trace_csv(trace, res.trace, run.timing);
  auto weights = open_out(out / "weights.csv");
  write_csv_matrix(weights, lapmm::portfolio::weights_matrix(inst, res.x));
  write_summary(out, trace_summary(res.trace, run.timing ? wall : 0.0));
  return status_exit(res.trace.status);
}

lapmm::covariance::CovInstance covariance_instance(const json& cfg) {
  const auto rows = field<lapmm::Index>(cfg, "rows");
  const auto cols = field<lapmm::Index>(cfg, "cols");
  const auto d = field<lapmm::Index>(cfg, "d");
  const auto samples = field<lapmm::Index>(cfg, "samples");
  const auto seed = field<std::uint64_t>(cfg, "seed");
  const double kappa = field_or(cfg, "kappa", lapmm::covariance::kDefaultKappa);
  const double lambda = field_or(cfg, "lambda", lapmm::covariance::kDefaultLambda);
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
  try {
    auto inst = lapmm::covariance::generate_instance(rows, cols, d, samples, seed);
    inst.kappa = kappa;
    inst.lambda = lambda;
    return inst;
  } catch (const lapmm::Error& e) {
    throw InstanceError(e.what());
  }
}

int run_covariance(const RunConfig& run) {
  const json cfg = load_config(run.config_path);
  const auto inst = covariance_instance(cfg);
  const auto opts = solve_options(cfg, run, lapmm::covariance::default_options());
  const fs::path out = prepare_out(run);

  const auto start = std::chrono::steady_clock::now();
  const auto sol = lapmm::covariance::solve_covariance(inst, opts);
  const double wall = elapsed_ms(start);

  auto trace = open_out(out / "trace.csv");
  lapmm::write_trace_csv(trace, sol.trace, run.timing);
  fs::create_directories(out / "theta");
  for (size_t i = 0; i < sol.theta.size(); ++i) {
    auto f = open_out(out / "theta" / ("node_" + std::to_string(i) + ".txt"));
    lapmm::write_matrix(f, sol.theta[i]);
  }
  json summary = trace_summary(sol.trace, run.timing ? wall : 0.0);
  summary["rmse"] = lapmm::covariance::rmse(sol.theta, inst.theta_true);
  write_summary(out, summary);
  return status_exit(sol.trace.status);
}

int run_path(const RunConfig& run) {
  const json cfg = load_config(run.config_path);
  const auto inst = covariance_instance(cfg);
  const auto opts = solve_options(cfg, run, lapmm::covariance::default_options());
  const bool warm = field_or(cfg, "warm_start", true);
  std::vector<double> lambdas;
  if (cfg.contains("lambdas")) {
    lambdas = field<std::vector<double>>(cfg, "lambdas");
  } else {
    const double lo = field_or(cfg, "lambda_min", 1e-5);
    const double hi = field_or(cfg, "lambda_max", 1e4);
    const int count = field_or(cfg, "lambda_count", 20);
    if (!(lo > 0.0) || hi < lo || count < 1) {
      throw ConfigError("lambda grid needs 0 < lambda_min <= lambda_max and lambda_count >= 1");
    }
    lambdas = lapmm::covariance::log_grid(lo, hi, count);
  }
  if (lambdas.empty() || !std::is_sorted(lambdas.begin(), lambdas.end())) {
    throw ConfigError("lambdas must be a nonempty ascending list");
  }
  const fs::path out = prepare_out(run);

  const auto start = std::chrono::steady_clock::now();
  const auto path = lapmm::covariance::regularization_path(inst, lambdas, warm, opts);
  const double wall = elapsed_ms(start);

  auto csv = open_out(out / "path.csv");
  csv << "lambda,iterations,rmse\n";
  int total = 0;
  bool all_converged = true;
  for (const auto& point : path) {
    csv << lapmm::format_double(point.lambda) << ',' << point.iterations << ','
        << lapmm::format_double(point.rmse) << '\n';
    total += point.iterations;
    all_converged = all_converged && point.status == lapmm::SolveStatus::kConverged;
  }
  json summary;
  summary["iterations"] = total;
  summary["warm_start"] = warm;
  summary["points"] = path.size();
  summary["final_residual"] = nullptr;
  summary["final_objective"] = nullptr;
  summary["wall_ms"] = run.timing ? wall : 0.0;
  summary["status"] = all_converged ? "converged" : "max_iter";
  write_summary(out, summary);
  return all_converged ? kExitConverged : kExitMaxIter;
}

int run_validate(const RunConfig& run) {
  if (run.graph_path.empty() == run.matrix_path.empty()) {
    throw ConfigError("validate-graph needs exactly one of --graph or --matrix");
  }
  if (!run.graph_path.empty()) {
    std::ifstream in(run.graph_path);
    if (!in) throw ConfigError("cannot open graph " + run.graph_path);
    const lapmm::GraphFile graph = lapmm::read_graph(in);
    try {
      const auto L = lapmm::laplacian_from_edges(graph.n, graph.edges);
      std::cout << "valid Laplacian: n=" << L.size() << " edges=" << L.edges().size() << '\n';
      return kExitConverged;
    } catch (const lapmm::Error& e) {
      const char* invariant = "edge list";
      switch (e.code()) {
        case lapmm::ErrorCode::kNonpositiveWeight: invariant = "off-diagonal nonpositivity"; break;
        case lapmm::ErrorCode::kDuplicateEdge: invariant = "unique edges"; break;
        case lapmm::ErrorCode::kIndexOutOfRange: invariant = "node index range"; break;
        default: break;
      }
      std::cerr << "invalid Laplacian: violates " << invariant << " (" << e.what() << ")\n";
      return kExitError;
    }
  }
  std::ifstream in(run.matrix_path);
  if (!in) throw ConfigError("cannot open matrix " + run.matrix_path);
  const auto report = lapmm::validate(lapmm::read_matrix(in));
  if (report.valid) {
    std::cout << "valid Laplacian\n";
    return kExitConverged;
  }
  for (const auto& v : report.violations) std::cerr << "invalid Laplacian: " << v << '\n';
  return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed majorization-minimization for Laplacian-regularized problems"};
  app.require_subcommand(1);
  RunConfig run;

  auto add_solve_flags = [&run](CLI::App* sub) {
    sub->add_option("--config", run.config_path, "JSON instance config")->required();
    sub->add_option("--out", run.out_dir, "output directory");
    sub->add_option("--workers", run.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--no-timing", [&run](std::int64_t) { run.timing = false; },
                  "leave timing fields empty/zero so outputs are reproducible");
  };
  add_solve_flags(app.add_subcommand("solve-portfolio", "multi-period portfolio optimization"));
  add_solve_flags(app.add_subcommand("solve-covariance", "Laplacian-regularized covariance"));
  add_solve_flags(app.add_subcommand("reg-path", "covariance regularization path"));
  auto* validate = app.add_subcommand("validate-graph", "check a graph or dense Laplacian file");
  validate->add_option("--graph", run.graph_path, "edge list: \"n m\" then \"i j w\" lines");
  validate->add_option("--matrix", run.matrix_path, "dense matrix: \"rows cols\" then rows");

  CLI11_PARSE(app, argc, argv);
  run.command = app.get_subcommands().front()->get_name();

  try {
    if (run.command == "solve-portfolio") return run_portfolio(run);
    if (run.command == "solve-covariance") return run_covariance(run);
    if (run.command == "reg-path") return run_path(run);
    return run_validate(run);
  } catch (const ConfigError& e) {
    std::cerr << "error[config]: " << e.what() << '\n';
  } catch (const InstanceError& e) {
    std::cerr << "error[instance]: " << e.what() << '\n';
  } catch (const lapmm::Error& e) {
    std::cerr << "error[solver]: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kExitError;
}
