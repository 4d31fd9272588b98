#include "twoboard/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "twoboard/diagnostics.hpp"
#include "twoboard/io.hpp"
#include "twoboard/pde_reference.hpp"

namespace twoboard {

using nlohmann::json;
namespace fs = std::filesystem;

bool RunResult::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

namespace {

constexpr const char* kVersion = "tugwar 1.0.0";

struct Context {
  const ExperimentConfig& config;
  const RunOptions& options;
  fs::path out;
  std::vector<Check> checks;
  std::vector<std::uint64_t> seeds;

  std::uint64_t seed() const { return options.seed.value_or(config.simulation.seed); }

  void check(std::string name, bool passed, double value, double tolerance) {
    checks.push_back({std::move(name), passed, value, tolerance});
  }
  void write(const std::string& file, const std::string& text) const { write_text_file(out / file, text); }
};

std::string to_csv(const Lattice& lattice, const ValuePair& values) {
  std::ostringstream ss;
  write_values_csv(lattice, values, ss);
  return ss.str();
}

json report_json(const SolveReport& r) {
  return {{"iterations", r.iterations},
          {"final_residual", r.final_residual},
          {"contraction_estimate", r.contraction_estimate},
          {"converged", r.converged}};
}

Point to_point(const std::vector<double>& v) {
  Point p(static_cast<int>(v.size()));
  for (int i = 0; i < p.dim(); ++i) p[i] = v[i];
  return p;
}

SolveOptions solver_options(const Context& ctx) {
  SolveOptions o = ctx.config.solver;
  o.threads = std::max(o.threads, ctx.options.threads);
  return o;
}

void run_solve(Context& ctx) {
  const auto& c = ctx.config;
  const Lattice lattice = build_lattice(c.domain, c.payoff, c.grid.spacing(), c.grid.epsilon);
  const SolveOptions opts = solver_options(ctx);
  const BothSeeds both = solve_both_seeds(lattice, c.dpp, opts);

  ctx.write("values.csv", to_csv(lattice, both.lower));
  {
    std::ostringstream ss;
    write_lattice_csv(lattice, ss);
    ctx.write("lattice.csv", ss.str());
  }
  json report{{"epsilon", lattice.epsilon()},
              {"h", lattice.h()},
              {"nodes", lattice.size()},
              {"interior_nodes", lattice.interior_nodes().size()},
              {"tol", opts.tol},
              {"lower", report_json(both.lower_report)},
              {"upper", report_json(both.upper_report)},
              {"iterations", both.lower_report.iterations},
              {"final_residual", both.lower_report.final_residual},
              {"gap_up_down", both.gap}};
  ctx.write("report.json", report.dump(2) + "\n");

  ctx.check("lower_converged", both.lower_report.converged, static_cast<double>(both.lower_report.iterations), 0.0);
  ctx.check("upper_converged", both.upper_report.converged, static_cast<double>(both.upper_report.iterations), 0.0);
  const double res = std::max(both.lower_report.final_residual, both.upper_report.final_residual);
  ctx.check("final_residual", res < opts.tol, res, opts.tol);
  ctx.check("uniqueness_gap", both.gap <= 10.0 * opts.tol, both.gap, 10.0 * opts.tol);
}

void run_simulate(Context& ctx) {
  const auto& c = ctx.config;
  const auto& sim = c.simulation;
  if (sim.x0.empty()) throw ConfigError{"config field '/simulation': required for simulate"};
  const bool greedy = sim.s1.name.rfind("greedy", 0) == 0 || sim.s2.name.rfind("greedy", 0) == 0;
  std::shared_ptr<const Lattice> lattice;
  std::shared_ptr<const ValuePair> values;
  if (greedy) {
    lattice = std::make_shared<const Lattice>(build_lattice(c.domain, c.payoff, c.grid.spacing(), c.grid.epsilon));
    auto [sol, rep] = solve_fixed_point(*lattice, c.dpp, Seed::lower(), solver_options(ctx));
    ctx.check("dpp_converged", rep.converged, static_cast<double>(rep.iterations), 0.0);
    values = std::make_shared<const ValuePair>(std::move(sol));
  }
  const Strategy s1 = make_strategy(sim.s1, lattice, values);
  const Strategy s2 = make_strategy(sim.s2, lattice, values);
  const GameSetup setup{c.domain, c.payoff, c.grid.epsilon, sim.mode, sim.cap};
  const Point x0 = to_point(sim.x0);
  const std::uint64_t seed = ctx.seed();
  ctx.seeds.push_back(seed);

  const ValueEstimate est = estimate_value(x0, sim.board, s1, s2, sim.episodes, setup, seed, ctx.options.threads);
  json summary{{"mean", est.mean},
               {"std_error", est.std_error},
               {"capped_count", est.capped_count},
               {"mean_tau", est.mean_tau},
               {"episodes", sim.episodes},
               {"seed", seed},
               {"s1", sim.s1.name},
               {"s2", sim.s2.name},
               {"mode", to_string(sim.mode)}};
  const double capped_fraction = static_cast<double>(est.capped_count) / static_cast<double>(sim.episodes);
  ctx.check("capped_fraction", capped_fraction < 1e-3, capped_fraction, 1e-3);
  if (values && sim.s1.name == "greedy_max" && sim.s2.name == "greedy_min") {
    const auto node = lattice->nearest_node(x0);
    if (node) {
      const double target = sim.board == 1 ? values->u[*node] : values->v[*node];
      summary["dpp_value"] = target;
      const double dev = std::abs(est.mean - target);
      ctx.check("value_within_3se", dev <= 3.0 * est.std_error, dev, 3.0 * est.std_error);
    }
  }
  ctx.write("summary.json", summary.dump(2) + "\n");

  if (sim.trace_episodes > 0) {
    const auto traces = play_episodes(x0, sim.board, s1, s2, sim.trace_episodes, setup, seed, ctx.options.threads);
    std::ostringstream ss;
    write_trace_csv(traces, ss);
    ctx.write("trace.csv", ss.str());
  }
}

bool strictly_decreasing(const std::vector<double>& d) {
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (!(d[i] < d[i - 1])) return false;
  }
  return true;
}

void run_convergence(Context& ctx, const std::string& file) {
  const auto& c = ctx.config;
  ConvergenceInput in{c.domain, c.payoff, c.grid.epsilon_list, c.grid.h_ratio, c.dpp, solver_options(ctx),
                      c.verify.reference_mesh};
  in.options.threads = ctx.options.threads;
  const auto rows = convergence_study(in);
  std::ostringstream ss;
  write_convergence_csv(rows, ss);
  ctx.write(file, ss.str());
  std::vector<double> d;
  for (const auto& r : rows) {
    if (!std::isnan(r.distance)) d.push_back(r.distance);
  }
  ctx.check("convergence_decreasing", strictly_decreasing(d), d.empty() ? 0.0 : d.back(), 0.0);
}

void suite_kappa(Context& ctx) {
  const auto& v = ctx.config.verify;
  std::string csv = "N,exact,mc_estimate,abs_diff\n";
  bool closed_form = true;
  for (int n = 1; n <= 10; ++n) closed_form = closed_form && kappa(n) * (n + 2) == 1.0;
  ctx.check("kappa_closed_form", closed_form, 0.0, 0.0);
  const std::uint64_t seed = ctx.seed();
  ctx.seeds.push_back(seed);
  for (int n = 1; n <= 3; ++n) {
    const double mc = kappa_monte_carlo(n, v.mc_samples, seed + static_cast<std::uint64_t>(n));
    const double diff = std::abs(mc - kappa(n));
    csv += fmt::format("{},{},{},{}\n", n, format_double(kappa(n)), format_double(mc), format_double(diff));
    ctx.check(fmt::format("kappa_mc_N{}", n), diff < v.kappa_tolerance, diff, v.kappa_tolerance);
  }
  ctx.write("kappa.csv", csv);
}

void suite_consistency(Context& ctx) {
  const auto& c = ctx.config;
  const int dim = c.domain.dim();
  std::vector<double> probe = c.verify.probe;
  if (probe.empty()) {
    probe.assign(static_cast<std::size_t>(dim), 0.0);
    probe[0] = 0.5;
  }
  std::vector<std::vector<double>> eye(static_cast<std::size_t>(dim), std::vector<double>(dim, 0.0));
  std::vector<std::vector<double>> aniso = eye;
  for (int i = 0; i < dim; ++i) {
    eye[i][i] = 1.0;
    aniso[i][i] = 1.0 + 2.0 * i;
  }
  const std::vector<double> zero(static_cast<std::size_t>(dim), 0.0);
  const auto phi = TestFunction::quadratic(eye, zero, 0.0);
  const auto psi = TestFunction::quadratic(aniso, zero, 0.0);
  std::string csv = "epsilon,h,r1,r2\n";
  std::vector<double> r1, r2;
  for (double eps : c.grid.epsilon_list) {
    const Lattice lat = build_lattice(c.domain, c.payoff, c.grid.h_ratio * eps, eps);
    const auto r = consistency_residual(phi, psi, to_point(probe), lat);
    r1.push_back(r.r1);
    r2.push_back(r.r2);
    csv += fmt::format("{},{},{},{}\n", format_double(eps), format_double(lat.h()), format_double(r.r1),
                       format_double(r.r2));
  }
  ctx.write("consistency.csv", csv);
  auto worst_ratio = [](const std::vector<double>& r) {
    double w = 0.0;
    for (std::size_t i = 1; i < r.size(); ++i) w = std::max(w, r[i - 1] > 0.0 ? r[i] / r[i - 1] : INFINITY);
    return w;
  };
  const double w1 = worst_ratio(r1), w2 = worst_ratio(r2);
  ctx.check("consistency_r1_ratio", w1 <= c.verify.ratio_bound, w1, c.verify.ratio_bound);
  ctx.check("consistency_r2_ratio", w2 <= c.verify.ratio_bound, w2, c.verify.ratio_bound);
}

void suite_reference(Context& ctx) {
  const auto& v = ctx.config.verify;
  const double tol = v.reference_tolerance;
  const std::size_t mesh = v.reference_mesh;

  const auto cst = solve_reference_1d({0.7, 0.7}, {0.7, 0.7}, mesh);
  double dc = 0.0;
  for (std::size_t i = 0; i < cst.grid.size(); ++i) dc = std::max({dc, std::abs(cst.u[i] - 0.7), std::abs(cst.v[i] - 0.7)});
  ctx.check("reference_constants", dc <= tol, dc, tol);

  const auto aff = solve_reference_1d({0.0, 1.0}, {0.0, 1.0}, mesh);
  double da = 0.0;
  for (std::size_t i = 0; i < aff.grid.size(); ++i) {
    da = std::max({da, std::abs(aff.u[i] - aff.grid[i]), std::abs(aff.v[i] - aff.grid[i])});
  }
  ctx.check("reference_affine", da <= tol, da, tol);

  const auto sol = solve_reference_1d({0.0, 1.0}, {0.0, 0.0}, mesh);
  ctx.check("reference_residual", sol.residual <= tol, sol.residual, tol);
  bool bounded = true;
  for (std::size_t i = 0; i < sol.grid.size(); ++i) {
    bounded = bounded && sol.u[i] >= 0.0 && sol.u[i] <= 1.0 && sol.v[i] >= 0.0 && sol.v[i] <= 1.0;
  }
  ctx.check("reference_maximum_principle", bounded, 0.0, 0.0);
  std::string csv = "x,u,v\n";
  for (std::size_t i = 0; i < sol.grid.size(); ++i) {
    csv += fmt::format("{},{},{}\n", format_double(sol.grid[i]), format_double(sol.u[i]), format_double(sol.v[i]));
  }
  ctx.write("reference.csv", csv);
}

void run_verify(Context& ctx) {
  const auto& suites = ctx.options.suites.empty() ? ctx.config.verify.suites : ctx.options.suites;
  for (const auto& s : suites) {
    if (s == "kappa") {
      suite_kappa(ctx);
    } else if (s == "consistency") {
      suite_consistency(ctx);
    } else if (s == "reference") {
      suite_reference(ctx);
    } else if (s == "convergence") {
      run_convergence(ctx, "convergence.csv");
    } else {
      throw ConfigError{"unknown verify suite '" + s + "'"};
    }
  }
}

void run_n_system(Context& ctx) {
  const auto& c = ctx.config;
  if (c.n_system.empty()) throw ConfigError{"config field '/n_system': required for n-system"};
  const Lattice lattice = build_lattice(c.domain, c.payoff, c.grid.spacing(), c.grid.epsilon);
  const SolveOptions opts = solver_options(ctx);
  const auto lower = solve_n_system(lattice, c.n_system, Seed::Kind::Lower, opts);
  const auto upper = solve_n_system(lattice, c.n_system, Seed::Kind::Upper, opts);
  double gap = 0.0;
  for (std::size_t i = 0; i < lower.fields.size(); ++i) {
    for (std::size_t n = 0; n < lattice.size(); ++n) gap = std::max(gap, std::abs(lower.fields[i][n] - upper.fields[i][n]));
  }
  std::ostringstream ss;
  write_fields_csv(lattice, lower.fields, ss);
  ctx.write("nsystem_values.csv", ss.str());
  json report{{"components", c.n_system.size()},
              {"lower", report_json(lower.report)},
              {"upper", report_json(upper.report)},
              {"iterations", lower.report.iterations},
              {"final_residual", lower.report.final_residual},
              {"gap_up_down", gap}};
  ctx.write("report.json", report.dump(2) + "\n");
  ctx.check("lower_converged", lower.report.converged, static_cast<double>(lower.report.iterations), 0.0);
  ctx.check("upper_converged", upper.report.converged, static_cast<double>(upper.report.iterations), 0.0);
  ctx.check("uniqueness_gap", gap <= 10.0 * opts.tol, gap, 10.0 * opts.tol);
}

}  // namespace

RunResult run_command(const std::string& command, const ExperimentConfig& config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  Context ctx{config, options, options.out_dir.empty() ? fs::path{config.output_directory} : fs::path{options.out_dir},
              {}, {}};
  fs::create_directories(ctx.out);
  if (command == "solve") {
    run_solve(ctx);
  } else if (command == "simulate") {
    run_simulate(ctx);
  } else if (command == "converge") {
    run_convergence(ctx, "convergence.csv");
  } else if (command == "verify") {
    run_verify(ctx);
  } else if (command == "n-system") {
    run_n_system(ctx);
  } else {
    throw std::invalid_argument{"unknown command '" + command + "'"};
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RunResult result{ctx.checks, ctx.out.string()};
  json checks = json::array();
  for (const auto& c : ctx.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"tolerance", c.tolerance}});
  }
  const std::string hashed = options.config_text.empty() ? emit_config(config) : options.config_text;
  json manifest{{"command", command},
                {"version", kVersion},
                {"config_sha256", sha256_hex(hashed)},
                {"seeds", ctx.seeds},
                {"threads", options.threads},
                {"wall_time_seconds", wall},
                {"checks", checks},
                {"passed", result.passed()}};
  write_text_file(ctx.out / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Two-board tug-of-war: DPP solver, game simulator and verification suites"};
  app.set_version_flag("--version", kVersion);
  std::string config_path;
  RunOptions options;
  std::uint64_t seed = 0;
  std::vector<std::string> suites;
  app.add_option("--config", config_path, "Experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--out", options.out_dir, "Output directory (overrides the config)");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config)");
  app.add_option("--threads", options.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.require_subcommand(1);
  for (const char* name : {"solve", "simulate", "converge", "n-system"}) {
    app.add_subcommand(name)->fallthrough();
  }
  auto* verify = app.add_subcommand("verify")->fallthrough();
  verify->add_option("--suite", suites, "Suite to run (repeatable); defaults to the config list")
      ->check(CLI::IsMember({"kappa", "consistency", "reference", "convergence"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (*seed_opt) options.seed = seed;
  if (!suites.empty()) options.suites = suites;
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    std::ifstream in(config_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    options.config_text = ss.str();
    const ExperimentConfig config = parse_config(options.config_text);
    const RunResult r = run_command(command, config, options);
    for (const auto& c : r.checks) {
      std::cout << fmt::format("{:<30} {}  value={:.6g} tol={:.6g}\n", c.name, c.passed ? "PASS" : "FAIL", c.value,
                               c.tolerance);
    }
    std::cout << "artifacts: " << r.out_dir << "\n";
    return r.passed() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << command << ": " << e.what() << "\n";
    return 3;
  }
}

}  // namespace twoboard
