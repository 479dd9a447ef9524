// svi: benchmark harness and single-run driver for the stochastic VI solvers.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>

#include "svi/bench.hpp"
#include "svi/checks.hpp"
#include "svi/errors.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

nlohmann::json report_json(const svi::RunReport& r, const svi::ProblemInstance& p) {
  nlohmann::json j;
  j["problem"] = p.spec;
  j["algorithm"] = svi::to_string(r.algorithm);
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["diverged"] = r.diverged;
  j["initial_residual"] = r.initial_residual;
  j["final_residual"] = r.final_residual;
  j["residual_estimated"] = r.residual_estimated;
  j["oracle_calls"] = r.oracle_calls;
  j["wall_time_s"] = r.wall_time_s;
  j["lipschitz_L"] = p.lipschitz_L;
  j["lipschitz_estimated"] = p.lipschitz_estimated;
  if (!r.error.empty()) j["error"] = r.error;
  if (p.known_solution) j["final_distance"] = (r.final_x - *p.known_solution).norm();
  if (p.game) {
    const svi::Vector x = p.set.project(r.final_x);
    j["complementarity_1e-2"] = svi::verify_complementarity(*p.game, x, 1e-2);
    try {
      const auto eq = svi::recover_equilibrium(*p.game, x, 1e-3);
      j["equilibrium"] = {{"v", eq.v}, {"u", eq.u}};
    } catch (const svi::DegenerateSolution&) {
      j["equilibrium"] = "artificial (x = 0)";
    }
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic variational inequality solvers: SFBF and SEG"};
  app.require_subcommand(1);

  // bench
  auto* bench = app.add_subcommand("bench", "Run a benchmark experiment from a YAML config");
  std::string config_path;
  int parallelism = 0;
  std::string output_dir;
  std::optional<std::uint64_t> seed_override;
  bench->add_option("config", config_path, "Experiment config (YAML)")->required();
  bench->add_option("--parallelism,-j", parallelism, "Worker threads");
  bench->add_option("--output-dir,-o", output_dir, "Directory for CSV artifacts");
  bench->add_option("--seed", seed_override, "Override base_seed");

  // solve
  auto* solve = app.add_subcommand("solve", "Solve one generated problem and print the run report");
  std::string family = "zero_sum";
  std::int64_t dim = 0, n_I = 0, n_II = 0;
  std::string algorithm = "sfbf";
  std::uint64_t problem_seed = 1, solver_seed = 1;
  double tol = 1e-3, alpha = 0.0, noise = 0.1;
  std::int64_t max_iter = 10000;
  bool override_step = false;
  std::string payoffs, trajectory_path;
  solve->add_option("--family", family, "fractional|zero_sum|symmetric|asymmetric|affine");
  solve->add_option("--dim", dim, "Dimension (fractional, affine) or n_I = n_II (games)");
  solve->add_option("--n-I", n_I, "Player I strategies");
  solve->add_option("--n-II", n_II, "Player II strategies");
  solve->add_option("--algorithm", algorithm, "sfbf|seg");
  solve->add_option("--problem-seed", problem_seed, "Problem generator seed");
  solve->add_option("--seed", solver_seed, "Solver seed");
  solve->add_option("--tol", tol, "Residual tolerance");
  solve->add_option("--max-iter", max_iter, "Iteration cap");
  solve->add_option("--alpha", alpha, "Explicit constant step (default: the family's standard rule)");
  solve->add_option("--noise", noise, "Oracle noise standard deviation");
  solve->add_option("--payoffs", payoffs, "gain|loss (games)");
  solve->add_flag("--override", override_step, "Skip step-size validation");
  solve->add_option("--trajectory", trajectory_path, "Write per-iteration CSV here");

  // check
  auto* check = app.add_subcommand("check", "Run the property suites");
  std::uint64_t check_seed = 20190101;
  check->add_option("--seed", check_seed, "Seed for the random cases");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench) {
      svi::ExperimentConfig cfg;
      try {
        cfg = svi::load_experiment_config(config_path);
        if (parallelism > 0) cfg.parallelism = parallelism;
        if (!output_dir.empty()) cfg.output_dir = output_dir;
        if (seed_override) cfg.base_seed = *seed_override;
        cfg.validate();
      } catch (const svi::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
      }
      const auto result = svi::run_experiment(cfg);
      std::cout << svi::emit_table(result.summary, svi::TableStyle::AlignedText);
      if (!cfg.output_dir.empty()) std::cout << "artifacts written to " << cfg.output_dir << '\n';
      return 0;
    }

    if (*solve) {
      svi::ProblemSpec spec;
      try {
        spec.family = svi::parse_family(family);
      } catch (const svi::InvalidInput& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
      }
      spec.seed = problem_seed;
      spec.noise_sd = noise;
      if (svi::is_game(spec.family)) {
        spec.n_I = n_I > 0 ? n_I : (dim > 0 ? dim : 50);
        spec.n_II = n_II > 0 ? n_II : (dim > 0 ? dim : spec.n_I);
        if (!payoffs.empty()) spec.payoffs = svi::parse_payoffs(payoffs);
      } else {
        spec.dim = dim > 0 ? dim : 50;
      }
      const auto problem = svi::make_problem(spec);
      const auto alg = svi::parse_algorithm(algorithm);

      svi::SolverConfig sc;
      sc.algorithm = alg;
      if (alpha > 0.0) {
        sc.step_policy = svi::StepSizePolicy::constant(alpha);
      } else if (spec.family == svi::Family::Fractional) {
        sc.step_policy = svi::paper_fractional_rule(problem.dim, alg);
        override_step = true;
      } else {
        sc.step_policy = svi::paper_game_rule(problem.lipschitz_L, alg);
      }
      sc.step_override = override_step;
      sc.batch_schedule = svi::BatchSchedule::experiment_rule(problem.dim);
      sc.stop.residual_tol = tol;
      sc.stop.max_iterations = max_iter;
      sc.seed = solver_seed;
      sc.record_trajectory = !trajectory_path.empty();

      svi::RngStream init(spec.seed, 0x1417);
      const auto report = svi::run(problem, sc, svi::default_initial_point(problem, init));
      std::cout << report_json(report, problem).dump(2) << '\n';
      if (!trajectory_path.empty()) {
        std::ofstream out(trajectory_path);
        svi::write_trajectory_csv(out, report);
      }
      return report.converged ? 0 : kExitFailure;
    }

    if (*check) {
      int failures = 0;
      for (const auto& r : svi::checks::all_property_suites(check_seed)) {
        std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << "  " << r.detail << '\n';
        if (!r.passed) ++failures;
      }
      std::cout << failures << " failure(s)\n";
      return failures == 0 ? 0 : kExitFailure;
    }
  } catch (const svi::StepSizeRejected& e) {
    std::cerr << "config error: " << e.what() << " (use --override to run anyway)\n";
    return kExitConfig;
  } catch (const svi::InvalidInput& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const svi::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
