#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "svi/bench.hpp"
#include "svi/checks.hpp"
#include "svi/errors.hpp"
#include "svi/problems.hpp"
#include "svi/solvers.hpp"

namespace py = pybind11;
using namespace svi;

namespace {

py::dict report_dict(const RunReport& r) {
  py::dict d;
  d["algorithm"] = to_string(r.algorithm);
  d["iterations"] = r.iterations;
  d["initial_residual"] = r.initial_residual;
  d["final_residual"] = r.final_residual;
  d["oracle_calls"] = r.oracle_calls;
  d["wall_time_s"] = r.wall_time_s;
  d["converged"] = r.converged;
  d["diverged"] = r.diverged;
  d["residual_estimated"] = r.residual_estimated;
  d["error"] = r.error;
  d["final_x"] = r.final_x;
  d["final_y"] = r.final_y;
  if (r.trajectory) {
    py::list rows;
    for (const auto& p : *r.trajectory) {
      py::dict row;
      row["n"] = p.n;
      row["residual"] = p.residual;
      row["distance"] = p.distance;
      row["alpha"] = p.alpha;
      row["batch"] = p.batch;
      row["oracle_calls"] = p.oracle_calls;
      rows.append(row);
    }
    d["trajectory"] = rows;
  }
  return d;
}

ExperimentConfig load_config(const std::string& source) {
  // A string containing a newline or a colon is taken as YAML text.
  if (source.find('\n') != std::string::npos || source.find(':') != std::string::npos)
    return parse_experiment_config(source);
  return load_experiment_config(source);
}

}  // namespace

PYBIND11_MODULE(_svi, m) {
  m.doc() = "Stochastic variational inequality solvers (SFBF, SEG) with mini-batch oracles";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<Unsupported>(m, "Unsupported", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<DegenerateSolution>(m, "DegenerateSolution", base.ptr());
  py::register_exception<StepSizeRejected>(m, "StepSizeRejected", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("spectral_norm", [](const Matrix& a, double tol) { return spectral_norm(a, tol).value; },
        py::arg("matrix"), py::arg("tol") = 1e-8);

  py::class_<FeasibleSet>(m, "FeasibleSet")
      .def_static("box", &FeasibleSet::box, py::arg("lo"), py::arg("hi"))
      .def_static("nonnegative_orthant", &FeasibleSet::nonnegative_orthant, py::arg("dim"))
      .def_static("whole_space", &FeasibleSet::whole_space, py::arg("dim"))
      .def_property_readonly("dim", &FeasibleSet::dim)
      .def_property_readonly("kind", &FeasibleSet::kind)
      .def("project", &FeasibleSet::project, py::arg("x"))
      .def("contains", &FeasibleSet::contains, py::arg("x"), py::arg("tol") = 0.0);

  py::class_<ProblemInstance>(m, "Problem")
      .def_readonly("dim", &ProblemInstance::dim)
      .def_readonly("set", &ProblemInstance::set)
      .def_readonly("lipschitz", &ProblemInstance::lipschitz_L)
      .def_readonly("lipschitz_estimated", &ProblemInstance::lipschitz_estimated)
      .def_readonly("known_solution", &ProblemInstance::known_solution)
      .def_property_readonly("family", [](const ProblemInstance& p) { return to_string(p.spec.family); })
      .def("mean_operator", [](const ProblemInstance& p, const Vector& x) {
        return p.oracle->mean_operator(x);
      }, py::arg("x"))
      .def("sample", [](const ProblemInstance& p, const Vector& x, std::uint64_t seed) {
        RngStream rng(seed);
        return p.oracle->sample(x, rng);
      }, py::arg("x"), py::arg("seed") = 0)
      .def("initial_point", [](const ProblemInstance& p, std::uint64_t seed) {
        RngStream rng(seed);
        return default_initial_point(p, rng);
      }, py::arg("seed") = 0)
      .def_property_readonly("payoffs", [](const ProblemInstance& p) -> py::object {
        if (!p.game) return py::none();
        return py::make_tuple(p.game->U_I, p.game->U_II);
      });

  m.def("fractional_problem", &generate_fractional, py::arg("dim"), py::arg("seed"),
        py::arg("noise_sd") = 0.1);
  m.def("game_problem",
        [](std::int64_t n_I, std::int64_t n_II, const std::string& kind, std::uint64_t seed,
           double noise_sd, std::optional<std::string> payoffs) {
          std::optional<PayoffOrientation> orient;
          if (payoffs) orient = parse_payoffs(*payoffs);
          const auto fam = parse_family(kind);
          if (!is_game(fam)) throw InvalidInput("game_problem: kind must be a game family");
          const GameKind k = fam == Family::ZeroSum     ? GameKind::ZeroSum
                             : fam == Family::Symmetric ? GameKind::Symmetric
                                                        : GameKind::Asymmetric;
          return generate_game(n_I, n_II, k, seed, noise_sd, orient);
        },
        py::arg("n_I"), py::arg("n_II"), py::arg("kind"), py::arg("seed"),
        py::arg("noise_sd") = 0.1, py::arg("payoffs") = py::none());
  py::enum_<AffineSet>(m, "AffineSet")
      .value("BOX", AffineSet::Box)
      .value("WHOLE_SPACE", AffineSet::WholeSpace);
  m.def("affine_problem", &affine_test_problem, py::arg("dim"), py::arg("strong"), py::arg("seed"),
        py::arg("noise_sd") = 0.0, py::arg("set") = AffineSet::Box);

  m.def("residual", &residual, py::arg("problem"), py::arg("x"), py::arg("alpha") = 1.0);

  m.def("step_size_bound",
        [](double L, const std::string& alg) { return step_size_bound(L, parse_algorithm(alg)); },
        py::arg("lipschitz"), py::arg("algorithm") = "sfbf");
  m.def("batch_size", [](std::int64_t d, std::int64_t n) {
    return batch_size_at(BatchSchedule::experiment_rule(d), n);
  }, py::arg("d"), py::arg("n"));

  m.def("solve",
        [](const ProblemInstance& p, const std::string& algorithm, std::optional<double> alpha,
           std::optional<std::int64_t> batch, double tol, std::int64_t max_iterations,
           std::uint64_t seed, bool override_step, std::optional<Vector> x0, bool trajectory) {
          const Algorithm alg = parse_algorithm(algorithm);
          SolverConfig c;
          c.algorithm = alg;
          if (alpha) {
            c.step_policy = StepSizePolicy::constant(*alpha);
          } else if (p.fractional) {
            c.step_policy = paper_fractional_rule(p.dim, alg);
            override_step = true;
          } else {
            c.step_policy = paper_game_rule(p.lipschitz_L, alg);
          }
          c.batch_schedule = batch ? BatchSchedule::constant(*batch)
                                   : BatchSchedule::experiment_rule(p.dim);
          c.stop.residual_tol = tol;
          c.stop.max_iterations = max_iterations;
          c.seed = seed;
          c.step_override = override_step;
          c.record_trajectory = trajectory;
          Vector start;
          if (x0) {
            start = *x0;
          } else {
            RngStream rng(seed, 0x1417);
            start = default_initial_point(p, rng);
          }
          RunReport r;
          {
            py::gil_scoped_release release;
            r = run(p, c, start);
          }
          return report_dict(r);
        },
        py::arg("problem"), py::arg("algorithm") = "sfbf", py::arg("alpha") = py::none(),
        py::arg("batch") = py::none(), py::arg("tol") = 1e-3, py::arg("max_iterations") = 10000,
        py::arg("seed") = 0, py::arg("override") = false, py::arg("x0") = py::none(),
        py::arg("trajectory") = false);

  m.def("recover_equilibrium",
        [](const ProblemInstance& p, const Vector& x, double tol) {
          if (!p.game) throw InvalidInput("recover_equilibrium: not a game problem");
          const auto e = recover_equilibrium(*p.game, x, tol);
          return py::make_tuple(e.p, e.q, e.v, e.u);
        },
        py::arg("problem"), py::arg("x"), py::arg("tol") = 1e-3);
  m.def("verify_complementarity",
        [](const ProblemInstance& p, const Vector& x, double tol) {
          if (!p.game) throw InvalidInput("verify_complementarity: not a game problem");
          return verify_complementarity(*p.game, x, tol);
        },
        py::arg("problem"), py::arg("x"), py::arg("tol") = 1e-3);

  m.def("run_experiment",
        [](const std::string& config, std::optional<int> parallelism) {
          auto c = load_config(config);
          if (parallelism) c.parallelism = *parallelism;
          ExperimentResult r;
          {
            py::gil_scoped_release release;
            r = run_experiment(c);
          }
          py::list runs;
          for (const auto& rec : r.runs) {
            py::dict d = report_dict(rec.report);
            d["run_id"] = rec.run_id();
            d["dim"] = rec.spec.dim_label();
            d["replication"] = rec.replication;
            d["problem_seed"] = rec.spec.seed;
            runs.append(d);
          }
          py::dict out;
          out["runs"] = runs;
          out["summary_csv"] = emit_table(r.summary, TableStyle::Csv);
          out["table"] = emit_table(r.summary, TableStyle::AlignedText);
          return out;
        },
        py::arg("config"), py::arg("parallelism") = py::none(),
        "Run a benchmark from a YAML path or YAML text.");

  m.def("check", [](std::uint64_t seed) {
    py::list out;
    for (const auto& r : checks::all_property_suites(seed))
      out.append(py::make_tuple(r.name, r.passed, r.detail));
    return out;
  }, py::arg("seed") = 20190101);
}
