#include "svi/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "svi/errors.hpp"

namespace svi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDivergenceNorm = 1e12;
constexpr std::uint64_t kSolverStream = 0x501e;
constexpr std::uint64_t kSurrogateStream = 0x5a11;

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

void require_finite(const Vector& v, const char* what, std::int64_t n) {
  if (!v.allFinite())
    throw NumericError(std::string(what) + " is non-finite at iteration " + std::to_string(n), n,
                       to_std(v));
}

void check_step_inputs(const SolverState& state, const ProblemInstance& problem, double alpha,
                       std::int64_t batch) {
  if (state.x.size() != problem.dim) throw InvalidInput("solver step: dimension mismatch");
  if (!(alpha > 0.0)) throw InvalidInput("solver step: alpha must be positive");
  if (batch < 1) throw InvalidInput("solver step: batch must be >= 1");
}

}  // namespace

double residual(const ProblemInstance& problem, const Vector& x, double alpha) {
  if (!(alpha > 0.0)) throw InvalidInput("residual: alpha must be positive");
  if (x.size() != problem.dim) throw InvalidInput("residual: dimension mismatch");
  const Vector t = problem.oracle->mean_operator(x);
  return (x - problem.set.project(x - alpha * t)).norm();
}

double residual_estimate(const ProblemInstance& problem, const Vector& x, double alpha,
                         std::int64_t batch, RngStream& rng) {
  if (!(alpha > 0.0)) throw InvalidInput("residual: alpha must be positive");
  MiniBatchEstimator est(problem.oracle);
  const Vector t = est.evaluate_batch(x, batch, rng);
  return (x - problem.set.project(x - alpha * t)).norm();
}

SolverState sfbf_step(const SolverState& state, const ProblemInstance& problem,
                      MiniBatchEstimator& est, double alpha, std::int64_t batch, RngStream& rng) {
  check_step_inputs(state, problem, alpha, batch);
  RngStream first = rng.child(0);
  RngStream second = rng.child(1);

  const Vector a = est.evaluate_batch(state.x, batch, first);
  SolverState next;
  next.n = state.n + 1;
  next.y = problem.set.project(state.x - alpha * a);
  const Vector b = est.evaluate_batch(next.y, batch, second);
  next.x = next.y + alpha * (a - b);
  require_finite(next.y, "Y", next.n);
  require_finite(next.x, "X", next.n);
  return next;
}

SolverState seg_step(const SolverState& state, const ProblemInstance& problem,
                     MiniBatchEstimator& est, double alpha, std::int64_t batch, RngStream& rng) {
  check_step_inputs(state, problem, alpha, batch);
  RngStream first = rng.child(0);
  RngStream second = rng.child(1);

  const Vector a = est.evaluate_batch(state.x, batch, first);
  SolverState next;
  next.n = state.n + 1;
  next.y = problem.set.project(state.x - alpha * a);
  const Vector b = est.evaluate_batch(next.y, batch, second);
  next.x = problem.set.project(state.x - alpha * b);
  require_finite(next.y, "Y", next.n);
  require_finite(next.x, "X", next.n);
  return next;
}

RunReport run(const ProblemInstance& problem, const SolverConfig& config, const Vector& x0) {
  if (x0.size() != problem.dim) throw InvalidInput("run: x0 has the wrong dimension");
  if (!x0.allFinite()) throw InvalidInput("run: x0 must be finite");
  const auto& stop = config.stop;
  if (!(stop.residual_tol > 0.0) || !(stop.residual_alpha > 0.0))
    throw InvalidInput("run: residual tolerance and alpha must be positive");
  if (stop.max_iterations < 0 || stop.check_every < 1)
    throw InvalidInput("run: max_iterations >= 0 and check_every >= 1 required");
  if (!config.step_override)
    require_valid_step_size(config.step_policy, problem.lipschitz_L, config.algorithm);

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  const bool closed_form = problem.oracle->has_mean_operator();
  const RngStream root(config.seed, kSolverStream);
  const RngStream surrogate_root(config.seed, kSurrogateStream);
  MiniBatchEstimator est(problem.oracle);

  RunReport report;
  report.algorithm = config.algorithm;
  report.residual_estimated = !closed_form;

  auto stopping_residual = [&](const Vector& x, std::int64_t n) {
    if (closed_form) return residual(problem, x, stop.residual_alpha);
    const std::int64_t m = batch_size_at(config.batch_schedule, n);
    RngStream rng = surrogate_root.child(static_cast<std::uint64_t>(n));
    return residual_estimate(problem, x, stop.residual_alpha, std::max<std::int64_t>(10000, 100 * m),
                             rng);
  };
  auto distance = [&](const Vector& x) {
    return problem.known_solution ? (x - *problem.known_solution).norm() : kNaN;
  };

  SolverState state{0, x0, problem.set.project(x0)};
  double r = stopping_residual(state.x, 0);
  report.initial_residual = r;
  report.initial_distance = distance(state.x);
  if (config.record_trajectory) report.trajectory.emplace();

  while (true) {
    if (!std::isnan(r) && r <= stop.residual_tol) {
      report.converged = true;
      break;
    }
    if (state.n >= stop.max_iterations) break;

    const double alpha = step_size_at(config.step_policy, state.n);
    const std::int64_t m = batch_size_at(config.batch_schedule, state.n);
    const double step_res =
        config.record_trajectory && closed_form ? residual(problem, state.x, alpha) : kNaN;
    RngStream rng = root.child(static_cast<std::uint64_t>(state.n));
    try {
      state = config.algorithm == Algorithm::SFBF ? sfbf_step(state, problem, est, alpha, m, rng)
                                                  : seg_step(state, problem, est, alpha, m, rng);
    } catch (const NumericError& e) {
      report.diverged = true;
      report.error = e.what();
      r = kNaN;
      break;
    }
    if (state.x.norm() > kDivergenceNorm) {
      report.diverged = true;
      report.error = "iterate norm exceeded 1e12 at iteration " + std::to_string(state.n);
      r = kNaN;
      break;
    }

    const bool check = state.n % stop.check_every == 0 || state.n == stop.max_iterations;
    r = check ? stopping_residual(state.x, state.n) : kNaN;
    if (report.trajectory) {
      TrajectoryPoint pt;
      pt.n = state.n;
      pt.residual = r;
      pt.step_residual = step_res;
      pt.distance = distance(state.x);
      pt.alpha = alpha;
      pt.batch = m;
      pt.oracle_calls = est.calls();
      pt.wall_time_s = elapsed();
      pt.y = state.y;
      report.trajectory->push_back(std::move(pt));
    }
  }

  report.iterations = state.n;
  report.final_residual = r;
  report.oracle_calls = est.calls();
  report.wall_time_s = elapsed();
  report.final_x = std::move(state.x);
  report.final_y = std::move(state.y);
  return report;
}

bool deterministic_fejer_check(const ProblemInstance& problem, const RunReport& report,
                               double slack) {
  if (!problem.known_solution)
    throw Unsupported("deterministic_fejer_check: problem has no known solution");
  if (!report.trajectory) throw Unsupported("deterministic_fejer_check: no trajectory recorded");
  const double L = problem.lipschitz_L;
  double prev = report.initial_distance;
  for (const auto& pt : *report.trajectory) {
    if (std::isnan(pt.step_residual) || std::isnan(pt.distance))
      throw Unsupported("deterministic_fejer_check: trajectory lacks residual or distance");
    const double rho = 1.0 - 2.0 * L * L * pt.alpha * pt.alpha;
    const double rhs = prev * prev - 0.5 * rho * pt.step_residual * pt.step_residual + slack;
    if (pt.distance * pt.distance > rhs) return false;
    prev = pt.distance;
  }
  return true;
}

void write_trajectory_csv(std::ostream& os, const RunReport& report) {
  if (!report.trajectory) throw Unsupported("write_trajectory_csv: no trajectory recorded");
  os << "n,residual,distance,alpha,batch,cumulative_oracle_calls\n";
  std::ostringstream line;
  line << std::setprecision(12);
  for (const auto& pt : *report.trajectory) {
    line.str("");
    line << pt.n << ',' << pt.residual << ',' << pt.distance << ',' << pt.alpha << ',' << pt.batch
         << ',' << pt.oracle_calls << '\n';
    os << line.str();
  }
}

}  // namespace svi
