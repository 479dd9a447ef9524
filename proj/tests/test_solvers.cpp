#include <doctest.h>

#include <cmath>
#include <sstream>

#include "svi/errors.hpp"
#include "svi/solvers.hpp"

using namespace svi;

namespace {

Vector scalar(double v) { return Vector::Constant(1, v); }

// T(x) = x - 1 on [0, inf), noiseless.
ProblemInstance shifted_identity(double noise = 0.0) {
  return make_affine_problem(Matrix::Identity(1, 1), scalar(1.0),
                             FeasibleSet::nonnegative_orthant(1), noise);
}

SolverConfig config(Algorithm alg, double alpha, double tol = 1e-6) {
  SolverConfig c;
  c.algorithm = alg;
  c.step_policy = StepSizePolicy::constant(alpha);
  c.stop.residual_tol = tol;
  c.record_trajectory = true;
  return c;
}

}  // namespace

TEST_CASE("residual examples") {
  const auto p = shifted_identity();
  CHECK(residual(p, scalar(1.0), 1.0) == 0.0);
  CHECK(residual(p, scalar(3.0), 1.0) == doctest::Approx(2.0));
  // P(0 - 0.5 * (-1)) = 0.5
  CHECK(residual(p, scalar(0.0), 0.5) == doctest::Approx(0.5));
  CHECK_THROWS_AS(residual(p, scalar(0.0), 0.0), InvalidInput);
  CHECK_THROWS_AS(residual(p, Vector::Zero(2), 1.0), InvalidInput);
}

TEST_CASE("hand-traced first steps") {
  const auto p = shifted_identity();
  MiniBatchEstimator est(p.oracle);
  RngStream rng(1);
  const SolverState s0{0, scalar(0.0), scalar(0.0)};

  // A = -1, Y = 0.5, B = -0.5, X1 = 0.5 + 0.5 * (-1 + 0.5)
  const auto f = sfbf_step(s0, p, est, 0.5, 1, rng);
  CHECK(f.n == 1);
  CHECK(f.y[0] == doctest::Approx(0.5));
  CHECK(f.x[0] == doctest::Approx(0.25));
  CHECK(est.calls() == 2);

  // X1 = P(0 - 0.5 * (-0.5))
  const auto e = seg_step(s0, p, est, 0.5, 3, rng);
  CHECK(e.y[0] == doctest::Approx(0.5));
  CHECK(e.x[0] == doctest::Approx(0.25));
  CHECK(est.calls() == 8);
}

TEST_CASE("solutions are fixed points and T = 0 is stationary") {
  const auto p = affine_test_problem(8, true, 2);
  MiniBatchEstimator est(p.oracle);
  RngStream rng(2);
  const SolverState s{0, *p.known_solution, *p.known_solution};
  CHECK((sfbf_step(s, p, est, 0.1, 4, rng).x - *p.known_solution).norm() <= 1e-12);
  CHECK((seg_step(s, p, est, 0.1, 4, rng).x - *p.known_solution).norm() <= 1e-12);

  const auto zero = make_affine_problem(Matrix::Zero(3, 3), Vector::Zero(3),
                                        FeasibleSet::whole_space(3), 0.0);
  MiniBatchEstimator ez(zero.oracle);
  const Vector x = Vector::LinSpaced(3, -1, 2);
  CHECK(sfbf_step({0, x, x}, zero, ez, 0.3, 1, rng).x == x);
  CHECK(seg_step({0, x, x}, zero, ez, 0.3, 1, rng).x == x);
}

TEST_CASE("one-dimensional run matches an independent scalar recursion") {
  const auto p = shifted_identity();
  const double alpha = 0.5;
  const auto rep = run(p, config(Algorithm::SFBF, alpha), scalar(0.0));
  REQUIRE(rep.converged);
  CHECK(std::abs(rep.final_x[0] - 1.0) <= 1e-6);
  REQUIRE(rep.trajectory.has_value());

  double x = 0.0;
  for (const auto& pt : *rep.trajectory) {
    const double a = x - 1.0;
    const double y = std::max(0.0, x - alpha * a);
    x = y + alpha * (a - (y - 1.0));
    CHECK(pt.y[0] == doctest::Approx(y).epsilon(1e-14));
    CHECK(pt.residual == doctest::Approx(std::abs(x - 1.0)).epsilon(1e-12));
  }
  CHECK(rep.iterations == static_cast<std::int64_t>(rep.trajectory->size()));
}

TEST_CASE("zero iteration budget") {
  const auto p = shifted_identity();
  auto c = config(Algorithm::SFBF, 0.5);
  c.stop.max_iterations = 0;
  const auto rep = run(p, c, scalar(3.0));
  CHECK(rep.iterations == 0);
  CHECK_FALSE(rep.converged);
  CHECK(rep.final_x[0] == 3.0);
  CHECK(rep.oracle_calls == 0);
  CHECK(run(p, c, scalar(1.0)).converged);
}

TEST_CASE("runs are deterministic given the seed") {
  const auto p = generate_fractional(12, 9);
  SolverConfig c;
  c.algorithm = Algorithm::SEG;
  c.step_policy = paper_fractional_rule(12, Algorithm::SEG);
  c.step_override = true;
  c.batch_schedule = BatchSchedule::experiment_rule(12);
  c.stop.max_iterations = 20;
  c.seed = 4242;
  const Vector x0 = Vector::Constant(12, 5.0);
  const auto a = run(p, c, x0), b = run(p, c, x0);
  CHECK(a.iterations == b.iterations);
  CHECK(a.final_x == b.final_x);
  CHECK(a.oracle_calls == b.oracle_calls);
  c.seed = 4243;
  CHECK(run(p, c, x0).final_x != a.final_x);
}

TEST_CASE("oracle cost and feasibility invariants") {
  const auto p = generate_game(5, 7, GameKind::Asymmetric, 3);
  for (auto alg : {Algorithm::SFBF, Algorithm::SEG}) {
    SolverConfig c;
    c.algorithm = alg;
    c.step_policy = paper_game_rule(p.lipschitz_L, alg);
    c.batch_schedule = BatchSchedule::experiment_rule(3);
    c.stop.max_iterations = 60;
    c.stop.residual_tol = 1e-300;
    c.record_trajectory = true;
    const auto rep = run(p, c, Vector::Constant(12, 0.5));
    REQUIRE(rep.trajectory.has_value());
    std::uint64_t prev = 0, total = 0;
    for (const auto& pt : *rep.trajectory) {
      CHECK(pt.oracle_calls - prev == static_cast<std::uint64_t>(2 * pt.batch));
      CHECK(pt.batch == batch_size_at(c.batch_schedule, pt.n - 1));
      prev = pt.oracle_calls;
      total += 2 * pt.batch;
      CHECK(p.set.contains(pt.y, 1e-9));
    }
    CHECK(rep.oracle_calls == total);
    if (alg == Algorithm::SEG) CHECK(p.set.contains(rep.final_x, 1e-9));
  }
}

TEST_CASE("strongly monotone affine problems converge with zero noise") {
  const auto p = affine_test_problem(30, true, 11);
  RngStream rng(5);
  const Vector x0 = default_initial_point(p, rng);
  for (auto alg : {Algorithm::SFBF, Algorithm::SEG}) {
    auto c = config(alg, 0.5 * step_size_bound(p.lipschitz_L, alg), 1e-8);
    c.stop.max_iterations = 100000;
    const auto rep = run(p, c, x0);
    CHECK(rep.converged);
    CHECK((rep.final_x - *p.known_solution).norm() <= 1e-5);
    if (alg == Algorithm::SFBF) CHECK(deterministic_fejer_check(p, rep));
  }
}

TEST_CASE("Fejer check on short and corrupted trajectories") {
  const auto p = shifted_identity();
  auto c = config(Algorithm::SFBF, 0.5, 1e-300);
  c.stop.max_iterations = 50;
  auto rep = run(p, c, scalar(5.0));
  CHECK(deterministic_fejer_check(p, rep));

  auto one = rep;
  one.trajectory->resize(1);
  CHECK(deterministic_fejer_check(p, one));

  auto bad = rep;
  (*bad.trajectory)[10].distance = 10.0;
  CHECK_FALSE(deterministic_fejer_check(p, bad));
}

TEST_CASE("step validation happens before iterating") {
  const auto p = shifted_identity();
  CHECK_THROWS_AS(run(p, config(Algorithm::SFBF, 0.8), scalar(0.0)), StepSizeRejected);
  CHECK_THROWS_AS(run(p, config(Algorithm::SEG, 0.5), scalar(0.0)), StepSizeRejected);
  auto c = config(Algorithm::SEG, 0.5);
  c.step_override = true;
  CHECK(run(p, c, scalar(0.0)).converged);
  CHECK_THROWS_AS(run(p, config(Algorithm::SFBF, 0.5), Vector::Zero(2)), InvalidInput);
}

TEST_CASE("divergence is reported, not thrown") {
  // T(x) = -x is anti-monotone; the iterates blow up.
  const auto p = make_affine_problem(-Matrix::Identity(2, 2), Vector::Zero(2),
                                     FeasibleSet::whole_space(2), 0.0);
  auto c = config(Algorithm::SFBF, 0.5);
  c.stop.max_iterations = 100000;
  const auto rep = run(p, c, Vector::Ones(2));
  CHECK(rep.diverged);
  CHECK_FALSE(rep.converged);
  CHECK(rep.iterations < 100000);
}

TEST_CASE("stopping falls back to an estimated residual without a mean operator") {
  auto oracle = std::make_shared<const StochasticOracle>(
      1, [](const Vector& x, RngStream& rng) {
        return (x.array() - 1.0 + 0.01 * rng.normal()).matrix().eval();
      });
  ProblemInstance p;
  p.dim = 1;
  p.set = FeasibleSet::nonnegative_orthant(1);
  p.oracle = oracle;
  p.lipschitz_L = 1.0;
  CHECK_THROWS_AS(residual(p, scalar(0.0), 1.0), Unsupported);
  auto c = config(Algorithm::SFBF, 0.5, 1e-2);
  c.batch_schedule = BatchSchedule::constant(10);
  const auto rep = run(p, c, scalar(4.0));
  CHECK(rep.residual_estimated);
  CHECK(rep.converged);
  CHECK(std::abs(rep.final_x[0] - 1.0) <= 0.05);
}

TEST_CASE("trajectory csv") {
  const auto p = shifted_identity();
  auto c = config(Algorithm::SFBF, 0.5, 1e-300);
  c.stop.max_iterations = 5;
  const auto rep = run(p, c, scalar(2.0));
  std::ostringstream os;
  write_trajectory_csv(os, rep);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,residual,distance,alpha,batch,cumulative_oracle_calls");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);

  SolverConfig no_traj = c;
  no_traj.record_trajectory = false;
  std::ostringstream empty;
  CHECK_THROWS_AS(write_trajectory_csv(empty, run(p, no_traj, scalar(2.0))), Unsupported);
}
