#include "svi/checks.hpp"

#include <cmath>
#include <algorithm>
#include <iomanip>
#include <sstream>

#include "svi/errors.hpp"
#include "svi/feasible_sets.hpp"
#include "svi/problems.hpp"
#include "svi/schedules.hpp"
#include "svi/solvers.hpp"

namespace svi::checks {

namespace {

CheckResult make(std::string name, bool ok, std::string detail) {
  return CheckResult{std::move(name), ok, std::move(detail)};
}

std::vector<std::pair<std::string, FeasibleSet>> sample_sets(RngStream& rng, Eigen::Index d) {
  Vector lo = sample_uniform(rng, d, -1.0, 0.0);
  Vector hi = lo + sample_uniform(rng, d, 0.0, 2.0);
  return {{"box", FeasibleSet::box(lo, hi)},
          {"orthant", FeasibleSet::nonnegative_orthant(d)},
          {"whole_space", FeasibleSet::whole_space(d)}};
}

}  // namespace

std::vector<CheckResult> projection_suite(std::uint64_t seed, int cases) {
  std::vector<CheckResult> out;
  RngStream rng(seed, 0x9001);
  const Eigen::Index d = 6;
  for (auto& [name, set] : sample_sets(rng, d)) {
    int idem_fail = 0, nonexp_fail = 0, var_fail = 0, pyth_fail = 0;
    double worst_var = -INFINITY, worst_pyth = -INFINITY;
    for (int k = 0; k < cases; ++k) {
      const Vector x = sample_gaussian(rng, d, 0.0, 3.0);
      const Vector y = sample_gaussian(rng, d, 0.0, 3.0);
      const Vector px = set.project(x);
      if (set.project(px) != px) ++idem_fail;
      if ((px - set.project(y)).norm() > (x - y).norm() + 1e-12) ++nonexp_fail;
      for (int j = 0; j < 100; ++j) {
        const Vector z = set.project(sample_gaussian(rng, d, 0.0, 3.0));
        const double ip = (x - px).dot(z - px);
        worst_var = std::max(worst_var, ip);
        if (ip > 1e-10) ++var_fail;
        const double gap = (px - z).squaredNorm() + (px - x).squaredNorm() - (x - z).squaredNorm();
        worst_pyth = std::max(worst_pyth, gap);
        if (gap > 1e-10) ++pyth_fail;
      }
    }
    auto detail = [&](int fails, const std::string& extra) {
      std::ostringstream os;
      os << fails << " failures over " << cases << " cases" << extra;
      return os.str();
    };
    out.push_back(make("projection/idempotence/" + name, idem_fail == 0, detail(idem_fail, "")));
    out.push_back(make("projection/nonexpansive/" + name, nonexp_fail == 0, detail(nonexp_fail, "")));
    out.push_back(make("projection/variational/" + name, var_fail == 0,
                       detail(var_fail, ", max inner product " + std::to_string(worst_var))));
    out.push_back(make("projection/pythagorean/" + name, pyth_fail == 0,
                       detail(pyth_fail, ", max gap " + std::to_string(worst_pyth))));
  }
  return out;
}

namespace {

std::vector<std::pair<std::string, ProblemInstance>> small_families(std::uint64_t seed) {
  std::vector<std::pair<std::string, ProblemInstance>> v;
  v.emplace_back("fractional", generate_fractional(8, seed));
  v.emplace_back("zero_sum", generate_game(4, 4, GameKind::ZeroSum, seed + 1));
  v.emplace_back("symmetric", generate_game(4, 4, GameKind::Symmetric, seed + 2));
  v.emplace_back("asymmetric", generate_game(3, 5, GameKind::Asymmetric, seed + 3));
  v.emplace_back("affine", affine_test_problem(8, true, seed + 4, 0.5));
  return v;
}

Vector interior_point(const ProblemInstance& p, RngStream& rng) {
  if (p.spec.family == Family::Fractional) {
    const auto& box = std::get<Box>(p.set.variant());
    Vector x(p.dim);
    for (Eigen::Index i = 0; i < p.dim; ++i)
      x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * rng.uniform01();
    return x;
  }
  return p.set.project(sample_uniform(rng, p.dim, 0.0, 1.0));
}

}  // namespace

std::vector<CheckResult> oracle_suite(std::uint64_t seed) {
  std::vector<CheckResult> out;
  RngStream rng(seed, 0x0a11);
  const auto families = small_families(seed);

  // Unbiasedness: ||mean - T(x)|| <= 5 * total_sd / sqrt(N).
  constexpr int kSamples = 100000;
  for (const auto& [name, p] : families) {
    const Vector x = interior_point(p, rng);
    const Vector t = p.oracle->mean_operator(x);
    Vector sum = Vector::Zero(p.dim), sumsq = Vector::Zero(p.dim);
    RngStream draws = rng.child(0xb1a5);
    for (int k = 0; k < kSamples; ++k) {
      const Vector f = p.oracle->sample(x, draws);
      sum += f;
      sumsq += f.cwiseProduct(f);
    }
    const Vector mean = sum / kSamples;
    const Vector var = (sumsq / kSamples - mean.cwiseProduct(mean)).cwiseMax(0.0);
    const double total_sd = std::sqrt(var.sum() * kSamples / (kSamples - 1.0));
    const double err = (mean - t).norm();
    const double bound = 5.0 * total_sd / std::sqrt(static_cast<double>(kSamples));
    std::ostringstream os;
    os << "error " << err << " vs bound " << bound;
    out.push_back(make("oracle/unbiased/" + name, err <= bound, os.str()));
  }

  // MSE scales like 1/m.
  for (const auto& [name, p] : families) {
    const Vector x = interior_point(p, rng);
    MiniBatchEstimator est(p.oracle);
    std::vector<double> scaled;
    for (std::int64_t m : {1, 4, 16, 64}) {
      RngStream s = rng.child(static_cast<std::uint64_t>(m));
      scaled.push_back(empirical_mse(est, x, m, 4000, s) * static_cast<double>(m));
    }
    const double lo = *std::min_element(scaled.begin(), scaled.end());
    const double hi = *std::max_element(scaled.begin(), scaled.end());
    const double mean = (scaled[0] + scaled[1] + scaled[2] + scaled[3]) / 4.0;
    const double spread = (hi - lo) / mean;
    std::ostringstream os;
    os << "MSE*m = {" << scaled[0] << ", " << scaled[1] << ", " << scaled[2] << ", " << scaled[3]
       << "}, relative spread " << spread;
    out.push_back(make("oracle/mse_scaling/" + name, spread <= 0.25, os.str()));
  }

  // Oracle-call ledger.
  for (const auto& [name, p] : families) {
    for (auto alg : {Algorithm::SFBF, Algorithm::SEG}) {
      SolverConfig cfg;
      cfg.algorithm = alg;
      cfg.step_policy = StepSizePolicy::constant(0.5 * step_size_bound(p.lipschitz_L, alg));
      cfg.batch_schedule = BatchSchedule::experiment_rule(2);
      cfg.stop.residual_tol = 1e-12;
      cfg.stop.max_iterations = 25;
      cfg.seed = seed;
      RngStream init = rng.child(0x1417);
      const auto report = run(p, cfg, default_initial_point(p, init));
      std::uint64_t expected = 0;
      for (std::int64_t n = 0; n < report.iterations; ++n)
        expected += 2 * static_cast<std::uint64_t>(batch_size_at(cfg.batch_schedule, n));
      std::ostringstream os;
      os << report.oracle_calls << " calls over " << report.iterations << " iterations, expected "
         << expected;
      out.push_back(make("oracle/call_ledger/" + name + "/" + to_string(alg),
                         report.oracle_calls == expected && report.iterations > 0, os.str()));
    }
  }
  return out;
}

std::vector<CheckResult> dynamics_suite(std::uint64_t seed) {
  std::vector<CheckResult> out;

  // Strongly monotone affine problems, zero noise.
  for (std::int64_t d : {5, 20, 50}) {
    const auto p = affine_test_problem(d, true, seed + static_cast<std::uint64_t>(d), 0.0);
    SolverConfig cfg;
    cfg.algorithm = Algorithm::SFBF;
    cfg.step_policy = StepSizePolicy::constant(0.5 / (std::sqrt(2.0) * p.lipschitz_L));
    cfg.stop.residual_tol = 1e-8;
    cfg.stop.max_iterations = 10000;
    cfg.record_trajectory = true;
    RngStream init(seed, static_cast<std::uint64_t>(d));
    const auto report = run(p, cfg, default_initial_point(p, init));
    std::ostringstream os;
    os << "d=" << d << ": residual " << report.final_residual << " after " << report.iterations
       << " iterations";
    out.push_back(make("dynamics/affine_convergence/d" + std::to_string(d),
                       report.converged && report.final_residual <= 1e-8, os.str()));
    out.push_back(make("dynamics/fejer/affine_strong_d" + std::to_string(d),
                       deterministic_fejer_check(p, report), os.str()));
  }

  // Skew (merely monotone) affine problem and the 1-D problem.
  {
    const auto p = affine_test_problem(12, false, seed + 99, 0.0, AffineSet::WholeSpace);
    SolverConfig cfg;
    cfg.step_policy = StepSizePolicy::constant(0.9 / (std::sqrt(2.0) * p.lipschitz_L));
    cfg.stop.residual_tol = 1e-8;
    cfg.stop.max_iterations = 2000;
    cfg.record_trajectory = true;
    RngStream init(seed, 12);
    const auto report = run(p, cfg, default_initial_point(p, init));
    out.push_back(make("dynamics/fejer/affine_skew_d12", deterministic_fejer_check(p, report),
                       std::to_string(report.iterations) + " iterations"));
  }

  const auto one_d = make_affine_problem(Matrix::Constant(1, 1, 1.0), Vector::Constant(1, 1.0),
                                         FeasibleSet::nonnegative_orthant(1), 0.0);
  {
    MiniBatchEstimator est(one_d.oracle);
    RngStream rng(seed);
    SolverState s0{0, Vector::Zero(1), Vector::Zero(1)};
    const auto s1 = sfbf_step(s0, one_d, est, 0.5, 1, rng);
    std::ostringstream os;
    os << "Y1 = " << s1.y[0] << ", X1 = " << s1.x[0];
    out.push_back(make("dynamics/hand_trace_1d", s1.y[0] == 0.5 && s1.x[0] == 0.25, os.str()));
  }
  {
    SolverConfig cfg;
    cfg.step_policy = StepSizePolicy::constant(0.5);
    cfg.stop.residual_tol = 1e-14;
    cfg.stop.max_iterations = 50;
    cfg.record_trajectory = true;
    const auto report = run(one_d, cfg, Vector::Zero(1));
    out.push_back(make("dynamics/fejer/one_d", deterministic_fejer_check(one_d, report),
                       std::to_string(report.iterations) + " iterations"));
  }
  return out;
}

std::vector<CheckResult> validation_suite() {
  std::vector<CheckResult> out;
  for (double L : {0.5, 1.0, 7.3}) {
    for (auto alg : {Algorithm::SFBF, Algorithm::SEG}) {
      const double k = alg == Algorithm::SFBF ? std::sqrt(2.0) : std::sqrt(6.0);
      const double bound = 1.0 / (k * L);
      const bool at = validate_step_size(StepSizePolicy::constant(bound), L, alg).accepted;
      const bool above = validate_step_size(StepSizePolicy::constant(1.01 * bound), L, alg).accepted;
      const bool below = validate_step_size(StepSizePolicy::constant(0.99 * bound), L, alg).accepted;
      std::ostringstream os;
      os << "L=" << L << ": at bound " << at << ", above " << above << ", below " << below;
      out.push_back(make("validation/bound/" + to_string(alg) + "/L" + std::to_string(L),
                         !at && !above && below, os.str()));
    }
  }
  // SEG admits a step that is too large for nothing: 0.5/L passes SFBF, fails SEG.
  {
    const auto p = StepSizePolicy::constant(0.5);
    const bool sfbf = validate_step_size(p, 1.0, Algorithm::SFBF).accepted;
    const bool seg = validate_step_size(p, 1.0, Algorithm::SEG).accepted;
    out.push_back(make("validation/sfbf_range_wider", sfbf && !seg,
                       "alpha=0.5, L=1: sfbf " + std::to_string(sfbf) + ", seg " + std::to_string(seg)));
  }
  // Rejection is a hard error unless overridden.
  {
    const auto p = make_affine_problem(Matrix::Constant(1, 1, 1.0), Vector::Constant(1, 1.0),
                                       FeasibleSet::nonnegative_orthant(1), 0.0);
    SolverConfig cfg;
    cfg.step_policy = StepSizePolicy::constant(0.8);
    cfg.stop.max_iterations = 5;
    bool threw = false;
    try {
      (void)run(p, cfg, Vector::Zero(1));
    } catch (const StepSizeRejected&) {
      threw = true;
    }
    cfg.step_override = true;
    bool ran = false;
    try {
      ran = run(p, cfg, Vector::Zero(1)).iterations >= 0;
    } catch (const Error&) {
      ran = false;
    }
    out.push_back(make("validation/override", threw && ran,
                       std::string("rejected without override: ") + (threw ? "yes" : "no") +
                           ", runs with override: " + (ran ? "yes" : "no")));
  }
  {
    const auto r = summability_report(BatchSchedule::constant(5), 1000);
    out.push_back(make("validation/summability/constant_divergent", r.divergent,
                       "partial sum " + std::to_string(r.partial_sum)));
  }
  {
    const auto r = summability_report(BatchSchedule::experiment_rule(1), 1000000);
    std::ostringstream os;
    os << std::setprecision(10) << "partial sum " << r.partial_sum << " (bound 2.613)";
    out.push_back(make("validation/summability/experiment_d1", !r.divergent && r.partial_sum <= 2.613,
                       os.str()));
  }
  return out;
}

std::vector<CheckResult> all_property_suites(std::uint64_t seed) {
  std::vector<CheckResult> all;
  for (auto&& suite : {projection_suite(seed), oracle_suite(seed), dynamics_suite(seed),
                       validation_suite()})
    all.insert(all.end(), suite.begin(), suite.end());
  return all;
}

}  // namespace svi::checks
