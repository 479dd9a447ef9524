#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "svi/oracle.hpp"
#include "svi/problems.hpp"
#include "svi/schedules.hpp"

namespace svi {

struct StoppingRule {
  double residual_tol = 1e-3;
  double residual_alpha = 1.0;
  std::int64_t max_iterations = 10000;
  /// Evaluate the stopping residual every k iterations.
  std::int64_t check_every = 1;
};

struct SolverConfig {
  Algorithm algorithm = Algorithm::SFBF;
  StepSizePolicy step_policy = StepSizePolicy::constant(0.1);
  BatchSchedule batch_schedule = BatchSchedule::constant(1);
  StoppingRule stop;
  std::uint64_t seed = 0;
  bool record_trajectory = false;
  /// Skip step-size validation against the problem's Lipschitz modulus.
  bool step_override = false;
};

/// Iterate pair after n iterations. X may leave the feasible set under SFBF;
/// Y is always a projection and therefore feasible.
struct SolverState {
  std::int64_t n = 0;
  Vector x;
  Vector y;
};

/// One row per executed iteration, recorded after the update X_n -> X_{n+1}.
struct TrajectoryPoint {
  std::int64_t n = 0;             // index of the new iterate (1-based)
  double residual = 0.0;          // r_{stop alpha}(X_n); NaN when not evaluated
  double step_residual = 0.0;     // r_{alpha_{n-1}}(X_{n-1}), used for Fejer checks
  double distance = 0.0;          // ||X_n - x*||; NaN without a known solution
  double alpha = 0.0;             // step used for this update
  std::int64_t batch = 0;         // batch size used for this update
  std::uint64_t oracle_calls = 0; // cumulative single-sample evaluations
  double wall_time_s = 0.0;       // cumulative solver time
  Vector y;                       // feasible point produced by this update
};

struct RunReport {
  Algorithm algorithm = Algorithm::SFBF;
  std::int64_t iterations = 0;
  double initial_residual = 0.0;
  double initial_distance = 0.0;
  double final_residual = 0.0;
  std::uint64_t oracle_calls = 0;
  double wall_time_s = 0.0;
  bool converged = false;
  bool diverged = false;
  bool residual_estimated = false;
  std::string error;
  std::optional<std::vector<TrajectoryPoint>> trajectory;
  Vector final_x;
  Vector final_y;
};

/// Natural residual r_alpha(x) = ||x - P_X(x - alpha T(x))|| with the
/// closed-form mean operator.
double residual(const ProblemInstance& problem, const Vector& x, double alpha);
/// Same, with T(x) replaced by a mini-batch average of `batch` samples.
double residual_estimate(const ProblemInstance& problem, const Vector& x, double alpha,
                         std::int64_t batch, RngStream& rng);

/// Forward-backward-forward update. Draws the two batches from independent
/// children of rng.
SolverState sfbf_step(const SolverState& state, const ProblemInstance& problem,
                      MiniBatchEstimator& est, double alpha, std::int64_t batch, RngStream& rng);
/// Extragradient update with two projections.
SolverState seg_step(const SolverState& state, const ProblemInstance& problem,
                     MiniBatchEstimator& est, double alpha, std::int64_t batch, RngStream& rng);

RunReport run(const ProblemInstance& problem, const SolverConfig& config, const Vector& x0);

/// Checks ||X_{n+1} - x*||^2 <= ||X_n - x*||^2 - (rho_n / 2) r_{alpha_n}(X_n)^2
/// + slack along a recorded zero-noise trajectory, rho_n = 1 - 2 L^2 alpha_n^2.
bool deterministic_fejer_check(const ProblemInstance& problem, const RunReport& report,
                               double slack = 1e-10);

/// CSV rows: n,residual,distance,alpha,batch,cumulative_oracle_calls
void write_trajectory_csv(std::ostream& os, const RunReport& report);

}  // namespace svi
