#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>

namespace svi {

enum class Algorithm { SFBF, SEG };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);

// ---------------------------------------------------------------------------
// Step sizes

struct ConstantStep {
  double alpha;
};

/// alpha_n = values(n), clamped into [lower, upper].
struct BoundedSequenceStep {
  std::function<double(std::int64_t)> values;
  double lower;
  double upper;
};

class StepSizePolicy {
 public:
  using Variant = std::variant<ConstantStep, BoundedSequenceStep>;

  static StepSizePolicy constant(double alpha);
  static StepSizePolicy bounded_sequence(std::function<double(std::int64_t)> values, double lower,
                                         double upper);

  const Variant& variant() const { return policy_; }
  /// sup_n alpha_n.
  double upper() const;
  double lower() const;

 private:
  explicit StepSizePolicy(Variant v) : policy_(std::move(v)) {}
  Variant policy_;
};

double step_size_at(const StepSizePolicy& p, std::int64_t n);

/// Largest admissible constant step for the algorithm: 1/(sqrt(2) L) for
/// SFBF, 1/(sqrt(6) L) for SEG.
double step_size_bound(double lipschitz, Algorithm algorithm = Algorithm::SFBF);

struct StepValidation {
  bool accepted = false;
  double alpha_upper = 0.0;
  double bound = 0.0;
  /// 1 - 2 L^2 alpha_upper^2 for SFBF, 1 - 6 L^2 alpha_upper^2 for SEG.
  double rho_lower = 0.0;
};

StepValidation validate_step_size(const StepSizePolicy& p, double lipschitz,
                                  Algorithm algorithm = Algorithm::SFBF);
/// Throws StepSizeRejected when validation fails.
void require_valid_step_size(const StepSizePolicy& p, double lipschitz, Algorithm algorithm);

/// Constant step 0.99 * bound, the rule used for the matrix-game experiments.
StepSizePolicy paper_game_rule(double lipschitz, Algorithm algorithm);
/// 10/d for SFBF and 10/(sqrt(3) d) for SEG. L is unknown for the
/// fractional family, so runs using this rule need the validation override.
StepSizePolicy paper_fractional_rule(std::int64_t dim, Algorithm algorithm);

// ---------------------------------------------------------------------------
// Batch sizes

/// m = ceil(c (n + n0)^(1+a) ln(n + n0)^(1+b)).
struct PolyLogBatch {
  double c;
  std::int64_t n0;
  double a;
  double b;
};

/// m_{n+1} = max(1, round_half_up((n+1)^1.5 / d)), or the ceiling of the
/// same quotient.
struct ExperimentBatch {
  enum class Rounding { HalfUp, Ceil };
  std::int64_t d;
  Rounding rounding = Rounding::HalfUp;
};

struct ConstantBatch {
  std::int64_t m;
};

class BatchSchedule {
 public:
  using Variant = std::variant<PolyLogBatch, ExperimentBatch, ConstantBatch>;

  static BatchSchedule poly_log(double c, std::int64_t n0, double a, double b);
  static BatchSchedule experiment_rule(
      std::int64_t d, ExperimentBatch::Rounding rounding = ExperimentBatch::Rounding::HalfUp);
  static BatchSchedule constant(std::int64_t m);

  const Variant& variant() const { return schedule_; }
  std::string describe() const;

 private:
  explicit BatchSchedule(Variant v) : schedule_(std::move(v)) {}
  Variant schedule_;
};

/// Batch size used at solver iteration n (n = 0, 1, ...).
std::int64_t batch_size_at(const BatchSchedule& s, std::int64_t n);

struct SummabilityReport {
  double partial_sum = 0.0;  // sum over n < horizon of 1/batch_size_at(n)
  std::int64_t horizon = 0;
  bool divergent = false;
  std::optional<double> tail_bound;  // bound on the remaining sum, when known
};

SummabilityReport summability_report(const BatchSchedule& s, std::int64_t horizon);

}  // namespace svi
