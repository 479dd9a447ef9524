#pragma once

// Property suites shared by `svi check` and the acceptance binary. Each
// suite returns one result per property (and per set variant or problem
// family where that applies).

#include <cstdint>
#include <string>
#include <vector>

namespace svi::checks {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Idempotence, nonexpansiveness, variational characterization and the
/// Pythagorean bound, `cases` random points per set variant.
std::vector<CheckResult> projection_suite(std::uint64_t seed, int cases = 1000);

/// Unbiasedness per problem family, MSE * m invariance over m in
/// {1, 4, 16, 64}, and the oracle-call ledger of solver runs.
std::vector<CheckResult> oracle_suite(std::uint64_t seed);

/// Zero-noise dynamics: affine convergence to 1e-8, Fejer decrease along
/// every trajectory, and the hand-traced one-dimensional step.
std::vector<CheckResult> dynamics_suite(std::uint64_t seed);

/// Step-size bounds for both algorithms, the override path, and batch
/// schedule summability.
std::vector<CheckResult> validation_suite();

std::vector<CheckResult> all_property_suites(std::uint64_t seed);

}  // namespace svi::checks
