#include <doctest.h>

#include <cmath>
#include <random>

#include "svi/errors.hpp"
#include "svi/schedules.hpp"

using namespace svi;

TEST_CASE("constant step policy") {
  const auto p = StepSizePolicy::constant(0.3);
  CHECK(step_size_at(p, 0) == 0.3);
  CHECK(step_size_at(p, 12345) == 0.3);
  CHECK_THROWS_AS(StepSizePolicy::constant(0.0), InvalidInput);
  CHECK_THROWS_AS(StepSizePolicy::constant(-1.0), InvalidInput);
}

TEST_CASE("bounded sequence is clamped") {
  const auto p = StepSizePolicy::bounded_sequence(
      [](std::int64_t n) { return n % 2 ? 10.0 : 0.0; }, 0.1, 0.5);
  CHECK(step_size_at(p, 0) == 0.1);
  CHECK(step_size_at(p, 1) == 0.5);
  CHECK(p.upper() == 0.5);
  CHECK(p.lower() == 0.1);
}

TEST_CASE("step size bounds and game rule") {
  CHECK(step_size_at(paper_game_rule(1.0, Algorithm::SFBF), 0) == doctest::Approx(0.70004).epsilon(1e-5));
  CHECK(step_size_at(paper_game_rule(1.0, Algorithm::SEG), 0) == doctest::Approx(0.40417).epsilon(1e-5));
  CHECK(step_size_bound(2.0, Algorithm::SFBF) == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))));
  CHECK_THROWS_AS(step_size_bound(0.0), InvalidInput);
}

TEST_CASE("fractional rule") {
  CHECK(step_size_at(paper_fractional_rule(200, Algorithm::SFBF), 0) == doctest::Approx(0.05));
  CHECK(step_size_at(paper_fractional_rule(100, Algorithm::SEG), 0) ==
        doctest::Approx(0.1 / std::sqrt(3.0)));
}

TEST_CASE("step validation examples") {
  auto v = validate_step_size(StepSizePolicy::constant(0.7), 1.0);
  CHECK(v.accepted);
  CHECK(v.rho_lower == doctest::Approx(0.02));

  CHECK_FALSE(validate_step_size(StepSizePolicy::constant(0.8), 1.0).accepted);

  v = validate_step_size(StepSizePolicy::constant(0.1), 1.0);
  CHECK(v.accepted);
  CHECK(v.rho_lower == doctest::Approx(0.98));

  CHECK_THROWS_AS(require_valid_step_size(StepSizePolicy::constant(0.8), 1.0, Algorithm::SFBF),
                  StepSizeRejected);
  // The SFBF range strictly contains the SEG range.
  CHECK(validate_step_size(StepSizePolicy::constant(0.5), 1.0, Algorithm::SFBF).accepted);
  CHECK_FALSE(validate_step_size(StepSizePolicy::constant(0.5), 1.0, Algorithm::SEG).accepted);
}

TEST_CASE("acceptance is equivalent to positive rho") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> L(0.01, 20.0), frac(0.01, 2.0);
  for (int k = 0; k < 2000; ++k) {
    const double lip = L(gen);
    for (auto alg : {Algorithm::SFBF, Algorithm::SEG}) {
      const double alpha = frac(gen) * step_size_bound(lip, alg);
      const auto v = validate_step_size(StepSizePolicy::constant(alpha), lip, alg);
      const double c = alg == Algorithm::SFBF ? 2.0 : 6.0;
      CHECK(v.accepted == (1.0 - c * lip * lip * alpha * alpha > 0.0));
      CHECK(v.accepted == (v.rho_lower > 0.0));
    }
  }
}

TEST_CASE("accepted sequences stay below the bound") {
  const double lip = 3.0;
  const double bound = step_size_bound(lip);
  const auto p = StepSizePolicy::bounded_sequence(
      [](std::int64_t n) { return 1.0 / (1.0 + static_cast<double>(n % 7)); }, 0.01,
      0.9 * bound);
  REQUIRE(validate_step_size(p, lip).accepted);
  for (std::int64_t n = 0; n < 1000; ++n) CHECK(step_size_at(p, n) < bound);
}

TEST_CASE("batch size examples") {
  CHECK(batch_size_at(BatchSchedule::experiment_rule(200), 0) == 1);
  CHECK(batch_size_at(BatchSchedule::experiment_rule(200), 99) == 5);
  CHECK(batch_size_at(BatchSchedule::poly_log(1, 1, 1, -1), 1) == 4);
  CHECK(batch_size_at(BatchSchedule::constant(7), 1000) == 7);
  // 27/6 = 4.5 rounds up.
  CHECK(batch_size_at(BatchSchedule::experiment_rule(6), 8) == 5);
}

TEST_CASE("batch sizes are nondecreasing") {
  for (const auto& s : {BatchSchedule::experiment_rule(50), BatchSchedule::poly_log(0.5, 2, 0.5, 1),
                        BatchSchedule::poly_log(1, 1, 1, -1), BatchSchedule::poly_log(2, 3, 0, 1)}) {
    std::int64_t prev = 0;
    for (std::int64_t n = 0; n < 2000; ++n) {
      const auto m = batch_size_at(s, n);
      CHECK(m >= 1);
      CHECK(m >= prev);
      prev = m;
    }
  }
}

TEST_CASE("invalid batch schedules") {
  CHECK_THROWS_AS(BatchSchedule::poly_log(1, 2, 0, 0), InvalidInput);   // a = 0 needs b > 0
  CHECK_THROWS_AS(BatchSchedule::poly_log(1, 2, 1, -2), InvalidInput);  // b < -1
  CHECK_THROWS_AS(BatchSchedule::poly_log(0, 2, 1, 0), InvalidInput);
  CHECK_THROWS_AS(BatchSchedule::poly_log(1, 1, 1, 0), InvalidInput);   // ln(1) = 0
  CHECK_THROWS_AS(BatchSchedule::experiment_rule(0), InvalidInput);
  CHECK_THROWS_AS(BatchSchedule::constant(0), InvalidInput);
  CHECK_THROWS_AS(batch_size_at(BatchSchedule::constant(1), -1), InvalidInput);
}

TEST_CASE("summability reports") {
  const auto c = summability_report(BatchSchedule::constant(3), 100);
  CHECK(c.divergent);
  CHECK(c.partial_sum == doctest::Approx(100.0 / 3.0));

  const double zeta2 = M_PI * M_PI / 6.0;
  const auto p = summability_report(BatchSchedule::poly_log(1, 1, 1, -1), 10000);
  CHECK_FALSE(p.divergent);
  CHECK(p.partial_sum <= zeta2);
  REQUIRE(p.tail_bound.has_value());
  CHECK(*p.tail_bound >= zeta2 - p.partial_sum);  // the tail bound really bounds the tail
  CHECK(*p.tail_bound <= 1e-3);

  // sum_{k>=1} k^-1.5 = zeta(1.5)
  const auto e = summability_report(BatchSchedule::experiment_rule(1), 10000);
  CHECK_FALSE(e.divergent);
  CHECK(e.partial_sum <= 2.613);
}

TEST_CASE("experiment rule with ceiling rounding") {
  const auto c = BatchSchedule::experiment_rule(200, ExperimentBatch::Rounding::Ceil);
  CHECK(batch_size_at(c, 0) == 1);
  CHECK(batch_size_at(c, 99) == 5);
  CHECK(batch_size_at(c, 100) == 6);  // 101^1.5/200 = 5.07
  CHECK(batch_size_at(BatchSchedule::experiment_rule(200), 100) == 5);
}
