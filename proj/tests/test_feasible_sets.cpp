#include <doctest.h>

#include "svi/checks.hpp"
#include "svi/errors.hpp"
#include "svi/feasible_sets.hpp"

using namespace svi;

namespace {
Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}
}  // namespace

TEST_CASE("box projection clamps each coordinate") {
  const auto box = FeasibleSet::box(vec({0, 0}), vec({1, 1}));
  CHECK(project(box, vec({2.0, -0.5})) == vec({1.0, 0.0}));
  CHECK(project(box, vec({0.3, 0.7})) == vec({0.3, 0.7}));
  CHECK(box.kind() == "box");
}

TEST_CASE("orthant and whole space") {
  const auto orth = FeasibleSet::nonnegative_orthant(3);
  CHECK(project(orth, vec({-1, 2, -3})) == vec({0, 2, 0}));
  const auto all = FeasibleSet::whole_space(2);
  CHECK(project(all, vec({-7, 4})) == vec({-7, 4}));
}

TEST_CASE("membership with tolerance") {
  const auto orth = FeasibleSet::nonnegative_orthant(2);
  CHECK(contains(orth, vec({0, 1}), 0.0));
  CHECK(contains(orth, vec({-1e-10, 1}), 1e-9));
  CHECK_FALSE(contains(orth, vec({-1e-6, 1}), 1e-9));
  const auto box = FeasibleSet::box(vec({-1}), vec({1}));
  CHECK(contains(box, vec({1.0 + 1e-12}), 1e-9));
  CHECK_FALSE(contains(box, vec({1.5}), 1e-9));
}

TEST_CASE("construction and dimension errors") {
  CHECK_THROWS_AS(FeasibleSet::box(vec({0, 2}), vec({1, 1})), InvalidInput);
  CHECK_THROWS_AS(FeasibleSet::box(vec({0}), vec({1, 1})), InvalidInput);
  CHECK_THROWS_AS(FeasibleSet::nonnegative_orthant(0), InvalidInput);
  const auto orth = FeasibleSet::nonnegative_orthant(3);
  CHECK_THROWS_AS(project(orth, vec({1, 2})), InvalidInput);
  CHECK_THROWS_AS(contains(orth, vec({1}), 0.0), InvalidInput);
}

TEST_CASE("degenerate box projects onto its single point") {
  const auto pt = FeasibleSet::box(vec({2, 3}), vec({2, 3}));
  CHECK(project(pt, vec({-10, 10})) == vec({2, 3}));
}

TEST_CASE("projection properties on random points") {
  for (const auto& r : checks::projection_suite(7, 1000)) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
}
