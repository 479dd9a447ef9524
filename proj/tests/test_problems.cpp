#include <doctest.h>

#include <cmath>

#include "svi/errors.hpp"
#include "svi/problems.hpp"
#include "svi/solvers.hpp"

using namespace svi;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Fully mixed Nash equilibrium of a 2x2 bimatrix game (A for the row player,
// B for the column player, both maximising) from the indifference conditions.
struct Mixed2x2 {
  Vector p, q;
  double row_value, col_value;
};
Mixed2x2 support_enumeration_2x2(const Matrix& A, const Matrix& B) {
  // Column mix q makes rows indifferent: (A q)_0 = (A q)_1.
  const double q0 = (A(1, 1) - A(0, 1)) / (A(0, 0) - A(0, 1) - A(1, 0) + A(1, 1));
  // Row mix p makes columns indifferent: (B^T p)_0 = (B^T p)_1.
  const double p0 = (B(1, 1) - B(1, 0)) / (B(0, 0) - B(1, 0) - B(0, 1) + B(1, 1));
  Mixed2x2 m;
  m.p = vec({p0, 1 - p0});
  m.q = vec({q0, 1 - q0});
  m.row_value = m.p.dot(A * m.q);
  m.col_value = m.p.dot(B * m.q);
  return m;
}

}  // namespace

TEST_CASE("fractional program on a one-dimensional instance") {
  FractionalProgramData d;
  d.Q = Matrix::Constant(1, 1, 2.0);
  d.c = vec({1});
  d.q = 1;
  d.a = vec({1});
  d.b = 1;
  d.noise_sd = 0.0;
  CHECK(d.numerator(vec({1})) == 3.0);
  CHECK(d.denominator(vec({1})) == 2.0);
  // (Qx + c) h - G a over h^2 = (3*2 - 3)/4
  CHECK(d.gradient(vec({1}))[0] == doctest::Approx(0.75));
  const auto p = make_fractional_problem(d, FeasibleSet::box(vec({0}), vec({10})));
  CHECK(mean_operator_eval(*p.oracle, vec({1}))[0] == doctest::Approx(0.75));
}

TEST_CASE("fractional mean operator matches finite differences of G/h") {
  const auto p = generate_fractional(12, 5, 0.1);
  const auto& f = *p.fractional;
  RngStream rng(8);
  const Vector x = sample_uniform(rng, 12, 1.0, 10.0);
  const Vector g = f.gradient(x);
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < 12; ++i) {
    Vector e = Vector::Zero(12);
    e[i] = h;
    const double fd = (f.numerator(x + e) / f.denominator(x + e) -
                       f.numerator(x - e) / f.denominator(x - e)) / (2 * h);
    CHECK(std::abs(fd - g[i]) <= 1e-5 * std::max(1.0, std::abs(g[i])));
  }
}

TEST_CASE("a single fractional sample is the gradient of the sampled ratio") {
  // For fixed noise (V, c1, q1) the sample equals grad of
  // (x'(Q+V)x/2 + (c+c1)'x + q+q1) / h(x). The noise is rebuilt here from a
  // copy of the stream in the sampler's draw order: V row by row, c1, q1.
  const Eigen::Index d = 6;
  const auto p = generate_fractional(d, 21, 0.3);
  const auto& f = *p.fractional;
  RngStream rng(4);
  const Vector x = sample_uniform(rng, d, 1.0, 10.0);

  RngStream draw(99), replay(99);
  const Vector sample = p.oracle->sample(x, draw);

  Matrix V(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) V(i, j) = 0.3 * replay.normal();
  Vector c1(d);
  for (Eigen::Index i = 0; i < d; ++i) c1[i] = 0.3 * replay.normal();
  const double q1 = 0.3 * replay.normal();

  const Matrix Qs = f.Q + V;
  const Vector cs = f.c + c1;
  auto phi = [&](const Vector& z) {
    return (0.5 * z.dot(Qs * z) + cs.dot(z) + f.q + q1) / f.denominator(z);
  };
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < d; ++i) {
    Vector e = Vector::Zero(d);
    e[i] = h;
    const double fd = (phi(x + e) - phi(x - e)) / (2 * h);
    CHECK(std::abs(fd - sample[i]) <= 1e-5 * std::max(1.0, std::abs(sample[i])));
  }
}

TEST_CASE("fractional generator invariants") {
  const auto p = generate_fractional(30, 17);
  const auto& f = *p.fractional;
  CHECK(p.lipschitz_estimated);
  CHECK(p.lipschitz_L > 0);
  CHECK(f.b == 121.0);
  RngStream rng(3);
  for (int k = 0; k < 200; ++k) {
    const Vector z = sample_gaussian(rng, 30, 0.0, 3.0);
    CHECK(z.dot(f.Q * z) >= z.squaredNorm() * (1 - 1e-12));
    const Vector x = p.set.project(sample_uniform(rng, 30, -5.0, 15.0));
    CHECK(f.denominator(x) > 0);
    CHECK(f.numerator(x) > 0);
  }
  const auto& box = std::get<Box>(p.set.variant());
  CHECK(((box.hi - box.lo).array() - 10.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("zero noise sample equals the mean") {
  const auto p = generate_fractional(5, 2, 0.0);
  RngStream rng(1);
  const Vector x = Vector::Constant(5, 2.0);
  CHECK((p.oracle->sample(x, rng) - p.oracle->mean_operator(x)).norm() == 0.0);
  const auto g = generate_game(3, 4, GameKind::Asymmetric, 2, 0.0);
  CHECK((g.oracle->sample(Vector::Ones(7), rng) - g.oracle->mean_operator(Vector::Ones(7))).norm() ==
        0.0);
}

TEST_CASE("zero-sum construction from the identity") {
  const auto g = make_game_data(Matrix::Identity(2, 2), -Matrix::Identity(2, 2),
                                GameKind::ZeroSum, PayoffOrientation::Gain, 0.1);
  Matrix expected(4, 4);
  expected << 0, 0, -1, 0,
              0, 0, 0, -1,
              1, 0, 0, 0,
              0, 1, 0, 0;
  CHECK(g.M == expected);
  CHECK(g.mean_operator(Vector::Zero(4)) == Vector::Ones(4));
}

TEST_CASE("generated zero-sum games are skew with ||M|| = ||U_I||") {
  RngStream rng(12);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto p = generate_game(7 + s % 3, 5 + s % 4, GameKind::ZeroSum, 100 + s);
    const auto& g = *p.game;
    CHECK((g.M + g.M.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(g.U_I);
    CHECK(p.lipschitz_L == doctest::Approx(svd.singularValues()[0]).epsilon(1e-6));
    for (int k = 0; k < 50; ++k) {
      const Vector x = sample_gaussian(rng, g.dim(), 0.0, 1.0);
      CHECK(std::abs(x.dot(g.M * x)) <= 1e-12 * (1 + x.squaredNorm()));
    }
  }
}

TEST_CASE("symmetric and asymmetric generators") {
  const auto s = generate_game(6, 6, GameKind::Symmetric, 4);
  CHECK(s.game->U_I == s.game->U_I.transpose());
  CHECK(s.game->U_II == s.game->U_I.transpose());
  CHECK(s.game->payoffs == PayoffOrientation::Loss);
  CHECK(s.game->U_I.maxCoeff() < 0);
  CHECK_THROWS_AS(generate_game(3, 4, GameKind::Symmetric, 1), InvalidInput);

  const auto a = generate_game(3, 5, GameKind::Asymmetric, 4, 0.1, PayoffOrientation::Gain);
  CHECK(a.dim == 8);
  CHECK(a.game->U_I.minCoeff() > 0);
  CHECK(a.game->U_I.maxCoeff() < 1);
  CHECK(a.set.kind() == "orthant");
}

TEST_CASE("make_game_data validation") {
  const Matrix u = Matrix::Constant(2, 3, 0.5);
  CHECK_THROWS_AS(make_game_data(u, Matrix::Zero(3, 2), GameKind::Asymmetric,
                                 PayoffOrientation::Gain, 0.1), InvalidInput);
  CHECK_THROWS_AS(make_game_data(u, u, GameKind::ZeroSum, PayoffOrientation::Gain, 0.1),
                  InvalidInput);
  Matrix ns(2, 2);
  ns << 1, 2, 3, 4;
  CHECK_THROWS_AS(make_game_data(ns, ns.transpose(), GameKind::Symmetric,
                                 PayoffOrientation::Gain, 0.1), InvalidInput);
  CHECK_THROWS_AS(make_game_data(u, u, GameKind::Asymmetric, PayoffOrientation::Gain, -1),
                  InvalidInput);
}

TEST_CASE("equilibrium recovery") {
  const auto g = make_game_data(Matrix::Identity(2, 2), Matrix::Ones(2, 2) - Matrix::Identity(2, 2),
                                GameKind::Asymmetric, PayoffOrientation::Gain, 0.1);
  const auto e = recover_equilibrium(g, vec({0.2, 0.3, 0.5, 0.5}));
  CHECK(e.v == doctest::Approx(2.0));
  CHECK(e.p[0] == doctest::Approx(0.4));
  CHECK(e.p[1] == doctest::Approx(0.6));
  CHECK(e.u == doctest::Approx(1.0));
  CHECK_THROWS_AS(recover_equilibrium(g, Vector::Zero(4)), DegenerateSolution);
  CHECK_THROWS_AS(recover_equilibrium(g, Vector::Zero(3)), InvalidInput);

  RngStream rng(6);
  for (int k = 0; k < 100; ++k) {
    const auto r = recover_equilibrium(g, sample_uniform(rng, 4, 0.01, 5.0));
    CHECK(r.p.sum() == doctest::Approx(1.0));
    CHECK(r.q.sum() == doctest::Approx(1.0));
    CHECK(r.p.minCoeff() >= 0);
  }
}

TEST_CASE("complementarity agrees with support enumeration") {
  // Matching pennies with positive payoffs: the row player wants to match,
  // the column player wants to mismatch.
  const Matrix A = Matrix::Identity(2, 2);
  const Matrix B = Matrix::Ones(2, 2) - Matrix::Identity(2, 2);
  const auto g = make_game_data(A, B, GameKind::Asymmetric, PayoffOrientation::Gain, 0.0);
  const auto ne = support_enumeration_2x2(A, B);
  CHECK(ne.p[0] == doctest::Approx(0.5));
  CHECK(ne.q[0] == doctest::Approx(0.5));

  Vector x(4);
  x << ne.p / ne.col_value, ne.q / ne.row_value;
  CHECK(x == vec({1, 1, 1, 1}));
  CHECK(verify_complementarity(g, x, 1e-9));
  const auto e = recover_equilibrium(g, x);
  CHECK((e.p - ne.p).norm() <= 1e-12);
  CHECK((e.q - ne.q).norm() <= 1e-12);

  CHECK_FALSE(verify_complementarity(g, vec({-0.1, 1, 1, 1}), 1e-3));
  CHECK_FALSE(verify_complementarity(g, vec({2, 2, 2, 2}), 1e-3));  // T < 0
  CHECK_FALSE(verify_complementarity(g, vec({0.5, 0.5, 0.5, 0.5}), 1e-3));  // <x,T> > 0
  CHECK(verify_complementarity(g, Vector::Zero(4), 1e-9));  // the artificial solution
}

TEST_CASE("complementarity on random generic 2x2 games") {
  RngStream rng(31);
  int checked = 0;
  for (int k = 0; k < 200 && checked < 30; ++k) {
    const Matrix A = sample_uniform_matrix(rng, 2, 2, 0.1, 1.0);
    const Matrix B = sample_uniform_matrix(rng, 2, 2, 0.1, 1.0);
    const auto ne = support_enumeration_2x2(A, B);
    if (!(ne.p.minCoeff() > 0.01 && ne.q.minCoeff() > 0.01)) continue;
    const auto g = make_game_data(A, B, GameKind::Asymmetric, PayoffOrientation::Gain, 0.0);
    Vector x(4);
    x << ne.p / ne.col_value, ne.q / ne.row_value;
    CHECK(verify_complementarity(g, x, 1e-9));
    ++checked;
  }
  CHECK(checked == 30);
}

TEST_CASE("affine test problems") {
  const auto p = affine_test_problem(10, true, 3);
  REQUIRE(p.known_solution.has_value());
  CHECK(residual(p, *p.known_solution, 1.0) <= 1e-12);
  const auto s = affine_test_problem(10, false, 3, 0.0, AffineSet::WholeSpace);
  CHECK(s.set.kind() == "whole_space");
  CHECK(residual(s, *s.known_solution, 1.0) <= 1e-12);
}

TEST_CASE("problem specs replay exactly") {
  ProblemSpec spec;
  spec.family = Family::Asymmetric;
  spec.n_I = 4;
  spec.n_II = 6;
  spec.seed = 77;
  spec.payoffs = PayoffOrientation::Gain;
  nlohmann::json j = spec;
  const auto back = j.get<ProblemSpec>();
  CHECK(back.family == spec.family);
  CHECK(back.n_II == 6);
  CHECK(back.seed == 77);
  CHECK(back.payoffs == PayoffOrientation::Gain);
  CHECK(back.dim_label() == "4x6");

  const auto a = make_problem(spec), b = make_problem(back);
  CHECK(a.game->M == b.game->M);

  ProblemSpec f;
  f.family = Family::Fractional;
  f.dim = 9;
  f.seed = 5;
  CHECK(make_problem(f).fractional->Q == generate_fractional(9, 5).fractional->Q);
  CHECK(f.dim_label() == "9");
  CHECK_THROWS_AS(parse_family("cubic"), InvalidInput);
}

TEST_CASE("default initial points") {
  RngStream rng(2);
  const auto f = generate_fractional(20, 1);
  const Vector x0 = default_initial_point(f, rng);
  CHECK(x0.minCoeff() >= 1.0);
  CHECK(x0.maxCoeff() <= 10.0);
  const auto g = generate_game(5, 5, GameKind::ZeroSum, 1);
  const Vector y0 = default_initial_point(g, rng);
  CHECK(y0.minCoeff() >= 0.0);
  CHECK(y0.maxCoeff() <= 1.0);
}
