#include "svi/problems.hpp"

#include <algorithm>
#include <cmath>

#include "svi/errors.hpp"

namespace svi {

namespace {

constexpr std::uint64_t kFractionalStream = 0xf7ac;
constexpr std::uint64_t kGameStream = 0x9a3e;
constexpr std::uint64_t kAffineStream = 0xaff1;
constexpr std::uint64_t kLipschitzStream = 0x11b5;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::Fractional: return "fractional";
    case Family::ZeroSum: return "zero_sum";
    case Family::Symmetric: return "symmetric";
    case Family::Asymmetric: return "asymmetric";
    case Family::Affine: return "affine";
  }
  return "unknown";
}

Family parse_family(const std::string& s) {
  const auto t = lower(s);
  if (t == "fractional") return Family::Fractional;
  if (t == "zero_sum" || t == "zerosum") return Family::ZeroSum;
  if (t == "symmetric") return Family::Symmetric;
  if (t == "asymmetric") return Family::Asymmetric;
  if (t == "affine") return Family::Affine;
  throw InvalidInput("unknown problem family '" + s + "'");
}

bool is_game(Family f) {
  return f == Family::ZeroSum || f == Family::Symmetric || f == Family::Asymmetric;
}

std::string to_string(PayoffOrientation p) { return p == PayoffOrientation::Gain ? "gain" : "loss"; }

PayoffOrientation parse_payoffs(const std::string& s) {
  const auto t = lower(s);
  if (t == "gain") return PayoffOrientation::Gain;
  if (t == "loss") return PayoffOrientation::Loss;
  throw InvalidInput("unknown payoff orientation '" + s + "' (expected gain or loss)");
}

PayoffOrientation default_payoffs(GameKind kind) {
  return kind == GameKind::ZeroSum ? PayoffOrientation::Gain : PayoffOrientation::Loss;
}

namespace {
GameKind kind_of(Family f) {
  switch (f) {
    case Family::ZeroSum: return GameKind::ZeroSum;
    case Family::Symmetric: return GameKind::Symmetric;
    case Family::Asymmetric: return GameKind::Asymmetric;
    default: throw InvalidInput("family " + to_string(f) + " is not a game");
  }
}
}  // namespace

std::string ProblemSpec::dim_label() const {
  if (is_game(family)) return std::to_string(n_I) + "x" + std::to_string(n_II);
  return std::to_string(dim);
}

void to_json(nlohmann::json& j, const ProblemSpec& s) {
  j = nlohmann::json{{"family", to_string(s.family)}, {"seed", s.seed}, {"noise_sd", s.noise_sd}};
  if (is_game(s.family)) {
    j["n_I"] = s.n_I;
    j["n_II"] = s.n_II;
    j["payoffs"] = to_string(s.payoffs.value_or(default_payoffs(kind_of(s.family))));
  } else {
    j["dim"] = s.dim;
  }
  if (s.family == Family::Affine) {
    j["strong"] = s.strong;
    j["set"] = s.affine_set == AffineSet::Box ? "box" : "whole_space";
  }
}

void from_json(const nlohmann::json& j, ProblemSpec& s) {
  s = ProblemSpec{};
  s.family = parse_family(j.at("family").get<std::string>());
  s.seed = j.at("seed").get<std::uint64_t>();
  s.noise_sd = j.value("noise_sd", 0.1);
  if (is_game(s.family)) {
    s.n_I = j.at("n_I").get<std::int64_t>();
    s.n_II = j.at("n_II").get<std::int64_t>();
    if (j.contains("payoffs")) s.payoffs = parse_payoffs(j.at("payoffs").get<std::string>());
  } else {
    s.dim = j.at("dim").get<std::int64_t>();
  }
  if (s.family == Family::Affine) {
    s.strong = j.value("strong", true);
    const auto set = j.value("set", std::string("box"));
    if (set == "box") {
      s.affine_set = AffineSet::Box;
    } else if (set == "whole_space") {
      s.affine_set = AffineSet::WholeSpace;
    } else {
      throw InvalidInput("unknown affine set '" + set + "'");
    }
  }
}

// ---------------------------------------------------------------------------
// Fractional programs

double FractionalProgramData::numerator(const Vector& x) const {
  return 0.5 * x.dot(Q * x) + c.dot(x) + q;
}

double FractionalProgramData::denominator(const Vector& x) const { return a.dot(x) + b; }

Vector FractionalProgramData::gradient(const Vector& x) const {
  const Vector qx = Q * x;
  const double g = 0.5 * x.dot(qx) + c.dot(x) + q;
  const double h = a.dot(x) + b;
  return ((qx + c) * h - g * a) / (h * h);
}

namespace {

// One draw of grad(G(x, xi) / h(x)) with Q(xi) = Q + (V + V^T)/2,
// c(xi) = c + c1, q(xi) = q + q1 and iid N(0, sd^2) entries in V, c1, q1.
Vector fractional_sample(const FractionalProgramData& data, const Vector& x, RngStream& rng) {
  const Eigen::Index d = x.size();
  const double sd = data.noise_sd;
  Vector qx = data.Q * x;
  double xqx = x.dot(qx);
  Vector c = data.c;
  double q = data.q;
  if (sd > 0.0) {
    Vector vx = Vector::Zero(d);
    Vector vtx = Vector::Zero(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double xi = x[i];
      double row = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) {
        const double v = sd * rng.normal();
        row += v * x[j];
        vtx[j] += v * xi;
      }
      vx[i] = row;
    }
    qx += 0.5 * (vx + vtx);
    xqx += x.dot(vx);
    for (Eigen::Index i = 0; i < d; ++i) c[i] += sd * rng.normal();
    q += sd * rng.normal();
  }
  const double g = 0.5 * xqx + c.dot(x) + q;
  const double h = data.denominator(x);
  return ((qx + c) * h - g * data.a) / (h * h);
}

double estimate_lipschitz(const MeanFn& t, const FeasibleSet& set, std::uint64_t seed) {
  RngStream rng(seed, kLipschitzStream);
  const Eigen::Index d = set.dim();
  auto draw = [&]() -> Vector {
    if (const auto* box = std::get_if<Box>(&set.variant())) {
      Vector x(d);
      for (Eigen::Index i = 0; i < d; ++i)
        x[i] = box->lo[i] + (box->hi[i] - box->lo[i]) * rng.uniform01();
      return x;
    }
    return set.project(sample_gaussian(rng, d, 0.0, 1.0));
  };
  double best = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector x = draw();
    const Vector y = draw();
    const double dist = (x - y).norm();
    if (dist > 0.0) best = std::max(best, (t(x) - t(y)).norm() / dist);
  }
  return 1.2 * best;
}

}  // namespace

ProblemInstance make_fractional_problem(FractionalProgramData data, FeasibleSet set,
                                        std::uint64_t lipschitz_seed) {
  const Eigen::Index d = data.Q.rows();
  if (d < 1 || data.Q.cols() != d || data.c.size() != d || data.a.size() != d)
    throw InvalidInput("fractional data: inconsistent dimensions");
  if (set.dim() != d) throw InvalidInput("fractional data: set dimension mismatch");
  if (!(data.noise_sd >= 0.0)) throw InvalidInput("fractional data: noise_sd must be >= 0");

  auto shared = std::make_shared<const FractionalProgramData>(std::move(data));
  MeanFn mean = [shared](const Vector& x) { return shared->gradient(x); };
  SampleFn sampler = [shared](const Vector& x, RngStream& rng) {
    return fractional_sample(*shared, x, rng);
  };

  ProblemInstance p;
  p.dim = d;
  p.set = std::move(set);
  p.oracle = std::make_shared<const StochasticOracle>(d, std::move(sampler), mean);
  p.lipschitz_L = estimate_lipschitz(mean, p.set, lipschitz_seed);
  p.lipschitz_estimated = true;
  p.fractional = shared;
  p.spec.family = Family::Fractional;
  p.spec.dim = d;
  p.spec.seed = lipschitz_seed;
  p.spec.noise_sd = shared->noise_sd;
  return p;
}

ProblemInstance generate_fractional(std::int64_t d, std::uint64_t seed, double noise_sd) {
  if (d < 1) throw InvalidInput("generate_fractional: d must be >= 1");
  RngStream rng(seed, kFractionalStream);
  FractionalProgramData data;
  const Matrix m = sample_uniform_matrix(rng, d, d, 0.0, 1.0);
  data.Q = m.transpose() * m;
  data.Q.diagonal().array() += 1.0;
  data.a = sample_uniform(rng, d, 0.0, 2.0);
  data.c = sample_uniform(rng, d, 0.0, 2.0);
  data.q = 1.0 + rng.uniform01();
  data.b = 1.0 + 4.0 * static_cast<double>(d);
  data.noise_sd = noise_sd;
  Vector lo = sample_uniform(rng, d, 0.0, 1.0);
  Vector hi = lo.array() + 10.0;

  auto p = make_fractional_problem(std::move(data), FeasibleSet::box(std::move(lo), std::move(hi)),
                                   seed);
  p.spec.seed = seed;
  return p;
}

// ---------------------------------------------------------------------------
// Bimatrix games

Vector BimatrixGameData::mean_operator(const Vector& x) const {
  Vector t = M * x;
  t.array() += 1.0;
  return t;
}

BimatrixGameData make_game_data(Matrix U_I, Matrix U_II, GameKind kind,
                                PayoffOrientation payoffs, double noise_sd) {
  const Eigen::Index n1 = U_I.rows();
  const Eigen::Index n2 = U_I.cols();
  if (n1 < 1 || n2 < 1) throw InvalidInput("game: empty payoff matrix");
  if (U_II.rows() != n1 || U_II.cols() != n2)
    throw InvalidInput("game: U_I and U_II must both be n_I x n_II");
  if (!U_I.allFinite() || !U_II.allFinite()) throw InvalidInput("game: non-finite payoffs");
  if (!(noise_sd >= 0.0)) throw InvalidInput("game: noise_sd must be >= 0");
  if (kind == GameKind::ZeroSum && U_II != -U_I)
    throw InvalidInput("zero-sum game requires U_II = -U_I");
  if (kind == GameKind::Symmetric) {
    if (n1 != n2) throw InvalidInput("symmetric game requires n_I = n_II");
    if (U_I != U_I.transpose() || U_II != U_I.transpose())
      throw InvalidInput("symmetric game requires symmetric U_I and U_II = U_I^T");
  }

  BimatrixGameData g;
  g.kind = kind;
  g.payoffs = payoffs;
  g.noise_sd = noise_sd;
  g.M = Matrix::Zero(n1 + n2, n1 + n2);
  g.M.topRightCorner(n1, n2) = -U_I;
  g.M.bottomLeftCorner(n2, n1) = -U_II.transpose();
  g.U_I = std::move(U_I);
  g.U_II = std::move(U_II);
  return g;
}

namespace {

// The trivial point x = 0 is the only solution of the LCP when both blocks of
// M have entries of a single sign that makes T > 0 on the orthant.
bool zero_is_unique_solution(const BimatrixGameData& g) {
  const auto upper = g.M.topRightCorner(g.n_I(), g.n_II());
  const auto lower = g.M.bottomLeftCorner(g.n_II(), g.n_I());
  return (upper.array() > 0.0).all() || (lower.array() > 0.0).all();
}

}  // namespace

ProblemInstance make_game_problem(BimatrixGameData data) {
  auto g = std::make_shared<const BimatrixGameData>(std::move(data));
  const Eigen::Index d = g->dim();
  MeanFn mean = [g](const Vector& x) { return g->mean_operator(x); };
  SampleFn sampler = [g](const Vector& x, RngStream& rng) -> Vector {
    Vector t = g->mean_operator(x);
    const double sd = g->noise_sd;
    if (sd > 0.0) {
      const Eigen::Index n = x.size();
      for (Eigen::Index i = 0; i < n; ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) row += rng.normal() * x[j];
        t[i] += sd * row;
      }
    }
    return t;
  };

  ProblemInstance p;
  p.dim = d;
  p.set = FeasibleSet::nonnegative_orthant(d);
  p.oracle = std::make_shared<const StochasticOracle>(d, std::move(sampler), std::move(mean));
  p.lipschitz_L = lipschitz_bound(g->M);
  if (zero_is_unique_solution(*g)) p.known_solution = Vector::Zero(d);
  p.game = g;
  switch (g->kind) {
    case GameKind::ZeroSum: p.spec.family = Family::ZeroSum; break;
    case GameKind::Symmetric: p.spec.family = Family::Symmetric; break;
    case GameKind::Asymmetric: p.spec.family = Family::Asymmetric; break;
  }
  p.spec.n_I = g->n_I();
  p.spec.n_II = g->n_II();
  p.spec.noise_sd = g->noise_sd;
  p.spec.payoffs = g->payoffs;
  return p;
}

ProblemInstance generate_game(std::int64_t n_I, std::int64_t n_II, GameKind kind,
                              std::uint64_t seed, double noise_sd,
                              std::optional<PayoffOrientation> payoffs) {
  if (n_I < 1 || n_II < 1) throw InvalidInput("generate_game: n_I and n_II must be >= 1");
  if (kind == GameKind::Symmetric && n_I != n_II)
    throw InvalidInput("generate_game: symmetric games need n_I = n_II");
  const PayoffOrientation orient = payoffs.value_or(default_payoffs(kind));
  RngStream rng(seed, kGameStream);

  Matrix U_I = sample_uniform_matrix(rng, n_I, n_II, 0.0, 1.0);
  Matrix U_II;
  switch (kind) {
    case GameKind::ZeroSum:
      U_II = -U_I;
      break;
    case GameKind::Symmetric: {
      // (U + U^T)/2 of a Uniform(0,1) draw stays inside (0, 1).
      Matrix s = 0.5 * (U_I + U_I.transpose());
      U_I = s;
      U_II = s.transpose();
      break;
    }
    case GameKind::Asymmetric:
      U_II = sample_uniform_matrix(rng, n_I, n_II, 0.0, 1.0);
      break;
  }
  if (orient == PayoffOrientation::Loss) {
    U_I = -U_I;
    U_II = -U_II;
  }
  auto p = make_game_problem(make_game_data(std::move(U_I), std::move(U_II), kind, orient, noise_sd));
  p.spec.seed = seed;
  p.spec.payoffs = orient;
  return p;
}

// ---------------------------------------------------------------------------
// Affine test problems

ProblemInstance make_affine_problem(Matrix A, Vector x_star, FeasibleSet set, double noise_sd) {
  const Eigen::Index d = A.rows();
  if (d < 1 || A.cols() != d || x_star.size() != d || set.dim() != d)
    throw InvalidInput("affine problem: inconsistent dimensions");
  if (!set.contains(x_star, 0.0)) throw InvalidInput("affine problem: x* must be feasible");
  const double L = lipschitz_bound(A);
  auto a = std::make_shared<const Matrix>(std::move(A));
  auto xs = std::make_shared<const Vector>(x_star);
  MeanFn mean = [a, xs](const Vector& x) -> Vector { return (*a) * (x - *xs); };

  ProblemInstance p;
  p.dim = d;
  p.set = std::move(set);
  p.oracle = std::make_shared<const StochasticOracle>(additive_gaussian_oracle(d, mean, noise_sd));
  p.lipschitz_L = L > 0.0 ? L : 1.0;
  p.known_solution = std::move(x_star);
  p.spec.family = Family::Affine;
  p.spec.dim = d;
  p.spec.noise_sd = noise_sd;
  return p;
}

ProblemInstance affine_test_problem(std::int64_t d, bool strong, std::uint64_t seed,
                                    double noise_sd, AffineSet set_kind) {
  if (d < 1) throw InvalidInput("affine_test_problem: d must be >= 1");
  RngStream rng(seed, kAffineStream);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  Matrix s(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) s(i, j) = scale * rng.normal();
  Matrix A;
  if (strong) {
    A = s.transpose() * s;
    A.diagonal().array() += 1.0;
  } else {
    A = s - s.transpose();
  }
  Vector x_star = sample_uniform(rng, d, -1.0, 1.0);
  FeasibleSet set = set_kind == AffineSet::Box
                        ? FeasibleSet::box(Vector::Constant(d, -2.0), Vector::Constant(d, 2.0))
                        : FeasibleSet::whole_space(d);
  auto p = make_affine_problem(std::move(A), std::move(x_star), std::move(set), noise_sd);
  p.spec.seed = seed;
  p.spec.strong = strong;
  p.spec.affine_set = set_kind;
  return p;
}

ProblemInstance make_problem(const ProblemSpec& spec) {
  ProblemInstance p;
  switch (spec.family) {
    case Family::Fractional:
      p = generate_fractional(spec.dim, spec.seed, spec.noise_sd);
      break;
    case Family::ZeroSum:
    case Family::Symmetric:
    case Family::Asymmetric:
      p = generate_game(spec.n_I, spec.n_II, kind_of(spec.family), spec.seed, spec.noise_sd,
                        spec.payoffs);
      break;
    case Family::Affine:
      p = affine_test_problem(spec.dim, spec.strong, spec.seed, spec.noise_sd, spec.affine_set);
      break;
  }
  return p;
}

Vector default_initial_point(const ProblemInstance& problem, RngStream& rng) {
  switch (problem.spec.family) {
    case Family::Fractional:
      return sample_uniform(rng, problem.dim, 1.0, 10.0);
    case Family::ZeroSum:
    case Family::Symmetric:
    case Family::Asymmetric:
      return sample_uniform(rng, problem.dim, 0.0, 1.0);
    case Family::Affine:
      if (problem.known_solution)
        return *problem.known_solution + sample_gaussian(rng, problem.dim, 0.0, 1.0);
      return sample_gaussian(rng, problem.dim, 0.0, 1.0);
  }
  return Vector::Zero(problem.dim);
}

// ---------------------------------------------------------------------------
// Equilibria

EquilibriumProfile recover_equilibrium(const BimatrixGameData& game, const Vector& x, double tol) {
  const Eigen::Index n1 = game.n_I();
  const Eigen::Index n2 = game.n_II();
  if (x.size() != n1 + n2) throw InvalidInput("recover_equilibrium: dimension mismatch");
  const Vector x1 = x.head(n1).cwiseMax(0.0);
  const Vector x2 = x.tail(n2).cwiseMax(0.0);
  const double s1 = x1.sum();
  const double s2 = x2.sum();
  if (!(s1 > tol) || !(s2 > tol)) {
    throw DegenerateSolution(
        "recover_equilibrium: a strategy block sums to <= tol; x is the artificial equilibrium "
        "x = 0 of the LCP, which carries no mixed strategy");
  }
  EquilibriumProfile e;
  e.v = 1.0 / s1;
  e.u = 1.0 / s2;
  e.p = x1 * e.v;
  e.q = x2 * e.u;
  return e;
}

bool verify_complementarity(const BimatrixGameData& game, const Vector& x, double tol) {
  if (x.size() != game.dim()) throw InvalidInput("verify_complementarity: dimension mismatch");
  if (!x.allFinite()) return false;
  if ((x.array() < -tol).any()) return false;
  const Vector t = game.mean_operator(x);
  if ((t.array() < -tol).any()) return false;
  return std::abs(x.dot(t)) <= tol * (1.0 + x.norm());
}

}  // namespace svi
