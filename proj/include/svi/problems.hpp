#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "svi/feasible_sets.hpp"
#include "svi/numkit.hpp"
#include "svi/oracle.hpp"

namespace svi {

enum class Family { Fractional, ZeroSum, Symmetric, Asymmetric, Affine };

std::string to_string(Family f);
Family parse_family(const std::string& s);
bool is_game(Family f);

enum class GameKind { ZeroSum, Symmetric, Asymmetric };

/// Sign of the generated payoff matrices. Gain draws entries in (0, 1); Loss
/// draws them in (-1, 0).
enum class PayoffOrientation { Gain, Loss };

std::string to_string(PayoffOrientation p);
PayoffOrientation parse_payoffs(const std::string& s);
/// Zero-sum games default to Gain, the other kinds to Loss.
PayoffOrientation default_payoffs(GameKind kind);

enum class AffineSet { Box, WholeSpace };

/// Replayable description of a problem instance. Matrices are regenerated
/// from the seed, never stored.
struct ProblemSpec {
  Family family = Family::Affine;
  std::int64_t dim = 1;       // fractional / affine dimension
  std::int64_t n_I = 0;       // games: player I strategies
  std::int64_t n_II = 0;      // games: player II strategies
  std::uint64_t seed = 0;
  double noise_sd = 0.1;
  std::optional<PayoffOrientation> payoffs;  // games; defaults per kind
  bool strong = true;                        // affine: strongly monotone vs skew
  AffineSet affine_set = AffineSet::Box;

  std::int64_t total_dim() const { return is_game(family) ? n_I + n_II : dim; }
  /// "200" or "100x100".
  std::string dim_label() const;
};

void to_json(nlohmann::json& j, const ProblemSpec& s);
void from_json(const nlohmann::json& j, ProblemSpec& s);

struct FractionalProgramData {
  Matrix Q;  // symmetric positive definite, Q = M^T M + I
  Vector c;
  double q = 0.0;
  Vector a;
  double b = 0.0;
  double noise_sd = 0.1;

  double numerator(const Vector& x) const;    // G(x) = x'Qx/2 + c'x + q
  double denominator(const Vector& x) const;  // h(x) = a'x + b
  /// Gradient of G/h by the quotient rule.
  Vector gradient(const Vector& x) const;
};

struct BimatrixGameData {
  Matrix U_I;   // n_I x n_II
  Matrix U_II;  // n_I x n_II
  GameKind kind = GameKind::Asymmetric;
  PayoffOrientation payoffs = PayoffOrientation::Gain;
  Matrix M;     // [[0, -U_I], [-U_II^T, 0]]
  double noise_sd = 0.1;

  Eigen::Index n_I() const { return U_I.rows(); }
  Eigen::Index n_II() const { return U_I.cols(); }
  Eigen::Index dim() const { return M.rows(); }
  /// T(x) = 1 + M x.
  Vector mean_operator(const Vector& x) const;
};

/// Builds M from the payoff pair; validates shapes and the kind's structure.
BimatrixGameData make_game_data(Matrix U_I, Matrix U_II, GameKind kind,
                                PayoffOrientation payoffs, double noise_sd);

/// The variational inequality VI(T, X) together with its stochastic oracle.
struct ProblemInstance {
  Eigen::Index dim = 0;
  FeasibleSet set = FeasibleSet::whole_space(1);
  std::shared_ptr<const StochasticOracle> oracle;
  double lipschitz_L = 0.0;
  bool lipschitz_estimated = false;
  std::optional<Vector> known_solution;
  ProblemSpec spec;

  std::shared_ptr<const FractionalProgramData> fractional;
  std::shared_ptr<const BimatrixGameData> game;
};

ProblemInstance generate_fractional(std::int64_t d, std::uint64_t seed, double noise_sd = 0.1);
/// Wraps fixed fractional data (bypassing the generator).
ProblemInstance make_fractional_problem(FractionalProgramData data, FeasibleSet set,
                                        std::uint64_t lipschitz_seed = 0);

ProblemInstance generate_game(std::int64_t n_I, std::int64_t n_II, GameKind kind,
                              std::uint64_t seed, double noise_sd = 0.1,
                              std::optional<PayoffOrientation> payoffs = std::nullopt);
ProblemInstance make_game_problem(BimatrixGameData data);

/// T(x) = A (x - x*), known solution x*, additive Gaussian noise.
ProblemInstance make_affine_problem(Matrix A, Vector x_star, FeasibleSet set, double noise_sd);
ProblemInstance affine_test_problem(std::int64_t d, bool strong, std::uint64_t seed,
                                    double noise_sd = 0.0, AffineSet set = AffineSet::Box);

ProblemInstance make_problem(const ProblemSpec& spec);

/// Starting point used by the experiments: uniform in (1, 10)^d for
/// fractional programs, (0, 1)^d for games, x* + N(0, I) for affine problems.
Vector default_initial_point(const ProblemInstance& problem, RngStream& rng);

struct EquilibriumProfile {
  Vector p;
  Vector q;
  double v = 0.0;
  double u = 0.0;
};

EquilibriumProfile recover_equilibrium(const BimatrixGameData& game, const Vector& x,
                                       double tol = 1e-3);
bool verify_complementarity(const BimatrixGameData& game, const Vector& x, double tol = 1e-3);

}  // namespace svi
