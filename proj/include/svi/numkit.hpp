#pragma once

// Dense linear algebra and reproducible random streams.

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace svi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

bool all_finite(const Vector& v);
bool all_finite(const Matrix& m);

/// Seeded random stream. A stream is identified by (seed, stream_id); two
/// streams with the same identity produce the same draws bit-for-bit.
/// Child streams are derived deterministically, so replication r or
/// iteration n can own an independent stream without shared state.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  /// Independent stream keyed by `key` under this stream's identity.
  /// Does not consume draws from *this.
  RngStream child(std::uint64_t key) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform01();
  /// Standard normal.
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

/// SplitMix64 finalizer, used for seed derivation.
std::uint64_t mix64(std::uint64_t x);
/// Order-sensitive combination of two 64-bit words.
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b);

struct SpectralNormResult {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Largest singular value by power iteration on m^T m. The start vector is a
/// fixed-seed random unit vector so results are reproducible; convergence is
/// declared when the Rayleigh quotient changes by at most tol (relative).
SpectralNormResult spectral_norm(const Matrix& m, double tol = 1e-8, int max_iter = 10000);

/// Spectral norm safe for use as a Lipschitz bound: multiplied by 1.01 when
/// power iteration did not converge.
double lipschitz_bound(const Matrix& m);

Vector sample_gaussian(RngStream& rng, Eigen::Index n, double mean, double sd);
Vector sample_uniform(RngStream& rng, Eigen::Index n, double lo, double hi);
Matrix sample_uniform_matrix(RngStream& rng, Eigen::Index rows, Eigen::Index cols, double lo,
                             double hi);

}  // namespace svi
