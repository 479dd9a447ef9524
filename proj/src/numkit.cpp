#include "svi/numkit.hpp"

#include <cmath>

#include "svi/errors.hpp"

namespace svi {

bool all_finite(const Vector& v) { return v.allFinite(); }
bool all_finite(const Matrix& m) { return m.allFinite(); }

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(a) ^ (b + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2)));
}

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t s = hash_combine(seed, stream_id);
  std::uint32_t words[8];
  for (int i = 0; i < 4; ++i) {
    s = mix64(s);
    words[2 * i] = static_cast<std::uint32_t>(s);
    words[2 * i + 1] = static_cast<std::uint32_t>(s >> 32);
  }
  std::seed_seq seq(std::begin(words), std::end(words));
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

RngStream RngStream::child(std::uint64_t key) const {
  return RngStream(seed_, hash_combine(stream_id_, key));
}

double RngStream::uniform01() { return unit_(engine_); }

double RngStream::normal() { return normal_(engine_); }

SpectralNormResult spectral_norm(const Matrix& m, double tol, int max_iter) {
  if (m.rows() == 0 || m.cols() == 0) throw InvalidInput("spectral_norm: empty matrix");
  if (!(tol > 0.0)) throw InvalidInput("spectral_norm: tol must be positive");
  if (max_iter < 1) throw InvalidInput("spectral_norm: max_iter must be positive");
  if (!m.allFinite()) throw InvalidInput("spectral_norm: matrix has non-finite entries");

  RngStream rng(0x5eed5eed5eedULL);
  Vector v(m.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  v.normalize();

  SpectralNormResult out;
  double lambda_prev = 0.0;
  for (int k = 1; k <= max_iter; ++k) {
    Vector w = m.transpose() * (m * v);
    const double lambda = v.dot(w);
    const double wn = w.norm();
    out.iterations = k;
    if (wn == 0.0) {
      // v lies in the null space; for a nonzero matrix this has probability
      // zero, for the zero matrix the norm is exactly zero.
      out.value = m.isZero(0.0) ? 0.0 : std::sqrt(std::max(lambda_prev, 0.0));
      out.converged = m.isZero(0.0);
      return out;
    }
    if (k > 1 && std::abs(lambda - lambda_prev) <= tol * std::abs(lambda)) {
      out.value = std::sqrt(std::max(lambda, 0.0));
      out.converged = true;
      return out;
    }
    lambda_prev = lambda;
    v = w / wn;
  }
  out.value = std::sqrt(std::max(lambda_prev, 0.0));
  out.converged = false;
  return out;
}

double lipschitz_bound(const Matrix& m) {
  const auto r = spectral_norm(m);
  return r.converged ? r.value : 1.01 * r.value;
}

Vector sample_gaussian(RngStream& rng, Eigen::Index n, double mean, double sd) {
  if (n <= 0) throw InvalidInput("sample_gaussian: n must be positive");
  if (!(sd >= 0.0) || !std::isfinite(sd) || !std::isfinite(mean))
    throw InvalidInput("sample_gaussian: need finite mean and sd >= 0");
  Vector out(n);
  if (sd == 0.0) {
    out.setConstant(mean);
    return out;
  }
  for (Eigen::Index i = 0; i < n; ++i) out[i] = mean + sd * rng.normal();
  return out;
}

Vector sample_uniform(RngStream& rng, Eigen::Index n, double lo, double hi) {
  if (n <= 0) throw InvalidInput("sample_uniform: n must be positive");
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw InvalidInput("sample_uniform: need finite lo < hi");
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = lo + (hi - lo) * rng.uniform01();
  return out;
}

Matrix sample_uniform_matrix(RngStream& rng, Eigen::Index rows, Eigen::Index cols, double lo,
                             double hi) {
  if (rows <= 0 || cols <= 0) throw InvalidInput("sample_uniform_matrix: empty shape");
  if (!(lo < hi)) throw InvalidInput("sample_uniform_matrix: need lo < hi");
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = lo + (hi - lo) * rng.uniform01();
  return out;
}

}  // namespace svi
