#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>

#include "svi/numkit.hpp"

namespace svi {

/// One draw F(x, xi) of the random operator. Consumes randomness from rng.
using SampleFn = std::function<Vector(const Vector& x, RngStream& rng)>;
/// Closed-form expectation T(x) = E[F(x, xi)].
using MeanFn = std::function<Vector(const Vector& x)>;

/// Stateless stochastic oracle. Safe to share between concurrent runs; all
/// randomness comes from the stream passed to sample().
class StochasticOracle {
 public:
  StochasticOracle(Eigen::Index dim, SampleFn sampler, MeanFn mean_operator = {});

  Eigen::Index dim() const { return dim_; }
  bool has_mean_operator() const { return static_cast<bool>(mean_); }

  Vector sample(const Vector& x, RngStream& rng) const;
  /// Throws Unsupported when no closed form was supplied.
  Vector mean_operator(const Vector& x) const;

 private:
  Eigen::Index dim_;
  SampleFn sampler_;
  MeanFn mean_;
};

inline Vector mean_operator_eval(const StochasticOracle& o, const Vector& x) {
  return o.mean_operator(x);
}

/// Averages m single samples and keeps count of every sample drawn.
/// Owned by a single run.
class MiniBatchEstimator {
 public:
  explicit MiniBatchEstimator(std::shared_ptr<const StochasticOracle> oracle);

  const StochasticOracle& oracle() const { return *oracle_; }

  /// (1/m) sum_i F(x, xi_i) with m fresh draws from rng.
  Vector evaluate_batch(const Vector& x, std::int64_t m, RngStream& rng);

  std::uint64_t calls() const { return calls_; }

 private:
  std::shared_ptr<const StochasticOracle> oracle_;
  std::uint64_t calls_ = 0;
};

/// Mean squared error of the batch estimator at x, averaged over reps
/// independent batches of size m. Requires the closed-form mean operator.
double empirical_mse(MiniBatchEstimator& est, const Vector& x, std::int64_t m, std::int64_t reps,
                     RngStream& rng);

/// Oracle returning T(x) + N(0, sd^2 I). With sd = 0 the sampler is T itself.
StochasticOracle additive_gaussian_oracle(Eigen::Index dim, MeanFn mean, double sd);

}  // namespace svi
