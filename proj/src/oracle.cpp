#include "svi/oracle.hpp"

#include <string>
#include <vector>

#include "svi/errors.hpp"

namespace svi {

StochasticOracle::StochasticOracle(Eigen::Index dim, SampleFn sampler, MeanFn mean_operator)
    : dim_(dim), sampler_(std::move(sampler)), mean_(std::move(mean_operator)) {
  if (dim_ <= 0) throw InvalidInput("StochasticOracle: dim must be positive");
  if (!sampler_) throw InvalidInput("StochasticOracle: sampler is required");
}

Vector StochasticOracle::sample(const Vector& x, RngStream& rng) const {
  if (x.size() != dim_) throw InvalidInput("oracle sample: dimension mismatch");
  Vector out = sampler_(x, rng);
  if (out.size() != dim_) throw InvalidInput("oracle sample: sampler returned wrong length");
  return out;
}

Vector StochasticOracle::mean_operator(const Vector& x) const {
  if (!mean_) throw Unsupported("oracle has no closed-form mean operator");
  if (x.size() != dim_) throw InvalidInput("mean operator: dimension mismatch");
  return mean_(x);
}

MiniBatchEstimator::MiniBatchEstimator(std::shared_ptr<const StochasticOracle> oracle)
    : oracle_(std::move(oracle)) {
  if (!oracle_) throw InvalidInput("MiniBatchEstimator: null oracle");
}

Vector MiniBatchEstimator::evaluate_batch(const Vector& x, std::int64_t m, RngStream& rng) {
  if (m < 1) throw InvalidInput("evaluate_batch: batch size must be >= 1");
  if (x.size() != oracle_->dim()) throw InvalidInput("evaluate_batch: dimension mismatch");
  Vector acc = Vector::Zero(x.size());
  for (std::int64_t i = 0; i < m; ++i) acc += oracle_->sample(x, rng);
  calls_ += static_cast<std::uint64_t>(m);
  acc /= static_cast<double>(m);
  if (!acc.allFinite()) {
    throw NumericError("evaluate_batch: non-finite oracle output", -1,
                       std::vector<double>(x.data(), x.data() + x.size()));
  }
  return acc;
}

double empirical_mse(MiniBatchEstimator& est, const Vector& x, std::int64_t m, std::int64_t reps,
                     RngStream& rng) {
  if (reps < 1) throw InvalidInput("empirical_mse: reps must be >= 1");
  if (!est.oracle().has_mean_operator())
    throw Unsupported("empirical_mse: oracle has no closed-form mean operator");
  const Vector t = est.oracle().mean_operator(x);
  double acc = 0.0;
  for (std::int64_t r = 0; r < reps; ++r) acc += (est.evaluate_batch(x, m, rng) - t).squaredNorm();
  return acc / static_cast<double>(reps);
}

StochasticOracle additive_gaussian_oracle(Eigen::Index dim, MeanFn mean, double sd) {
  if (!(sd >= 0.0)) throw InvalidInput("additive_gaussian_oracle: sd must be >= 0");
  auto sampler = [mean, sd](const Vector& x, RngStream& rng) -> Vector {
    Vector t = mean(x);
    if (sd > 0.0)
      for (Eigen::Index i = 0; i < t.size(); ++i) t[i] += sd * rng.normal();
    return t;
  };
  return StochasticOracle(dim, std::move(sampler), std::move(mean));
}

}  // namespace svi
