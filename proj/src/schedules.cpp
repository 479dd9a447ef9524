#include "svi/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "svi/errors.hpp"

namespace svi {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

std::string to_string(Algorithm a) { return a == Algorithm::SFBF ? "sfbf" : "seg"; }

Algorithm parse_algorithm(const std::string& s) {
  std::string t = s;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (t == "sfbf") return Algorithm::SFBF;
  if (t == "seg") return Algorithm::SEG;
  throw InvalidInput("unknown algorithm '" + s + "' (expected sfbf or seg)");
}

StepSizePolicy StepSizePolicy::constant(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw InvalidInput("constant step size must be positive and finite");
  return StepSizePolicy(ConstantStep{alpha});
}

StepSizePolicy StepSizePolicy::bounded_sequence(std::function<double(std::int64_t)> values,
                                                double lower, double upper) {
  if (!values) throw InvalidInput("bounded step sequence needs a generator");
  if (!(lower > 0.0) || !(lower <= upper) || !std::isfinite(upper))
    throw InvalidInput("bounded step sequence needs 0 < lower <= upper < inf");
  return StepSizePolicy(BoundedSequenceStep{std::move(values), lower, upper});
}

double StepSizePolicy::upper() const {
  return std::visit(overloaded{[](const ConstantStep& c) { return c.alpha; },
                               [](const BoundedSequenceStep& b) { return b.upper; }},
                    policy_);
}

double StepSizePolicy::lower() const {
  return std::visit(overloaded{[](const ConstantStep& c) { return c.alpha; },
                               [](const BoundedSequenceStep& b) { return b.lower; }},
                    policy_);
}

double step_size_at(const StepSizePolicy& p, std::int64_t n) {
  return std::visit(overloaded{[](const ConstantStep& c) { return c.alpha; },
                               [n](const BoundedSequenceStep& b) {
                                 const double v = b.values(n);
                                 if (std::isnan(v)) return b.lower;
                                 return std::clamp(v, b.lower, b.upper);
                               }},
                    p.variant());
}

double step_size_bound(double lipschitz, Algorithm algorithm) {
  if (!(lipschitz > 0.0)) throw InvalidInput("Lipschitz modulus must be positive");
  const double k = algorithm == Algorithm::SFBF ? 2.0 : 6.0;
  return 1.0 / (std::sqrt(k) * lipschitz);
}

StepValidation validate_step_size(const StepSizePolicy& p, double lipschitz,
                                  Algorithm algorithm) {
  StepValidation v;
  v.alpha_upper = p.upper();
  v.bound = step_size_bound(lipschitz, algorithm);
  const double k = algorithm == Algorithm::SFBF ? 2.0 : 6.0;
  v.rho_lower = 1.0 - k * lipschitz * lipschitz * v.alpha_upper * v.alpha_upper;
  // Both conditions are the same in exact arithmetic. Near the boundary they
  // can disagree by one ulp; rejection wins and rho is reported as <= 0.
  v.accepted = v.alpha_upper < v.bound && v.rho_lower > 0.0;
  if (!v.accepted) v.rho_lower = std::min(v.rho_lower, 0.0);
  return v;
}

void require_valid_step_size(const StepSizePolicy& p, double lipschitz, Algorithm algorithm) {
  const auto v = validate_step_size(p, lipschitz, algorithm);
  if (!v.accepted) {
    std::ostringstream os;
    os << "step size " << v.alpha_upper << " violates the " << to_string(algorithm)
       << " bound " << v.bound << " (L = " << lipschitz << ")";
    throw StepSizeRejected(os.str(), v.alpha_upper, v.bound);
  }
}

StepSizePolicy paper_game_rule(double lipschitz, Algorithm algorithm) {
  return StepSizePolicy::constant(0.99 * step_size_bound(lipschitz, algorithm));
}

StepSizePolicy paper_fractional_rule(std::int64_t dim, Algorithm algorithm) {
  if (dim < 1) throw InvalidInput("paper_fractional_rule: dim must be positive");
  const double sfbf = 10.0 / static_cast<double>(dim);
  return StepSizePolicy::constant(algorithm == Algorithm::SFBF ? sfbf : sfbf / std::sqrt(3.0));
}

BatchSchedule BatchSchedule::poly_log(double c, std::int64_t n0, double a, double b) {
  if (!(c > 0.0)) throw InvalidInput("PolyLog: c must be positive");
  if (!((a > 0.0 && b >= -1.0) || (a == 0.0 && b > 0.0)))
    throw InvalidInput("PolyLog: need (a > 0, b >= -1) or (a = 0, b > 0)");
  // ln(n + n0) must be positive unless the log factor is switched off.
  const std::int64_t min_n0 = b == -1.0 ? 1 : 2;
  if (n0 < min_n0) throw InvalidInput("PolyLog: n0 must be >= " + std::to_string(min_n0));
  return BatchSchedule(PolyLogBatch{c, n0, a, b});
}

BatchSchedule BatchSchedule::experiment_rule(std::int64_t d, ExperimentBatch::Rounding rounding) {
  if (d < 1) throw InvalidInput("ExperimentRule: d must be positive");
  return BatchSchedule(ExperimentBatch{d, rounding});
}

BatchSchedule BatchSchedule::constant(std::int64_t m) {
  if (m < 1) throw InvalidInput("Constant batch: m must be >= 1");
  return BatchSchedule(ConstantBatch{m});
}

std::string BatchSchedule::describe() const {
  std::ostringstream os;
  std::visit(overloaded{[&](const PolyLogBatch& p) {
                          os << "polylog(c=" << p.c << ",n0=" << p.n0 << ",a=" << p.a
                             << ",b=" << p.b << ")";
                        },
                        [&](const ExperimentBatch& e) {
                          os << "experiment(d=" << e.d
                             << (e.rounding == ExperimentBatch::Rounding::Ceil ? ",ceil" : "")
                             << ")";
                        },
                        [&](const ConstantBatch& c) { os << "constant(m=" << c.m << ")"; }},
             schedule_);
  return os.str();
}

std::int64_t batch_size_at(const BatchSchedule& s, std::int64_t n) {
  if (n < 0) throw InvalidInput("batch_size_at: negative iteration index");
  return std::visit(
      overloaded{[n](const PolyLogBatch& p) -> std::int64_t {
                   const double t = static_cast<double>(n + p.n0);
                   const double log_factor = p.b == -1.0 ? 1.0 : std::pow(std::log(t), 1.0 + p.b);
                   const double m = std::ceil(p.c * std::pow(t, 1.0 + p.a) * log_factor);
                   return std::max<std::int64_t>(1, static_cast<std::int64_t>(m));
                 },
                 [n](const ExperimentBatch& e) -> std::int64_t {
                   const double k = static_cast<double>(n + 1);
                   const double r = k * std::sqrt(k) / static_cast<double>(e.d);
                   const double m = e.rounding == ExperimentBatch::Rounding::Ceil
                                        ? std::ceil(r)
                                        : std::floor(r + 0.5);
                   return std::max<std::int64_t>(1, static_cast<std::int64_t>(m));
                 },
                 [](const ConstantBatch& c) -> std::int64_t { return c.m; }},
      s.variant());
}

SummabilityReport summability_report(const BatchSchedule& s, std::int64_t horizon) {
  if (horizon < 1) throw InvalidInput("summability_report: horizon must be >= 1");
  SummabilityReport r;
  r.horizon = horizon;
  for (std::int64_t n = 0; n < horizon; ++n)
    r.partial_sum += 1.0 / static_cast<double>(batch_size_at(s, n));

  std::visit(
      overloaded{
          [&](const ConstantBatch&) { r.divergent = true; },
          [&](const PolyLogBatch& p) {
            // Integral comparison: the summand is decreasing in t = n + n0 for
            // t >= 3, and ceil() only shrinks 1/m.
            const double t = static_cast<double>(horizon + p.n0);
            if (t < 3.0) return;
            if (p.a > 0.0) {
              const double log_factor =
                  p.b == -1.0 ? 1.0 : std::pow(std::log(t - 1.0), 1.0 + p.b);
              r.tail_bound = 1.0 / (p.c * p.a * std::pow(t - 1.0, p.a) * log_factor);
            } else {
              r.tail_bound = 1.0 / (p.c * p.b * std::pow(std::log(t - 1.0), p.b));
            }
          },
          [&](const ExperimentBatch& e) {
            // For (n+1)^1.5 >= d, round(x) >= x/2, so the tail is at most
            // 2d * sum_{k > H} k^-1.5 <= 4d / sqrt(H).
            const double h = static_cast<double>(horizon);
            if (h * std::sqrt(h) >= static_cast<double>(e.d))
              r.tail_bound = 4.0 * static_cast<double>(e.d) / std::sqrt(h);
          }},
      s.variant());
  return r;
}

}  // namespace svi
