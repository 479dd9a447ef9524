#include "svi/feasible_sets.hpp"

#include <cmath>

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

FeasibleSet FeasibleSet::box(Vector lo, Vector hi) {
  if (lo.size() == 0) throw InvalidInput("Box: dimension must be positive");
  if (lo.size() != hi.size()) throw InvalidInput("Box: lo and hi differ in length");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (std::isnan(lo[i]) || std::isnan(hi[i])) throw InvalidInput("Box: NaN bound");
    if (lo[i] > hi[i]) throw InvalidInput("Box: lo_i > hi_i at index " + std::to_string(i));
  }
  return FeasibleSet(Box{std::move(lo), std::move(hi)});
}

FeasibleSet FeasibleSet::nonnegative_orthant(Eigen::Index dim) {
  if (dim <= 0) throw InvalidInput("NonnegativeOrthant: dimension must be positive");
  return FeasibleSet(NonnegativeOrthant{dim});
}

FeasibleSet FeasibleSet::whole_space(Eigen::Index dim) {
  if (dim <= 0) throw InvalidInput("WholeSpace: dimension must be positive");
  return FeasibleSet(WholeSpace{dim});
}

Eigen::Index FeasibleSet::dim() const {
  return std::visit(overloaded{[](const Box& b) { return b.lo.size(); },
                               [](const NonnegativeOrthant& o) { return o.dim; },
                               [](const WholeSpace& w) { return w.dim; }},
                    set_);
}

std::string FeasibleSet::kind() const {
  return std::visit(overloaded{[](const Box&) { return std::string("box"); },
                               [](const NonnegativeOrthant&) { return std::string("orthant"); },
                               [](const WholeSpace&) { return std::string("whole_space"); }},
                    set_);
}

void FeasibleSet::check_dim(const Vector& x, const char* op) const {
  if (x.size() != dim())
    throw InvalidInput(std::string(op) + ": dimension mismatch (set " + std::to_string(dim()) +
                       ", point " + std::to_string(x.size()) + ")");
}

Vector FeasibleSet::project(const Vector& x) const {
  check_dim(x, "project");
  return std::visit(
      overloaded{[&](const Box& b) -> Vector { return x.cwiseMax(b.lo).cwiseMin(b.hi); },
                 [&](const NonnegativeOrthant&) -> Vector { return x.cwiseMax(0.0); },
                 [&](const WholeSpace&) -> Vector { return x; }},
      set_);
}

bool FeasibleSet::contains(const Vector& x, double tol) const {
  check_dim(x, "contains");
  if (!(tol >= 0.0)) throw InvalidInput("contains: tol must be nonnegative");
  return std::visit(overloaded{[&](const Box& b) {
                                 return ((x - b.lo).array() >= -tol).all() &&
                                        ((b.hi - x).array() >= -tol).all();
                               },
                               [&](const NonnegativeOrthant&) { return (x.array() >= -tol).all(); },
                               [&](const WholeSpace&) { return x.allFinite(); }},
                    set_);
}

}  // namespace svi
