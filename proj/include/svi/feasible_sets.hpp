#pragma once

#include <string>
#include <variant>

#include "svi/numkit.hpp"

namespace svi {

struct Box {
  Vector lo;
  Vector hi;
};

struct NonnegativeOrthant {
  Eigen::Index dim;
};

struct WholeSpace {
  Eigen::Index dim;
};

/// Nonempty closed convex feasible set with a closed-form Euclidean projector.
/// Immutable once built.
class FeasibleSet {
 public:
  using Variant = std::variant<Box, NonnegativeOrthant, WholeSpace>;

  static FeasibleSet box(Vector lo, Vector hi);
  static FeasibleSet nonnegative_orthant(Eigen::Index dim);
  static FeasibleSet whole_space(Eigen::Index dim);

  Eigen::Index dim() const;
  const Variant& variant() const { return set_; }
  std::string kind() const;

  Vector project(const Vector& x) const;
  bool contains(const Vector& x, double tol) const;

 private:
  explicit FeasibleSet(Variant v) : set_(std::move(v)) {}
  void check_dim(const Vector& x, const char* op) const;

  Variant set_;
};

inline Vector project(const FeasibleSet& set, const Vector& x) { return set.project(x); }
inline bool contains(const FeasibleSet& set, const Vector& x, double tol) {
  return set.contains(x, tol);
}

}  // namespace svi
