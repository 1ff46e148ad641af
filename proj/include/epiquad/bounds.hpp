#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>

#include "epiquad/types.hpp"
#include "epiquad/weighted.hpp"

namespace epiquad {

// Computable bounds on the exact distance E_q from y to the constraint set,
// all in distance (not squared) units:
//
//   lower  = sqrt(alpha+) / sqrt(2 max(a1,a2))
//   upper  = sqrt(alpha+) / sqrt(2 min(a1,a2))
//   best_upper = sqrt((alpha+/delta) ST/(S+T))   (the weighted minimizer's
//                true distance; unavailable when delta degenerates)
//
// upper/lower = ratio = sqrt(max/min); all three collapse onto E_q when
// a1 = a2.
struct ErrorBounds {
  double lower = 0.0;
  std::optional<double> best_upper;
  double upper = 0.0;
  double ratio = 1.0;
  double alpha_plus = 0.0;
};

inline double eigenvalue_ratio(double a1, double a2) {
  return std::sqrt(std::max(a1, a2) / std::min(a1, a2));
}

inline ErrorBounds error_bounds(const Vec4& y, double a1, double a2) {
  const QuadraticData d = quadratic_data(y, a1, a2, 1.0);
  ErrorBounds b;
  b.alpha_plus = d.alpha_plus;
  const double root = std::sqrt(d.alpha_plus);
  b.lower = root / std::sqrt(2.0 * std::max(a1, a2));
  b.upper = root / std::sqrt(2.0 * std::min(a1, a2));
  b.ratio = eigenvalue_ratio(a1, a2);
  // Same scale-free degeneracy test as solve_weighted: delta = u v grows
  // like (a ||y||^2)^2.
  const double uv_scale = std::max(a1, a2) * y.squaredNorm();
  if (d.delta > 1e-14 * uv_scale * uv_scale)
    b.best_upper = std::sqrt((d.alpha_plus / d.delta) * d.S * d.T / (d.S + d.T));
  return b;
}

// |sqrt(alpha) - sqrt(beta)| < r without square roots. The bare comparison
// (alpha+beta-r^2)^2 < 4 alpha beta is valid only on alpha+beta >= r^2,
// where both sides of the unsquared inequality are nonnegative; below that
// the predicate is always true (|sqrt a - sqrt b|^2 <= alpha+beta < r^2),
// and on the boundary alpha+beta = r^2 the squared comparison still decides
// correctly (it reads 0 < 4 alpha beta, matching the strict predicate).
inline bool inlier_check_fast(double alpha, double beta, double r) {
  const double rr = r * r;
  const double sum = alpha + beta;
  if (sum < rr) return true;
  const double excess = sum - rr;
  return excess * excess < 4.0 * alpha * beta;
}

}  // namespace epiquad
