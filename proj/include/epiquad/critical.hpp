#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "epiquad/diagonalize.hpp"
#include "epiquad/errors.hpp"
#include "epiquad/fundamental.hpp"
#include "epiquad/polynomial.hpp"
#include "epiquad/types.hpp"

namespace epiquad {

// Positive weights for the general weighted problem min sum_i lambda_i eps_i^2.
struct WeightVector {
  Vec4 lambda = Vec4::Ones();

  explicit WeightVector(const Vec4& l) : lambda(l) {
    if (!(l.minCoeff() > 0.0))
      throw Error(ErrorCode::InvalidInput, "weights must be strictly positive");
  }
};

enum class LambdaCase { CaseI, CaseII, CaseIII };

namespace detail {

// Is (l, m) proportional to (a1, a2)? Relative cross-product test.
inline bool pair_proportional(double a1, double a2, double l, double m, double tol) {
  return std::abs(l * a2 - m * a1) <= tol * (l * a2 + m * a1);
}

}  // namespace detail

// How many critical points the weighted problem has for weights lambda over
// the constraint with coefficients (a1, a2): 2 when both of (lambda1,lambda3)
// and (lambda2,lambda4) are proportional to (a1,a2), 4 when exactly one is,
// 6 otherwise. Proportionality is |l a2 - m a1| <= tol (l a2 + m a1).
inline LambdaCase classify_weights(double a1, double a2, const WeightVector& w,
                                   double tol = 1e-9) {
  const bool first = detail::pair_proportional(a1, a2, w.lambda(0), w.lambda(2), tol);
  const bool second = detail::pair_proportional(a1, a2, w.lambda(1), w.lambda(3), tol);
  if (first && second) return LambdaCase::CaseI;
  if (first || second) return LambdaCase::CaseII;
  return LambdaCase::CaseIII;
}

enum class DegreeClass { Two = 2, Four = 4, Six = 6 };

// A linear factor (lambda - s q) divided out of the critical numerator.
struct LinearFactor {
  double lambda = 0.0;
  double q = 0.0;
  int index = 0;
};

// The numerator of the derivative of the weighted cost along the constraint
// set, after dividing out the factors the classification proves are present:
//
//   N(s) = sum_i q_i lambda_i^2 y_i^2 prod_{j != i} (lambda_j - s q_j)^2,
//
// of degree 6 generically, 4 when one weight pair is proportional to (a1,a2)
// (that pair's two factors divide N), 2 when both are.
struct CriticalPolynomial {
  Poly coeffs;  // ascending; degree = coeffs.size() - 1
  DegreeClass degree_class = DegreeClass::Six;
  std::vector<LinearFactor> deflated_factors;
  std::vector<double> deflation_remainders;  // tiny iff the classification was honest
};

inline CriticalPolynomial build_critical_polynomial(const Vec4& y, double a1, double a2,
                                                    const WeightVector& w) {
  const Vec4 q(a1, -a1, a2, -a2);
  const Vec4& lam = w.lambda;

  Poly n(7, 0.0);
  for (int i = 0; i < 4; ++i) {
    Poly term{q(i) * lam(i) * lam(i) * y(i) * y(i)};
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      poly_mul_linear(term, lam(j), -q(j));
      poly_mul_linear(term, lam(j), -q(j));
    }
    for (size_t k = 0; k < term.size(); ++k) n[k] += term[k];
  }

  CriticalPolynomial out;
  const bool deflate_first = detail::pair_proportional(a1, a2, lam(0), lam(2), 1e-9);
  const bool deflate_second = detail::pair_proportional(a1, a2, lam(1), lam(3), 1e-9);

  const auto deflate_pair = [&](int i, int j) {
    for (int idx : {i, j}) {
      double rem = 0.0;
      n = poly_div_linear(n, lam(idx), -q(idx), &rem);
      out.deflated_factors.push_back({lam(idx), q(idx), idx});
      out.deflation_remainders.push_back(rem);
    }
    // Dividing a pair's factors carries an a1*a2 content; remove it so a
    // CaseI deflation reproduces the (A, B, C) quadratic exactly.
    for (double& c : n) c /= a1 * a2;
  };

  if (deflate_first) deflate_pair(0, 2);
  if (deflate_second) deflate_pair(1, 3);
  out.degree_class = deflate_first && deflate_second ? DegreeClass::Two
                     : deflate_first || deflate_second ? DegreeClass::Four
                                                       : DegreeClass::Six;

  double maxc = 0.0;
  for (double c : n) maxc = std::max(maxc, std::abs(c));
  if (!(std::abs(n.back()) > 1e-12 * maxc))
    throw Error(ErrorCode::VanishingLead,
                "critical polynomial lost its leading coefficient (non-generic residual)");
  out.coeffs = std::move(n);
  return out;
}

// A critical point of the weighted problem: the parameter s, the residual
// eps_i = s q_i y_i / (lambda_i - s q_i), and the weighted cost there.
struct CriticalPoint {
  double s = 0.0;
  Vec4 eps = Vec4::Zero();
  double cost = 0.0;  // sum_i lambda_i eps_i^2
};

inline std::vector<CriticalPoint> real_critical_points(const CriticalPolynomial& p, const Vec4& y,
                                                       double a1, double a2,
                                                       const WeightVector& w) {
  const Vec4 q(a1, -a1, a2, -a2);
  const Vec4& lam = w.lambda;
  std::vector<CriticalPoint> pts;
  for (double s : poly_real_roots(p.coeffs)) {
    // Roots colliding with a pole of eps(s) are artifacts of clearing
    // denominators, not critical points.
    bool pole = false;
    for (int i = 0; i < 4; ++i)
      if (std::abs(lam(i) - s * q(i)) < 1e-10 * lam(i)) pole = true;
    if (pole) continue;
    CriticalPoint cp;
    cp.s = s;
    for (int i = 0; i < 4; ++i) cp.eps(i) = s * q(i) * y(i) / (lam(i) - s * q(i));
    cp.cost = lam.dot(cp.eps.cwiseProduct(cp.eps));
    pts.push_back(cp);
  }
  return pts;
}

// Exact (unweighted, lambda = 1) solution: the global minimizer of
// ||eps||^2 over the constraint set, found among the real critical points.
// Returns the residual and E_q = sqrt of the minimal cost (a distance).
//
// Inputs are rescaled so max(a1, ||y||) = 1 before building the polynomial:
// scaling a by c only reparameterizes s -> s/c (it leaves every eps(s)
// value unchanged), and scaling y by e scales eps linearly.
inline std::pair<Vec4, double> optimal_unweighted(const Vec4& y, double a1, double a2) {
  const double ynorm = y.norm();
  if (ynorm == 0.0) return {Vec4::Zero(), 0.0};

  const Vec4 ys = y / ynorm;
  const double c = 1.0 / std::max(a1, a2);
  const WeightVector unit(Vec4::Ones());
  const CriticalPolynomial cp = build_critical_polynomial(ys, c * a1, c * a2, unit);
  const std::vector<CriticalPoint> pts = real_critical_points(cp, ys, c * a1, c * a2, unit);
  if (pts.empty())
    throw Error(ErrorCode::NumericalBreakdown, "no real critical point survived filtering");

  const CriticalPoint* best = &pts.front();
  for (const CriticalPoint& cand : pts) {
    if (cand.cost < best->cost ||
        (cand.cost == best->cost && std::abs(cand.s) < std::abs(best->s)))
      best = &cand;
  }
  return {best->eps * ynorm, std::sqrt(best->cost) * ynorm};
}

// Pipeline twin of triangulate_weighted for the exact solver.
inline TriangulationResult triangulate_exact(const FundamentalMatrix& f,
                                             const Correspondence& c) {
  const DiagonalizedProblem d = diagonalize(f);
  const Vec4 x = c.stacked();
  const Vec4 y = d.to_local(x);
  const auto [eps, eq] = optimal_unweighted(y, d.a1, d.a2);
  const Vec4 xhat = x + d.rotate_residual(eps);

  TriangulationResult r;
  r.corrected = Correspondence::from_stacked(xhat);
  r.corrected.gt1 = c.gt1;
  r.corrected.gt2 = c.gt2;
  r.cost2d = (xhat - x).squaredNorm();
  r.method_tag = MethodTag::Exact;
  return r;
}

}  // namespace epiquad
