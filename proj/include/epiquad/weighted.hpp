#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>

#include "epiquad/diagonalize.hpp"
#include "epiquad/errors.hpp"
#include "epiquad/fundamental.hpp"
#include "epiquad/types.hpp"

namespace epiquad {

// Everything the closed-form weighted solve needs, all O(1) arithmetic in
// u = a1 y1^2 + a2 y3^2 and v = a1 y2^2 + a2 y4^2 (the two "epipolar halves"
// of the residual energy):
//
//   A = u - nu^2 v, B = 2 nu (u + nu v), C = nu^2 (u - v),
//   Delta = B^2 - 4AC = 4 nu^2 (nu+1)^2 delta,  delta = u v,
//   alpha+- = (sqrt(u) -+ sqrt(v))^2,
//   S = (y1^2 + y3^2) v,  T = (y2^2 + y4^2) u.
struct QuadraticData {
  double A = 0.0, B = 0.0, C = 0.0;
  double Delta = 0.0;
  double delta = 0.0;
  double S = 0.0, T = 0.0;
  double alpha_plus = 0.0, alpha_minus = 0.0;
  double nu = 0.0;
};

inline QuadraticData quadratic_data(const Vec4& y, double a1, double a2, double nu) {
  QuadraticData d;
  const double u = a1 * y(0) * y(0) + a2 * y(2) * y(2);
  const double v = a1 * y(1) * y(1) + a2 * y(3) * y(3);
  d.A = u - nu * nu * v;
  d.B = 2.0 * nu * (u + nu * v);
  d.C = nu * nu * (u - v);
  // Kahan's discriminant: error-free products via fma keep B^2 - 4AC accurate
  // through the near-total cancellation that occurs when u v is tiny.
  const double bb = d.B * d.B;
  const double bb_err = std::fma(d.B, d.B, -bb);
  const double ac = (4.0 * d.A) * d.C;
  const double ac_err = std::fma(4.0 * d.A, d.C, -ac);
  d.Delta = (bb - ac) + (bb_err - ac_err);
  d.delta = u * v;
  d.S = (y(0) * y(0) + y(2) * y(2)) * v;
  d.T = (y(1) * y(1) + y(3) * y(3)) * u;
  const double du = std::sqrt(u), dv = std::sqrt(v);
  d.alpha_plus = (du - dv) * (du - dv);
  d.alpha_minus = (du + dv) * (du + dv);
  d.nu = nu;
  return d;
}

// The two critical residuals of the weighted problem with weights
// lambda = (a1, nu a1, a2, nu a2) (mu normalized to 1), their parameters s+-,
// and both cost values at each. eps_plus is the minimizer; eps_minus is the
// other critical point (a saddle/max on the constraint set).
struct WeightedSolution {
  double s_plus = 0.0, s_minus = 0.0;
  Vec4 eps_plus = Vec4::Zero(), eps_minus = Vec4::Zero();
  double weighted_cost_plus = 0.0, weighted_cost_minus = 0.0;
  double unweighted_cost_plus = 0.0, unweighted_cost_minus = 0.0;
  double nu = 0.0;
};

namespace detail {

inline Vec4 critical_residual(const Vec4& y, const Vec4& q, const Vec4& lam, double s) {
  Vec4 e;
  for (int i = 0; i < 4; ++i) e(i) = s * q(i) * y(i) / (lam(i) - s * q(i));
  return e;
}

}  // namespace detail

// Solves min sum_i lambda_i eps_i^2 over corrections landing on the
// constraint set sum_i q_i (y_i + eps_i)^2 = 0, for the structured weights
// lambda = (a1, nu a1, a2, nu a2). Critical points are eps_i = s q_i y_i /
// (lambda_i - s q_i) with s a root of A s^2 + B s + C.
//
// Numerics: sqrt(Delta) is taken through the factorization 2 nu (nu+1)
// sqrt(delta) (no cancellation), the quadratic is solved via the
// larger-magnitude intermediate q_s = -(B + sign(B) sqrt(Delta))/2 with roots
// {q_s/A, C/q_s}, and the +/- labels are assigned by comparing weighted
// costs rather than trusting a sign convention. The roots never collide with
// the poles s = 1, s = -nu: the numerator values there are (1+nu)^2 u and
// nu^2 (1+nu)^2 v, both bounded away from zero whenever delta = u v is.
inline WeightedSolution solve_weighted(const Vec4& y, double a1, double a2, double nu) {
  const QuadraticData d = quadratic_data(y, a1, a2, nu);
  // delta = u v scales like (a ||y||^2)^2; the test must be scale-free in
  // both a and y or image-sized coordinates trip it spuriously.
  const double uv_scale = std::max(a1, a2) * y.squaredNorm();
  if (d.delta <= 1e-14 * uv_scale * uv_scale)
    throw Error(ErrorCode::DegenerateData,
                "an epipolar half of the residual vanishes; weighted critical points degenerate");

  const Vec4 q(a1, -a1, a2, -a2);
  const Vec4 lam(a1, nu * a1, a2, nu * a2);

  WeightedSolution out;
  out.nu = nu;

  const auto fill = [&](double s, bool plus) {
    Vec4 e;
    double wc, uc;
    if (std::isinf(s)) {
      // The escaped critical point: eps_i -> -y_i as |s| -> inf.
      e = -y;
    } else {
      e = detail::critical_residual(y, q, lam, s);
    }
    wc = lam.dot(e.cwiseProduct(e));
    uc = e.squaredNorm();
    if (plus) {
      out.s_plus = s;
      out.eps_plus = e;
      out.weighted_cost_plus = wc;
      out.unweighted_cost_plus = uc;
    } else {
      out.s_minus = s;
      out.eps_minus = e;
      out.weighted_cost_minus = wc;
      out.unweighted_cost_minus = uc;
    }
    return wc;
  };

  if (std::abs(d.A) < 1e-12 * (std::abs(d.B) + std::abs(d.C))) {
    // Quadratic degenerates to linear; B = 2 nu (u + nu v) > 0 here since
    // delta > 0. The finite root is the minimizer, the other escapes.
    fill(-d.C / d.B, /*plus=*/true);
    const double inf = std::numeric_limits<double>::infinity();
    fill(d.A >= 0.0 ? -inf : inf, /*plus=*/false);
    return out;
  }

  const double sqrt_delta = 2.0 * nu * (nu + 1.0) * std::sqrt(d.delta);
  const double qs = -0.5 * (d.B + std::copysign(sqrt_delta, d.B));
  const double r0 = qs / d.A;
  const double r1 = d.C / qs;
  const double w0 = fill(r0, /*plus=*/true);
  const double w1 = fill(r1, /*plus=*/false);
  if (w1 < w0) {
    std::swap(out.s_plus, out.s_minus);
    std::swap(out.eps_plus, out.eps_minus);
    std::swap(out.weighted_cost_plus, out.weighted_cost_minus);
    std::swap(out.unweighted_cost_plus, out.unweighted_cost_minus);
  }
  return out;
}

// The unique weight ratio nu* = T/S at which the weighted minimizer is
// stationary for the *unweighted* error as well.
inline double optimal_nu(const Vec4& y, double a1, double a2) {
  const QuadraticData d = quadratic_data(y, a1, a2, 1.0);
  const double tol = 1e-14 * std::max(a1, a2) * y.squaredNorm() * y.squaredNorm();
  if (d.S <= tol || d.T <= tol)
    throw Error(ErrorCode::DegenerateData, "nu* = T/S undefined: S or T vanishes");
  return d.T / d.S;
}

// Full pipeline: diagonalize, solve with nu*, map the minimizing residual
// back to image coordinates.
inline TriangulationResult triangulate_weighted(const FundamentalMatrix& f,
                                                const Correspondence& c) {
  const DiagonalizedProblem d = diagonalize(f);
  const Vec4 x = c.stacked();
  const Vec4 y = d.to_local(x);
  const double nu = optimal_nu(y, d.a1, d.a2);
  const WeightedSolution sol = solve_weighted(y, d.a1, d.a2, nu);
  const Vec4 xhat = x + d.rotate_residual(sol.eps_plus);

  TriangulationResult r;
  r.corrected = Correspondence::from_stacked(xhat);
  r.corrected.gt1 = c.gt1;
  r.corrected.gt2 = c.gt2;
  r.cost2d = (xhat - x).squaredNorm();
  r.method_tag = MethodTag::Weighted;
  return r;
}

}  // namespace epiquad
