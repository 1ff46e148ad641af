#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstddef>
#include <vector>

#include "epiquad/errors.hpp"

namespace epiquad {

// Dense real polynomials with ascending coefficients: p[k] multiplies s^k.
// Degrees here never exceed 6, so simplicity beats asymptotics throughout.
using Poly = std::vector<double>;

inline double poly_eval(const Poly& p, double s) {
  double acc = 0.0;
  for (size_t i = p.size(); i-- > 0;) acc = acc * s + p[i];
  return acc;
}

inline Poly poly_derivative(const Poly& p) {
  if (p.size() <= 1) return {0.0};
  Poly d(p.size() - 1);
  for (size_t i = 1; i < p.size(); ++i) d[i - 1] = static_cast<double>(i) * p[i];
  return d;
}

// p(s) *= (c0 + c1 s).
inline void poly_mul_linear(Poly& p, double c0, double c1) {
  p.push_back(0.0);
  for (size_t i = p.size(); i-- > 1;) p[i] = p[i] * c0 + p[i - 1] * c1;
  p[0] *= c0;
}

// Divides p by (c0 + c1 s), c1 != 0. Returns the quotient and stores the
// scalar remainder (p = (c0 + c1 s) * quotient + remainder).
inline Poly poly_div_linear(const Poly& p, double c0, double c1, double* remainder) {
  const size_t n = p.size();
  Poly quot(n - 1, 0.0);
  double carry = p[n - 1];
  for (size_t i = n - 1; i-- > 0;) {
    quot[i] = carry / c1;
    carry = p[i] - c0 * quot[i];
  }
  *remainder = carry;
  return quot;
}

// Parlett-Reinsch balancing: a diagonal similarity with power-of-two entries
// that equalizes row and column 1-norms. Eigenvalues are unchanged, but the
// QR iteration's accuracy on small eigenvalues improves dramatically when the
// matrix entries span many orders of magnitude (a nearly-vanishing leading
// coefficient does exactly that to a companion matrix).
inline void balance_in_place(Eigen::MatrixXd& m) {
  const long n = m.rows();
  for (bool converged = false; !converged;) {
    converged = true;
    for (long i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (long j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(m(j, i));
        r += std::abs(m(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      const double total = c + r;
      double f = 1.0;
      while (c < 0.5 * r) { c *= 2.0; r *= 0.5; f *= 2.0; }
      while (c >= 2.0 * r) { c *= 0.5; r *= 2.0; f *= 0.5; }
      if (c + r < 0.95 * total) {
        converged = false;
        m.col(i) *= f;
        m.row(i) /= f;
      }
    }
  }
}

// All real roots, via the balanced companion matrix of the monic polynomial
// after a power-style variable scaling (keeps the companion tame for the
// wildly scaled coefficients convolution can produce), followed by a few
// Newton steps against the original coefficients. Complex eigenvalues are
// kept only when |Im| <= im_tol * (1 + |Re|).
inline std::vector<double> poly_real_roots(const Poly& p, double im_tol = 1e-8) {
  // Trim trailing zeros defensively; callers deflate before getting here.
  size_t n = p.size();
  double maxc = 0.0;
  for (double c : p) maxc = std::max(maxc, std::abs(c));
  if (maxc == 0.0) throw Error(ErrorCode::VanishingLead, "zero polynomial has no isolated roots");
  while (n > 1 && std::abs(p[n - 1]) <= 1e-14 * maxc) --n;
  const size_t deg = n - 1;

  if (deg == 0) return {};
  if (deg == 1) return {-p[0] / p[1]};

  // Root-radius style scale: s = gamma * u with gamma = max |c_i/c_deg|^(1/(deg-i)).
  double gamma = 0.0;
  for (size_t i = 0; i < deg; ++i) {
    if (p[i] == 0.0) continue;
    gamma = std::max(gamma, std::pow(std::abs(p[i] / p[deg]), 1.0 / double(deg - i)));
  }
  if (gamma == 0.0) gamma = 1.0;

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(long(deg), long(deg));
  double scale = 1.0;  // gamma^(deg - i) / gamma^deg handled incrementally
  std::vector<double> monic(deg);
  for (size_t i = 0; i < deg; ++i) {
    // coefficient of u^i of p(gamma u) / (c_deg gamma^deg) = p_i gamma^(i-deg) / c_deg
    monic[deg - 1 - i] = p[deg - 1 - i] / (p[deg] * scale * gamma);
    scale *= gamma;
  }
  for (size_t i = 0; i + 1 < deg; ++i) companion(long(i) + 1, long(i)) = 1.0;
  for (size_t i = 0; i < deg; ++i) companion(long(i), long(deg) - 1) = -monic[i];
  balance_in_place(companion);

  const Eigen::EigenSolver<Eigen::MatrixXd> es(companion);
  std::vector<double> roots;
  const Poly dp = poly_derivative(p);
  for (long i = 0; i < es.eigenvalues().size(); ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    if (std::abs(z.imag()) > im_tol * (1.0 + std::abs(z.real()))) continue;
    double s = z.real() * gamma;
    // Newton polish on the unscaled polynomial; keep the best iterate seen.
    double best = s, best_val = std::abs(poly_eval(p, s));
    for (int it = 0; it < 4; ++it) {
      const double f = poly_eval(p, s);
      const double g = poly_eval(dp, s);
      if (g == 0.0) break;
      s -= f / g;
      if (!std::isfinite(s)) break;
      const double v = std::abs(poly_eval(p, s));
      if (v < best_val) {
        best = s;
        best_val = v;
      }
    }
    roots.push_back(best);
  }
  return roots;
}

}  // namespace epiquad
