#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>

#include "epiquad/errors.hpp"
#include "epiquad/fundamental.hpp"
#include "epiquad/types.hpp"

namespace epiquad {

// The epipolar constraint after recentering at the kernel point and rotating
// into the eigenbasis of P(F):
//
//   (x1;1)^T F (x2;1) = sum_i q_i y_i^2,   y = basis^T (x - kernel),
//
// with q = (a1, -a1, a2, -a2) and a1 >= a2 > 0 half the singular values of
// F22. The map to local coordinates is an isometry, so distances (and hence
// every cost in this library) are preserved both ways.
struct DiagonalizedProblem {
  double a1 = 0.0;
  double a2 = 0.0;
  Vec4 kernel = Vec4::Zero();  // k(F) = (-F22^-T Fv^T; -F22^-1 Fh), the two epipoles stacked
  Mat4 basis = Mat4::Identity();

  Vec4 q() const { return Vec4(a1, -a1, a2, -a2); }

  Vec4 to_local(const Vec4& x) const { return basis.transpose() * (x - kernel); }
  Vec4 from_local(const Vec4& y) const { return basis * y + kernel; }

  // Residuals transform without the recentering: from_local(y + e) - from_local(y).
  Vec4 rotate_residual(const Vec4& e) const { return basis * e; }
};

// sum_i q_i y_i^2 = a1 (y1^2 - y2^2) + a2 (y3^2 - y4^2).
inline double constraint_value(const Vec4& q, const Vec4& y) {
  return q.dot(y.cwiseProduct(y));
}

// Diagonalizes the epipolar constraint of f.
//
// P(F) = 1/2 [0 F22; F22^T 0] has eigenpairs built from the SVD
// F22 = U diag(s) V^T: the columns (u_i; +-v_i)/sqrt(2) carry eigenvalues
// +-s_i/2. Columns are ordered to match q = (a1, -a1, a2, -a2) and each is
// sign-fixed (first nonzero entry positive) so the basis is reproducible.
inline DiagonalizedProblem diagonalize(const FundamentalMatrix& f) {
  const Mat2 f22 = f.f22();
  if (std::abs(f22.determinant()) <= 1e-12 * f22.squaredNorm())
    throw Error(ErrorCode::SingularF22, "F22 is singular (epipole at infinity)");

  DiagonalizedProblem d;
  const Eigen::PartialPivLU<Mat2> lu(f22);
  d.kernel.head<2>() = -f22.transpose().partialPivLu().solve(f.fv().transpose());
  d.kernel.tail<2>() = -lu.solve(f.fh());

  Eigen::JacobiSVD<Mat2> svd(f22, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat2 u = svd.matrixU();
  const Mat2 v = svd.matrixV();
  d.a1 = 0.5 * svd.singularValues()(0);
  d.a2 = 0.5 * svd.singularValues()(1);

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < 2; ++i) {
    d.basis.col(2 * i).head<2>() = u.col(i) * inv_sqrt2;
    d.basis.col(2 * i).tail<2>() = v.col(i) * inv_sqrt2;
    d.basis.col(2 * i + 1).head<2>() = u.col(i) * inv_sqrt2;
    d.basis.col(2 * i + 1).tail<2>() = -v.col(i) * inv_sqrt2;
  }
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 4; ++i) {
      if (std::abs(d.basis(i, j)) > 1e-12) {
        if (d.basis(i, j) < 0.0) d.basis.col(j) = -d.basis.col(j);
        break;
      }
    }
  }
  return d;
}

}  // namespace epiquad
