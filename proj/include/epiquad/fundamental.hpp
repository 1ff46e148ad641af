#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>

#include "epiquad/errors.hpp"
#include "epiquad/types.hpp"

namespace epiquad {

// Builds the 5x5 symmetric matrix Q whose quadratic form in (x1, x2, 1)
// reproduces the epipolar residual:
//
//   (x;1)^T Q (x;1) = (x1;1)^T F (x2;1),   x = (x1; x2) in R^4.
//
// Q = 1/2 [ 0     F22  Fh  ]
//         [ F22^T 0    Fv^T]
//         [ Fh^T  Fv   2*F33]
//
// Defined for any 3x3 matrix; no rank condition is needed for the identity.
inline Mat5 build_q(const Mat3& f) {
  Mat5 q = Mat5::Zero();
  const Mat2 f22 = f.topLeftCorner<2, 2>();
  const Vec2 fh = f.topRightCorner<2, 1>();
  const Eigen::RowVector2d fv = f.bottomLeftCorner<1, 2>();
  q.block<2, 2>(0, 2) = f22;
  q.block<2, 2>(2, 0) = f22.transpose();
  q.block<2, 1>(0, 4) = fh;
  q.block<1, 2>(4, 0) = fh.transpose();
  q.block<2, 1>(2, 4) = fv.transpose();
  q.block<1, 2>(4, 2) = fv;
  q(4, 4) = 2.0 * f(2, 2);
  return 0.5 * q;
}

// The top-left 4x4 block of Q: the quadratic part of the epipolar residual
// in stacked image coordinates.
inline Mat4 build_p(const Mat3& f) {
  return build_q(f).topLeftCorner<4, 4>();
}

// A rank-2 fundamental matrix with the block partition
//
//   F = [ F22  Fh ]     F22: 2x2,  Fh: 2x1,  Fv: 1x2,  F33: scalar.
//       [ Fv   F33]
//
// Convention: a correspondence (x1, x2) is consistent with F iff
// (x1;1)^T F (x2;1) = 0, i.e. x1 lives in the first image.
//
// The stored matrix is normalized to unit Frobenius norm on construction so
// that all downstream tolerances are scale-free.
class FundamentalMatrix {
 public:
  explicit FundamentalMatrix(const Mat3& f, double rank_tol = 1e-8) {
    const double norm = f.norm();
    if (!(norm > 0.0) || !f.allFinite())
      throw Error(ErrorCode::InvalidInput, "fundamental matrix must be finite and nonzero");
    f_ = f / norm;
    if (std::abs(f_.determinant()) > rank_tol)
      throw Error(ErrorCode::InvalidInput, "fundamental matrix must have rank 2");
  }

  const Mat3& matrix() const { return f_; }

  Mat2 f22() const { return f_.topLeftCorner<2, 2>(); }
  Vec2 fh() const { return f_.topRightCorner<2, 1>(); }
  Eigen::RowVector2d fv() const { return f_.bottomLeftCorner<1, 2>(); }
  double f33() const { return f_(2, 2); }

  Mat5 q() const { return build_q(f_); }
  Mat4 p() const { return build_p(f_); }

  // Epipolar residual g(x) = (x1;1)^T F (x2;1).
  double residual(const Vec2& x1, const Vec2& x2) const {
    return homogeneous(x1).dot(f_ * homogeneous(x2));
  }
  double residual(const Vec4& x) const { return residual(x.head<2>(), x.tail<2>()); }

 private:
  Mat3 f_;
};

// Nearest rank-2 matrix in Frobenius norm (zero the smallest singular value).
// Convenience for callers holding an estimated, slightly full-rank F.
inline Mat3 project_to_rank2(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vec3 s = svd.singularValues();
  s(2) = 0.0;
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

}  // namespace epiquad
