#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>

#include "epiquad/errors.hpp"
#include "epiquad/fundamental.hpp"
#include "epiquad/types.hpp"

namespace epiquad {

// A full-rank 3x4 projective camera. calibrated_flag marks cameras of the
// form [R | t] with R a rotation; a few geometric constructions (parallel-axes
// rigs, midpoint angles) are only meaningful for those.
struct CameraMatrix {
  Mat34 entries = Mat34::Zero();
  bool calibrated_flag = false;

  CameraMatrix() = default;

  explicit CameraMatrix(const Mat34& m, bool calibrated = false)
      : entries(m), calibrated_flag(calibrated) {
    if (!m.allFinite()) throw Error(ErrorCode::InvalidInput, "camera has non-finite entries");
    Eigen::JacobiSVD<Mat34> svd(m);
    const Vec3 s = svd.singularValues();
    if (!(s(2) > 1e-12 * s(0)))
      throw Error(ErrorCode::InvalidInput, "camera matrix must have rank 3");
    if (calibrated) {
      const Mat3 r = m.leftCols<3>();
      if ((r.transpose() * r - Mat3::Identity()).norm() > 1e-9 || r.determinant() < 0.0)
        throw Error(ErrorCode::InvalidInput, "calibrated camera requires a rotation block");
    }
  }

  static CameraMatrix calibrated(const Mat3& r, const Vec3& t) {
    Mat34 m;
    m << r, t;
    return CameraMatrix(m, /*calibrated=*/true);
  }

  // Homogeneous camera center: the 1D null space of the 3x4 matrix.
  // w = 0 means an affine camera (center at infinity).
  Eigen::Vector4d center_homogeneous() const {
    Eigen::JacobiSVD<Mat34> svd(entries, Eigen::ComputeFullV);
    return svd.matrixV().col(3);
  }

  // Affine center; requires a finite center.
  Vec3 center() const {
    const Eigen::Vector4d c = center_homogeneous();
    if (std::abs(c(3)) < 1e-12 * c.norm())
      throw Error(ErrorCode::PointAtInfinity, "camera center is at infinity");
    return c.head<3>() / c(3);
  }

  // Signed depth of X along the principal ray (positive = in front) and the
  // affine projection. project throws only for points on the principal plane.
  double depth(const Vec3& x) const {
    return entries.row(2).head<3>().dot(x) + entries(2, 3);
  }

  Vec2 project(const Vec3& x) const {
    const Vec3 h = entries * x.homogeneous();
    if (std::abs(h(2)) < 1e-14 * h.norm())
      throw Error(ErrorCode::PointAtInfinity, "projection lies on the plane at infinity");
    return h.head<2>() / h(2);
  }
};

inline Mat3 cross_matrix(const Vec3& t) {
  Mat3 m;
  m << 0, -t.z(), t.y(), t.z(), 0, -t.x(), -t.y(), t.x(), 0;
  return m;
}

// Fundamental matrix of a camera pair, in this library's convention
// (x1;1)^T F (x2;1) = 0 with x1 from c1.
//
// Built as the transpose of the classical [e2]_x P2 P1^+ (which pairs the
// images the other way round). For calibrated pairs C1 = [I|0], C2 = [R|t]
// the result is proportional to R^T [t]_x. The overall sign/scale of F is
// projectively meaningless; the constructor normalizes the norm and we fix
// the sign deterministically (largest-magnitude entry positive) so identical
// inputs serialize identically.
inline FundamentalMatrix fundamental_from_cameras(const CameraMatrix& c1,
                                                  const CameraMatrix& c2) {
  const Eigen::Vector4d z1 = c1.center_homogeneous();
  const Eigen::Vector4d z2 = c2.center_homogeneous();
  // Coincident centers (as projective points) leave F undefined.
  const double cosang = std::abs(z1.normalized().dot(z2.normalized()));
  if (cosang > 1.0 - 1e-12)
    throw Error(ErrorCode::CoincidentCenters, "camera centers coincide; no epipolar geometry");

  const Vec3 e2 = c2.entries * z1;  // epipole of camera 1's center in image 2
  const Mat34 p1 = c1.entries;
  const Eigen::Matrix<double, 4, 3> p1_pinv =
      p1.transpose() * (p1 * p1.transpose()).inverse();
  Mat3 f = (cross_matrix(e2) * c2.entries * p1_pinv).transpose();

  const double norm = f.norm();
  if (!(norm > 1e-14))
    throw Error(ErrorCode::CoincidentCenters, "degenerate pair produced a zero F");
  f /= norm;

  // Deterministic sign: make the entry of largest magnitude positive.
  int r = 0, c = 0;
  f.cwiseAbs().maxCoeff(&r, &c);
  if (f(r, c) < 0.0) f = -f;
  return FundamentalMatrix(f);
}

}  // namespace epiquad
