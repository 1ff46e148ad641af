#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>

#include "epiquad/camera.hpp"
#include "epiquad/errors.hpp"
#include "epiquad/fundamental.hpp"
#include "epiquad/types.hpp"

namespace epiquad {

namespace detail {

inline TriangulationResult make_result(const Correspondence& input, const Vec4& corrected,
                                       MethodTag tag) {
  TriangulationResult r;
  r.corrected = Correspondence::from_stacked(corrected);
  r.corrected.gt1 = input.gt1;
  r.corrected.gt2 = input.gt2;
  r.cost2d = (corrected - input.stacked()).squaredNorm();
  r.method_tag = tag;
  return r;
}

}  // namespace detail

// First-order (Sampson) correction: one Newton step of the constraint along
// its gradient, x_hat = x - g/||grad g||^2 * grad g, with the gradient taken
// in the four image coordinates:
//   d g / d x1 = (F (x2;1))_{1:2},   d g / d x2 = (F^T (x1;1))_{1:2}.
// The displacement norm |g|/||grad g|| is the Sampson error; cost2d is its
// square.
inline TriangulationResult sampson_correct(const FundamentalMatrix& f,
                                           const Correspondence& c) {
  const Vec4 x = c.stacked();
  const double g = f.residual(x);
  Vec4 grad;
  grad.head<2>() = (f.matrix() * homogeneous(c.x2)).head<2>();
  grad.tail<2>() = (f.matrix().transpose() * homogeneous(c.x1)).head<2>();
  const double gg = grad.squaredNorm();
  if (gg <= 1e-24 * (1.0 + x.squaredNorm()))
    throw Error(ErrorCode::ZeroGradient, "constraint gradient vanishes at the measurement");
  return detail::make_result(c, x - (g / gg) * grad, MethodTag::Sampson);
}

// Lindstrom-style two-iteration correction ("niter2"). Each iteration picks
// the correction along the current direction pair (n, n') that lands exactly
// on the constraint: with E = S F S^T, the residual after the update
// x - lambda S^T n, x' - lambda S^T n' is
//
//   a lambda^2 - 2 b lambda + c,  a = n^T E n', b = (n.n0 + n'.n0')/2,
//   c = (x;1)^T F (x';1),
//
// whose stable small root is lambda = c / (b + sign(b) sqrt(b^2 - a c)).
// The direction pair starts at the constraint gradient halves n0 = S F x',
// n0' = S F^T x and is refreshed once at the corrected point; the final
// correction is applied to the original measurement. Feasibility after two
// iterations is exact up to roundoff; optimality is not guaranteed.
inline TriangulationResult lindstrom_niter2(const FundamentalMatrix& f,
                                            const Correspondence& c) {
  const Mat3& fm = f.matrix();
  const Mat2 e = fm.topLeftCorner<2, 2>();
  const Vec3 x1h = homogeneous(c.x1);
  const Vec3 x2h = homogeneous(c.x2);
  const Vec2 n0 = (fm * x2h).head<2>();
  const Vec2 n0p = (fm.transpose() * x1h).head<2>();
  const double cc = x1h.dot(fm * x2h);

  Vec2 n = n0, np = n0p;
  double lambda = 0.0;
  for (int iter = 0; iter < 2; ++iter) {
    const double a = n.dot(e * np);
    const double b = 0.5 * (n.dot(n0) + np.dot(n0p));
    double disc = b * b - a * cc;
    if (disc < 0.0) {
      if (disc < -1e-9 * std::max(b * b, std::abs(a * cc)))
        throw Error(ErrorCode::NumericalBreakdown,
                    "no feasible correction along the update direction");
      disc = 0.0;
    }
    const double denom = b + std::copysign(std::sqrt(disc), b);
    if (denom == 0.0)
      throw Error(ErrorCode::NumericalBreakdown, "vanishing update direction (at an epipole?)");
    lambda = cc / denom;
    if (iter == 0) {
      n = n0 - e * (lambda * n0p);
      np = n0p - e.transpose() * (lambda * n0);
    }
  }

  Vec4 corrected;
  corrected.head<2>() = c.x1 - lambda * n;
  corrected.tail<2>() = c.x2 - lambda * np;
  return detail::make_result(c, corrected, MethodTag::Lindstrom);
}

// Homogeneous linear triangulation of a (constraint-satisfying) pair: the
// 4x4 system stacking x*(row3) - row1, y*(row3) - row2 for both cameras,
// solved by SVD. Rows are normalized for conditioning. For an exactly
// feasible pair the rays meet and the null vector is the intersection.
inline Vec3 recover_point(const CameraMatrix& c1, const CameraMatrix& c2,
                          const Correspondence& corrected) {
  Mat4 a;
  a.row(0) = corrected.x1.x() * c1.entries.row(2) - c1.entries.row(0);
  a.row(1) = corrected.x1.y() * c1.entries.row(2) - c1.entries.row(1);
  a.row(2) = corrected.x2.x() * c2.entries.row(2) - c2.entries.row(0);
  a.row(3) = corrected.x2.y() * c2.entries.row(2) - c2.entries.row(1);
  for (int i = 0; i < 4; ++i) {
    const double n = a.row(i).norm();
    if (n > 0.0) a.row(i) /= n;
  }
  Eigen::JacobiSVD<Mat4> svd(a, Eigen::ComputeFullV);
  const Vec4 xh = svd.matrixV().col(3);
  if (std::abs(xh(3)) <= 1e-10 * xh.norm())
    throw Error(ErrorCode::PointAtInfinity, "triangulated point is (numerically) at infinity");
  return xh.head<3>() / xh(3);
}

// Midpoint of the common perpendicular of the two viewing rays. A quality
// foil, not a recommended method: it ignores the epipolar constraint and
// fails for (nearly) parallel rays.
inline TriangulationResult midpoint_triangulate(const CameraMatrix& c1, const CameraMatrix& c2,
                                                const Correspondence& c) {
  const Vec3 o1 = c1.center();
  const Vec3 o2 = c2.center();
  const Vec3 d1 = c1.entries.leftCols<3>().partialPivLu().solve(homogeneous(c.x1));
  const Vec3 d2 = c2.entries.leftCols<3>().partialPivLu().solve(homogeneous(c.x2));
  if (d1.cross(d2).norm() <= 1e-12 * d1.norm() * d2.norm())
    throw Error(ErrorCode::ParallelRays, "viewing rays are (nearly) parallel");

  // Closest points: minimize ||o1 + t1 d1 - o2 - t2 d2|| via the 2x2 normal
  // equations of the two ray parameters.
  Mat2 g;
  g << d1.dot(d1), -d1.dot(d2), -d1.dot(d2), d2.dot(d2);
  const Vec3 w = o2 - o1;
  const Vec2 rhs(d1.dot(w), -d2.dot(w));
  const Vec2 t = g.partialPivLu().solve(rhs);
  const Vec3 x = 0.5 * ((o1 + t(0) * d1) + (o2 + t(1) * d2));

  Vec4 corrected;
  corrected.head<2>() = c1.project(x);
  corrected.tail<2>() = c2.project(x);
  TriangulationResult r = detail::make_result(c, corrected, MethodTag::Midpoint);
  r.point3d = x;
  return r;
}

// Plain linear (DLT) triangulation from the measured pair, preceded by the
// standard per-image normalization (translate the point to the origin, scale
// boundedly) applied to the cameras. The returned corrected pair is the
// reprojection of the linear estimate.
inline TriangulationResult dlt_triangulate(const CameraMatrix& c1, const CameraMatrix& c2,
                                           const Correspondence& c) {
  const auto normalizer = [](const Vec2& x) {
    Mat3 t = Mat3::Identity();
    const double s = std::sqrt(2.0) / std::max(1.0, x.norm());
    t(0, 0) = t(1, 1) = s;
    t.topRightCorner<2, 1>() = -s * x;
    return t;
  };
  const Mat3 t1 = normalizer(c.x1);
  const Mat3 t2 = normalizer(c.x2);
  CameraMatrix n1(Mat34(t1 * c1.entries));
  CameraMatrix n2(Mat34(t2 * c2.entries));
  Correspondence cn;
  cn.x1 = (t1 * homogeneous(c.x1)).head<2>();
  cn.x2 = (t2 * homogeneous(c.x2)).head<2>();
  const Vec3 x = recover_point(n1, n2, cn);

  Vec4 corrected;
  corrected.head<2>() = c1.project(x);
  corrected.tail<2>() = c2.project(x);
  TriangulationResult r = detail::make_result(c, corrected, MethodTag::DLT);
  r.point3d = x;
  return r;
}

}  // namespace epiquad
