#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "epiquad/camera.hpp"
#include "epiquad/errors.hpp"
#include "epiquad/fundamental.hpp"
#include "epiquad/rng.hpp"
#include "epiquad/types.hpp"

namespace epiquad {

// Relative orientation of the second camera. "Parallel axes" rotates about
// the optical axis only, so both image planes stay parallel (the rig family
// for which the weighted and unweighted problems coincide); otherwise an
// axis-angle vector (angle = norm, radians) is applied.
struct RotationSpec {
  bool parallel_axes = false;
  Vec3 axis_angle = Vec3::Zero();

  static RotationSpec parallel() {
    RotationSpec r;
    r.parallel_axes = true;
    return r;
  }
  static RotationSpec from_axis_angle(const Vec3& w) {
    RotationSpec r;
    r.axis_angle = w;
    return r;
  }

  Mat3 rotation() const {
    if (parallel_axes)
      return Eigen::AngleAxisd(0.15, Vec3::UnitZ()).toRotationMatrix();
    const double angle = axis_angle.norm();
    if (angle == 0.0) return Mat3::Identity();
    return Eigen::AngleAxisd(angle, Vec3(axis_angle / angle)).toRotationMatrix();
  }
};

struct SceneConfig {
  int n_points = 200;
  // Camera-2 center at baseline * (0.8, 0, 0.6). The forward component keeps
  // the epipoles finite: a purely sideways stereo pair has a zero upper-left
  // epipolar block, which the quadric solvers cannot diagonalize.
  double baseline = 1.0;
  RotationSpec rotation;
  double noise_sigma = 1.0;  // gaussian pixel noise per image coordinate
  std::uint64_t seed = 1;
  double image_size = 1000.0;  // square image, principal point at the center
};

struct Scene {
  CameraMatrix camera1;
  CameraMatrix camera2;
  FundamentalMatrix fundamental;
  std::vector<Correspondence> matches;
};

namespace detail {

inline bool in_image(const Vec2& p, double size) {
  return p.x() >= 0.0 && p.x() <= size && p.y() >= 0.0 && p.y() <= size;
}

}  // namespace detail

// Random scene: 3D points uniform over the part of camera 1's frustum that is
// also visible in camera 2, projected through both cameras, with independent
// Gaussian pixel noise. Every point gets its own RNG substream, so the
// configuration of point i does not depend on how many attempts point i-1
// needed, and runs are bit-reproducible for a fixed seed.
inline Scene synth_scene(const SceneConfig& cfg) {
  if (cfg.n_points <= 0 || cfg.baseline <= 0.0 || cfg.noise_sigma < 0.0 ||
      cfg.image_size <= 0.0)
    throw Error(ErrorCode::InvalidInput, "scene config out of range");

  const double s = cfg.image_size;
  Mat3 k = Mat3::Identity();
  k(0, 0) = k(1, 1) = 1.2 * s;
  k(0, 2) = k(1, 2) = 0.5 * s;

  const Mat3 r = cfg.rotation.rotation();
  const Vec3 c2 = cfg.baseline * Vec3(0.8, 0.0, 0.6);
  Mat34 p1;
  p1 << Mat3::Identity(), Vec3::Zero();
  Mat34 p2;
  p2 << r, -r * c2;
  const CameraMatrix cam1(Mat34(k * p1));
  const CameraMatrix cam2(Mat34(k * p2));
  const FundamentalMatrix f = fundamental_from_cameras(cam1, cam2);

  const Mat3 k_inv = k.inverse();
  std::vector<Correspondence> matches;
  matches.reserve(static_cast<std::size_t>(cfg.n_points));
  for (int i = 0; i < cfg.n_points; ++i) {
    RandomStream rng = RandomStream::substream(cfg.seed, static_cast<std::uint64_t>(i));
    for (int attempt = 0; attempt < 256; ++attempt) {
      // A point on a random camera-1 ray (margin keeps the noiseless
      // projection strictly inside the first image).
      const Vec2 pix(rng.uniform(0.15 * s, 0.85 * s), rng.uniform(0.15 * s, 0.85 * s));
      const double depth = rng.uniform(4.0, 12.0) * cfg.baseline;
      const Vec3 x = depth * (k_inv * homogeneous(pix));
      if (cam2.depth(x) <= 0.0) continue;
      const Vec2 g1 = cam1.project(x);
      const Vec2 g2 = cam2.project(x);
      if (!detail::in_image(g2, s)) continue;

      Correspondence c;
      c.gt1 = g1;
      c.gt2 = g2;
      c.x1 = g1 + Vec2(rng.gaussian(cfg.noise_sigma), rng.gaussian(cfg.noise_sigma));
      c.x2 = g2 + Vec2(rng.gaussian(cfg.noise_sigma), rng.gaussian(cfg.noise_sigma));
      matches.push_back(c);
      break;
    }
  }
  if (matches.empty())
    throw Error(ErrorCode::EmptyScene, "no generated point is visible in both views");
  return Scene{cam1, cam2, f, std::move(matches)};
}

// Camera pair [I|0], [R|t] whose fundamental matrix has exactly the given
// upper-left 2x2 block (up to overall scale). Construction: complete the two
// rows of [[0,-1],[1,0]] * block^T to equal-norm orthogonal 3-vectors r1, r2
// by choosing third components v1, v2 with v1 v2 = -<M0,M1> and
// v1^2 - v2^2 = |M1|^2 - |M0|^2; then R stacks r1/|r1|, r2/|r2|, and their
// cross product, with translation |r1| along the optical axis. One can check
// that the upper-left block of R^T [t]x reproduces the input.
inline std::pair<CameraMatrix, CameraMatrix> rig_for_f22(const Mat2& block) {
  Mat2 j;
  j << 0.0, -1.0, 1.0, 0.0;
  const Mat2 m = j * block.transpose();
  const double p = m.row(0).dot(m.row(1));
  const double d = m.row(1).squaredNorm() - m.row(0).squaredNorm();
  // v1^2 is the positive root of z^2 - d z - p^2 = 0; take whichever form of
  // the quadratic formula avoids cancellation for the sign of d.
  const double h = std::hypot(d, 2.0 * p);
  const double v1 = std::sqrt(d >= 0.0 ? 0.5 * (d + h) : (2.0 * p * p) / (h - d));
  const double v2 = v1 > 0.0 ? -p / v1 : std::sqrt(std::max(0.0, -d));

  const Vec3 r1(m(0, 0), m(0, 1), v1);
  const Vec3 r2(m(1, 0), m(1, 1), v2);
  const double t3 = r1.norm();
  if (t3 <= 1e-12 * (1.0 + block.norm()))
    throw Error(ErrorCode::InvalidInput, "epipolar block too close to zero for a rig");
  Mat3 r;
  r.row(0) = r1 / t3;
  r.row(1) = r2 / t3;
  r.row(2) = r1.cross(r2) / (t3 * t3);

  Mat34 p1;
  p1 << Mat3::Identity(), Vec3::Zero();
  Mat34 p2;
  p2 << r, Vec3(0.0, 0.0, t3);
  return {CameraMatrix(p1), CameraMatrix(p2)};
}

// Scene around a rig with a prescribed epipolar-block singular-value ratio
// (block diag(ratio^2, 1), so sqrt(max a / min a) = ratio exactly). Both
// cameras get the same isotropic pixel calibration, which rescales the
// epipolar block uniformly and therefore preserves the ratio. Points are
// sampled on camera-1 rays away from both epipoles, where corrections stay
// well conditioned; noise is in pixels.
inline Scene ratio_rig_scene(double ratio, int n_points, double noise_sigma,
                             std::uint64_t seed) {
  if (!(ratio >= 1.0) || n_points <= 0 || noise_sigma < 0.0)
    throw Error(ErrorCode::InvalidInput, "rig scene parameters out of range");

  const auto [base1, base2] = rig_for_f22(Mat2(Vec2(ratio * ratio, 1.0).asDiagonal()));
  const double s = 1000.0;
  Mat3 k = Mat3::Identity();
  k(0, 0) = k(1, 1) = 1.2 * s;
  k(0, 2) = k(1, 2) = 0.5 * s;
  const CameraMatrix cam1(Mat34(k * base1.entries));
  const CameraMatrix cam2(Mat34(k * base2.entries));
  const FundamentalMatrix f = fundamental_from_cameras(cam1, cam2);

  // Dehomogenized epipoles (if finite): null vectors of F and F^T.
  Eigen::JacobiSVD<Mat3> svd(f.matrix(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 e1h = svd.matrixU().col(2);
  const Vec3 e2h = svd.matrixV().col(2);
  const auto far_from = [](const Vec3& eh, const Vec2& x, double min_dist) {
    if (std::abs(eh(2)) <= 1e-12 * eh.norm()) return true;  // epipole at infinity
    return (x - Vec2(eh.head<2>() / eh(2))).norm() >= min_dist;
  };

  const double scale = cam1.center().norm() + cam2.center().norm();  // rig extent
  const Mat3 k_inv = k.inverse();
  std::vector<Correspondence> matches;
  matches.reserve(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    RandomStream rng = RandomStream::substream(seed, static_cast<std::uint64_t>(i));
    for (int attempt = 0; attempt < 256; ++attempt) {
      const Vec2 pix(rng.uniform(0.15 * s, 0.85 * s), rng.uniform(0.15 * s, 0.85 * s));
      const double depth = rng.uniform(2.0, 6.0) * scale;
      const Vec3 x = depth * (k_inv * homogeneous(pix));
      if (cam2.depth(x) <= 0.05 * scale) continue;
      const Vec2 g1 = cam1.project(x);
      const Vec2 g2 = cam2.project(x);
      if (!far_from(e1h, g1, 0.1 * s) || !far_from(e2h, g2, 0.1 * s)) continue;

      Correspondence c;
      c.gt1 = g1;
      c.gt2 = g2;
      c.x1 = g1 + Vec2(rng.gaussian(noise_sigma), rng.gaussian(noise_sigma));
      c.x2 = g2 + Vec2(rng.gaussian(noise_sigma), rng.gaussian(noise_sigma));
      matches.push_back(c);
      break;
    }
  }
  if (matches.empty())
    throw Error(ErrorCode::EmptyScene, "no generated point is visible in both views");
  return Scene{cam1, cam2, f, std::move(matches)};
}

}  // namespace epiquad
