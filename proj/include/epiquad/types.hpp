#pragma once

#include <Eigen/Core>

#include <optional>

namespace epiquad {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Mat34 = Eigen::Matrix<double, 3, 4>;

// A measured image-point pair, optionally with the noiseless ground-truth
// projections it was perturbed from (synthetic data carries them; external
// match files may omit them).
struct Correspondence {
  Vec2 x1 = Vec2::Zero();
  Vec2 x2 = Vec2::Zero();
  std::optional<Vec2> gt1;
  std::optional<Vec2> gt2;

  // The two points stacked into the 4D vector the solvers operate on.
  Vec4 stacked() const {
    Vec4 x;
    x << x1, x2;
    return x;
  }

  std::optional<Vec4> gt_stacked() const {
    if (!gt1 || !gt2) return std::nullopt;
    Vec4 g;
    g << *gt1, *gt2;
    return g;
  }

  static Correspondence from_stacked(const Vec4& x) {
    Correspondence c;
    c.x1 = x.head<2>();
    c.x2 = x.tail<2>();
    return c;
  }
};

inline Vec3 homogeneous(const Vec2& x) { return Vec3(x.x(), x.y(), 1.0); }

enum class MethodTag { Weighted, Exact, Sampson, Lindstrom, Midpoint, DLT };

inline const char* method_name(MethodTag m) {
  switch (m) {
    case MethodTag::Weighted: return "weighted";
    case MethodTag::Exact: return "exact";
    case MethodTag::Sampson: return "sampson";
    case MethodTag::Lindstrom: return "lindstrom";
    case MethodTag::Midpoint: return "midpoint";
    case MethodTag::DLT: return "dlt";
  }
  return "unknown";
}

// What every triangulation/correction method returns: the corrected pair,
// optionally a 3D point (methods that go through space), and the squared 2D
// displacement from the measurement.
struct TriangulationResult {
  Correspondence corrected;
  std::optional<Vec3> point3d;
  double cost2d = 0.0;  // ||xhat - xtilde||^2 over both images
  MethodTag method_tag = MethodTag::Weighted;
};

}  // namespace epiquad
