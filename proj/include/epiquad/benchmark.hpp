#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "epiquad/baselines.hpp"
#include "epiquad/bounds.hpp"
#include "epiquad/camera.hpp"
#include "epiquad/critical.hpp"
#include "epiquad/diagonalize.hpp"
#include "epiquad/errors.hpp"
#include "epiquad/fundamental.hpp"
#include "epiquad/io.hpp"
#include "epiquad/rng.hpp"
#include "epiquad/types.hpp"
#include "epiquad/weighted.hpp"

namespace epiquad {

// One correction method applied to one correspondence; 3D recovery is
// attempted for every method so downstream consumers always get a point when
// the geometry allows one.
inline TriangulationResult apply_method(MethodTag method, const FundamentalMatrix& f,
                                        const CameraMatrix& c1, const CameraMatrix& c2,
                                        const Correspondence& c) {
  TriangulationResult r;
  switch (method) {
    case MethodTag::Weighted: r = triangulate_weighted(f, c); break;
    case MethodTag::Exact: r = triangulate_exact(f, c); break;
    case MethodTag::Sampson: r = sampson_correct(f, c); break;
    case MethodTag::Lindstrom: r = lindstrom_niter2(f, c); break;
    case MethodTag::Midpoint: return midpoint_triangulate(c1, c2, c);
    case MethodTag::DLT: return dlt_triangulate(c1, c2, c);
  }
  if (!r.point3d) {
    try {
      r.point3d = recover_point(c1, c2, r.corrected);
    } catch (const Error&) {
      // Corrected pair (numerically) triangulates to infinity; leave unset.
    }
  }
  return r;
}

struct RunRecord {
  std::size_t index = 0;
  MethodTag method = MethodTag::Weighted;
  double cost2d = std::numeric_limits<double>::quiet_NaN();   // squared 2D displacement
  double dist_gt = std::numeric_limits<double>::quiet_NaN();  // distance to gt projections
  double lower = std::numeric_limits<double>::quiet_NaN();
  double best_upper = std::numeric_limits<double>::quiet_NaN();
  double upper = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();
  std::string err;  // empty on success
};

struct MethodSummary {
  MethodTag method = MethodTag::Weighted;
  std::size_t n_ok = 0;
  std::size_t n_failed = 0;
  double mean_dist_meas = 0.0, median_dist_meas = 0.0, p95_dist_meas = 0.0;
  double mean_dist_gt = 0.0, median_dist_gt = 0.0, p95_dist_gt = 0.0;
  double ns_per_call = 0.0;
};

struct MetricsReport {
  std::vector<MethodSummary> methods;
  std::vector<RunRecord> rows;
  // Histogram of the per-correspondence eigenvalue ratio over [1, 4+) in
  // steps of 0.25, last bin open-ended.
  std::array<std::size_t, 13> ratio_histogram{};
  std::size_t bound_violations = 0;
  std::size_t n_correspondences = 0;
};

namespace detail {

inline double percentile(std::vector<double> v, double p) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double idx = p * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(idx);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double w = idx - static_cast<double>(lo);
  return (1.0 - w) * v[lo] + w * v[hi];
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace detail

// Applies each selected method to every correspondence, cross-checks the
// error-bound sandwich (lower <= exact distance <= best_upper <= upper, with
// a small relative slack for roundoff) and writes one CSV row per
// correspondence per method: method,cost2d,dist_gt,lower,best_upper,upper,
// ratio,err. Per-correspondence method failures land in the err column and
// do not abort the run.
inline MetricsReport run_benchmark(const CameraMatrix& c1, const CameraMatrix& c2,
                                   const std::vector<Correspondence>& matches,
                                   const std::vector<MethodTag>& methods,
                                   std::ostream& out) {
  const FundamentalMatrix f = fundamental_from_cameras(c1, c2);

  MetricsReport report;
  report.n_correspondences = matches.size();

  // Method-independent per-correspondence data: bounds and the exact minimal
  // distance used for the sandwich check.
  struct Shared {
    double lower = std::numeric_limits<double>::quiet_NaN();
    double best_upper = std::numeric_limits<double>::quiet_NaN();
    double upper = std::numeric_limits<double>::quiet_NaN();
    double ratio = std::numeric_limits<double>::quiet_NaN();
  };
  std::vector<Shared> shared(matches.size());
  try {
    const DiagonalizedProblem diag = diagonalize(f);
    for (std::size_t i = 0; i < matches.size(); ++i) {
      Shared& sh = shared[i];
      try {
        const Vec4 y = diag.to_local(matches[i].stacked());
        const ErrorBounds b = error_bounds(y, diag.a1, diag.a2);
        sh.lower = b.lower;
        sh.upper = b.upper;
        sh.ratio = b.ratio;
        if (b.best_upper) {
          sh.best_upper = *b.best_upper;
          const auto [eps, dist] = optimal_unweighted(y, diag.a1, diag.a2);
          const double slack = 1e-9 * (1.0 + b.upper);
          if (dist < sh.lower - slack || dist > sh.best_upper + slack ||
              sh.best_upper > sh.upper + slack)
            ++report.bound_violations;
        }
        const double r = sh.ratio;
        const std::size_t bin =
            std::min<std::size_t>(12, static_cast<std::size_t>(std::max(0.0, (r - 1.0) / 0.25)));
        ++report.ratio_histogram[bin];
      } catch (const Error&) {
        // Bounds unavailable for this correspondence (degenerate local data);
        // the method rows still run.
      }
    }
  } catch (const Error&) {
    // Singular epipolar block: no diagonalization, hence no bounds at all.
  }

  out << "method,cost2d,dist_gt,lower,best_upper,upper,ratio,err\n";
  for (MethodTag method : methods) {
    std::vector<double> dist_meas, dist_gt;
    std::size_t n_ok = 0, n_failed = 0;

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<TriangulationResult> results(matches.size());
    std::vector<std::string> errors(matches.size());
    for (std::size_t i = 0; i < matches.size(); ++i) {
      try {
        results[i] = apply_method(method, f, c1, c2, matches[i]);
      } catch (const Error& e) {
        errors[i] = error_name(e.code());
      }
    }
    const auto t1 = std::chrono::steady_clock::now();

    for (std::size_t i = 0; i < matches.size(); ++i) {
      RunRecord rec;
      rec.index = i;
      rec.method = method;
      rec.lower = shared[i].lower;
      rec.best_upper = shared[i].best_upper;
      rec.upper = shared[i].upper;
      rec.ratio = shared[i].ratio;
      if (errors[i].empty()) {
        ++n_ok;
        rec.cost2d = results[i].cost2d;
        dist_meas.push_back(std::sqrt(rec.cost2d));
        if (const auto gt = matches[i].gt_stacked()) {
          rec.dist_gt = (results[i].corrected.stacked() - *gt).norm();
          dist_gt.push_back(rec.dist_gt);
        }
      } else {
        ++n_failed;
        rec.err = errors[i];
      }

      out << method_name(method) << ',' << format_double(rec.cost2d) << ','
          << format_double(rec.dist_gt) << ',' << format_double(rec.lower) << ','
          << format_double(rec.best_upper) << ',' << format_double(rec.upper) << ','
          << format_double(rec.ratio) << ',' << rec.err << '\n';
      report.rows.push_back(std::move(rec));
    }

    MethodSummary s;
    s.method = method;
    s.n_ok = n_ok;
    s.n_failed = n_failed;
    s.mean_dist_meas = detail::mean(dist_meas);
    s.median_dist_meas = detail::percentile(dist_meas, 0.5);
    s.p95_dist_meas = detail::percentile(dist_meas, 0.95);
    s.mean_dist_gt = detail::mean(dist_gt);
    s.median_dist_gt = detail::percentile(dist_gt, 0.5);
    s.p95_dist_gt = detail::percentile(dist_gt, 0.95);
    s.ns_per_call =
        matches.empty()
            ? 0.0
            : std::chrono::duration<double, std::nano>(t1 - t0).count() /
                  static_cast<double>(matches.size());
    report.methods.push_back(s);
  }
  return report;
}

// One epipolar plane per angle: the pencil of lines through the first
// epipole, paired with the corresponding epipolar line in the second image.
// For each angle the table holds the minimal cost of moving the measurement
// onto that line pair, under the plain squared distance and under the
// nu*-weighted metric (nu* fixed from the measurement). The unweighted curve
// may show up to three local minima; the weighted one exactly one.
struct SweepTable {
  std::vector<double> angle;      // radians in [0, pi)
  std::vector<double> unweighted; // min squared distance onto the line pair
  std::vector<double> weighted;   // min weighted cost onto the line pair
};

inline SweepTable sweep_epipolar_cost(const FundamentalMatrix& f, const Correspondence& c,
                                      int n_angles) {
  if (n_angles < 2) throw Error(ErrorCode::InvalidInput, "need at least two sweep angles");
  const DiagonalizedProblem diag = diagonalize(f);
  const Vec2 e1 = diag.kernel.head<2>();
  const Vec4 x = c.stacked();
  const Vec4 y = diag.to_local(x);
  const double nu = optimal_nu(y, diag.a1, diag.a2);

  // Weighted metric in image coordinates: W = B diag(a1, nu a1, a2, nu a2) B^T
  // with B the (orthogonal) diagonalizing basis; the minimal weighted cost of
  // satisfying the two line constraints A eps = b is b^T (A W^-1 A^T)^-1 b.
  Vec4 lambda(diag.a1, nu * diag.a1, diag.a2, nu * diag.a2);
  const Mat4 w_inv = diag.basis * lambda.cwiseInverse().asDiagonal() * diag.basis.transpose();

  SweepTable table;
  table.angle.reserve(static_cast<std::size_t>(n_angles));
  table.unweighted.reserve(static_cast<std::size_t>(n_angles));
  table.weighted.reserve(static_cast<std::size_t>(n_angles));

  const Vec3 x1h = homogeneous(c.x1);
  const Vec3 x2h = homogeneous(c.x2);
  constexpr double pi = 3.141592653589793238462643383279;
  for (int j = 0; j < n_angles; ++j) {
    const double theta = pi * static_cast<double>(j) / static_cast<double>(n_angles);
    table.angle.push_back(theta);

    // Line through e1 with normal (cos t, sin t), and its partner: the
    // epipolar line of any other point on it.
    const Vec3 l1(std::cos(theta), std::sin(theta),
                  -(e1.x() * std::cos(theta) + e1.y() * std::sin(theta)));
    const Vec2 p = e1 + Vec2(-std::sin(theta), std::cos(theta));
    const Vec3 l2 = f.matrix().transpose() * homogeneous(p);

    const double n1 = l1.head<2>().norm();
    const double n2 = l2.head<2>().norm();
    if (n2 <= 1e-14 * l2.norm() || n1 == 0.0) {
      table.unweighted.push_back(std::numeric_limits<double>::infinity());
      table.weighted.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    const double r1 = l1.dot(x1h);
    const double r2 = l2.dot(x2h);
    const double d1 = r1 / n1;
    const double d2 = r2 / n2;
    table.unweighted.push_back(d1 * d1 + d2 * d2);

    Eigen::Matrix<double, 2, 4> a = Eigen::Matrix<double, 2, 4>::Zero();
    a.block<1, 2>(0, 0) = l1.head<2>().transpose() / n1;
    a.block<1, 2>(1, 2) = l2.head<2>().transpose() / n2;
    const Vec2 b(-d1, -d2);
    const Mat2 m = a * w_inv * a.transpose();
    const double det = m.determinant();
    if (!(std::abs(det) > 1e-300)) {
      table.weighted.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    table.weighted.push_back(b.dot(m.inverse() * b));
  }
  return table;
}

inline void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  out << "angle,unweighted,weighted\n";
  for (std::size_t i = 0; i < table.angle.size(); ++i)
    out << format_double(table.angle[i]) << ',' << format_double(table.unweighted[i]) << ','
        << format_double(table.weighted[i]) << '\n';
}

// Strict local minima of a periodic sequence (the sweep tables are periodic
// in the angle with period pi).
inline int count_circular_local_minima(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 3) return 0;
  int count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double prev = v[(i + n - 1) % n];
    const double next = v[(i + 1) % n];
    if (v[i] < prev && v[i] < next) ++count;
  }
  return count;
}

// Random census of the critical-polynomial degree for the three weight
// classes: both weight pairs proportional to (a1, a2) (degree 2), exactly one
// (degree 4), neither (degree 6). Samples are drawn with a safety margin of
// 1e-3 relative mismatch for every pair that must NOT be proportional, so the
// classes are well separated.
struct DegreeCensus {
  int case_id = 3;
  int expected_degree = 6;
  int n_samples = 0;
  int degree_matches = 0;
  std::array<int, 7> real_root_histogram{};  // index = number of real roots
};

inline DegreeCensus degree_census(int n_samples, int case_id, std::uint64_t seed) {
  if (n_samples < 1 || case_id < 1 || case_id > 3)
    throw Error(ErrorCode::InvalidInput, "census needs n >= 1 and case in {1,2,3}");

  DegreeCensus census;
  census.case_id = case_id;
  census.expected_degree = case_id == 1 ? 2 : (case_id == 2 ? 4 : 6);
  census.n_samples = n_samples;

  constexpr double margin = 1e-3;
  const auto mismatch = [](double a1, double a2, double l, double m) {
    return std::abs(l * a2 - m * a1) / (l * a2 + m * a1);
  };

  for (int i = 0; i < n_samples; ++i) {
    RandomStream rng = RandomStream::substream(seed, static_cast<std::uint64_t>(i));
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double a1 = std::exp(rng.uniform(-1.5, 1.5));
      const double a2 = std::exp(rng.uniform(-1.5, 1.5));
      const auto proportional_pair = [&](double scale) {
        return std::pair<double, double>(scale * a1, scale * a2);
      };
      const auto free_pair = [&]() {
        while (true) {
          const double l = std::exp(rng.uniform(-1.5, 1.5));
          const double m = std::exp(rng.uniform(-1.5, 1.5));
          if (mismatch(a1, a2, l, m) > margin) return std::pair<double, double>(l, m);
        }
      };

      Vec4 lam = Vec4::Ones();
      switch (case_id) {
        case 1: {
          const auto [l1, l3] = proportional_pair(std::exp(rng.uniform(-1.0, 1.0)));
          const auto [l2, l4] = proportional_pair(std::exp(rng.uniform(-1.0, 1.0)));
          lam << l1, l2, l3, l4;
          break;
        }
        case 2: {
          const auto [lp, mp] = proportional_pair(std::exp(rng.uniform(-1.0, 1.0)));
          const auto [lf, mf] = free_pair();
          if (rng.uniform() < 0.5)
            lam << lp, lf, mp, mf;
          else
            lam << lf, lp, mf, mp;
          break;
        }
        default: {
          const auto [l1, l3] = free_pair();
          const auto [l2, l4] = free_pair();
          lam << l1, l2, l3, l4;
          break;
        }
      }
      const WeightVector w(lam);

      Vec4 y;
      for (int k = 0; k < 4; ++k) y(k) = rng.gaussian();

      try {
        const CriticalPolynomial poly = build_critical_polynomial(y, a1, a2, w);
        const int degree = static_cast<int>(poly.coeffs.size()) - 1;
        if (degree == census.expected_degree) ++census.degree_matches;
        const std::vector<double> roots = poly_real_roots(poly.coeffs);
        const std::size_t nroots = std::min<std::size_t>(roots.size(), 6);
        ++census.real_root_histogram[nroots];
      } catch (const Error&) {
        continue;  // vanishing lead or similar bad luck: redraw
      }
      break;
    }
  }
  return census;
}

}  // namespace epiquad
