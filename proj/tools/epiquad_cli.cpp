// Command-line front end: triangulate correspondence files, run the
// synthetic benchmark, sweep the per-epipolar-plane cost curves, census the
// critical-polynomial degrees, and evaluate error bounds / the fast inlier
// predicate. Exit code 0 on success, 1 on input errors, 2 on internal
// failures.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epiquad/epiquad.hpp"

namespace {

using namespace epiquad;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot open '" + path + "' for writing");
  return out;
}

MethodTag parse_method(const std::string& name) {
  if (name == "weighted") return MethodTag::Weighted;
  if (name == "exact") return MethodTag::Exact;
  if (name == "sampson") return MethodTag::Sampson;
  if (name == "lindstrom") return MethodTag::Lindstrom;
  if (name == "midpoint") return MethodTag::Midpoint;
  if (name == "dlt") return MethodTag::DLT;
  throw Error(ErrorCode::InvalidInput, "unknown method '" + name + "'");
}

// Whether an error is the caller's fault (bad files, impossible requests)
// rather than a numerical failure inside the library.
bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput:
    case ErrorCode::SingularF22:
    case ErrorCode::CoincidentCenters:
    case ErrorCode::EmptyScene:
      return true;
    default:
      return false;
  }
}

struct TriangulateArgs {
  std::string cameras, matches, method = "weighted", out;
};

void run_triangulate(const TriangulateArgs& args) {
  auto cam_stream = open_input(args.cameras);
  const std::vector<CameraMatrix> cameras = read_cameras_json(cam_stream);
  if (cameras.size() < 2)
    throw Error(ErrorCode::InvalidInput, "camera file must contain at least two cameras");
  auto match_stream = open_input(args.matches);
  const std::vector<Correspondence> matches = read_matches_csv(match_stream);
  const MethodTag method = parse_method(args.method);
  const FundamentalMatrix f = fundamental_from_cameras(cameras[0], cameras[1]);

  auto out = open_output(args.out);
  out << "cx1,cy1,cx2,cy2,X,Y,Z,cost2d,err\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const Correspondence& c : matches) {
    try {
      const TriangulationResult r = apply_method(method, f, cameras[0], cameras[1], c);
      const Vec3 x = r.point3d.value_or(Vec3(nan, nan, nan));
      out << format_double(r.corrected.x1.x()) << ',' << format_double(r.corrected.x1.y()) << ','
          << format_double(r.corrected.x2.x()) << ',' << format_double(r.corrected.x2.y()) << ','
          << format_double(x.x()) << ',' << format_double(x.y()) << ',' << format_double(x.z())
          << ',' << format_double(r.cost2d) << ",\n";
    } catch (const Error& e) {
      out << "nan,nan,nan,nan,nan,nan,nan,nan," << error_name(e.code()) << '\n';
    }
  }
}

struct BenchArgs {
  std::string config, out;
  std::vector<std::string> methods;
};

void run_bench(const BenchArgs& args) {
  auto cfg_stream = open_input(args.config);
  const SceneConfig cfg = read_scene_config(cfg_stream);
  const Scene scene = synth_scene(cfg);

  std::vector<MethodTag> methods;
  if (args.methods.empty()) {
    methods = {MethodTag::Weighted,  MethodTag::Exact,    MethodTag::Sampson,
               MethodTag::Lindstrom, MethodTag::Midpoint, MethodTag::DLT};
  } else {
    for (const std::string& m : args.methods) methods.push_back(parse_method(m));
  }

  auto out = open_output(args.out);
  const MetricsReport report =
      run_benchmark(scene.camera1, scene.camera2, scene.matches, methods, out);

  std::cout << "correspondences: " << report.n_correspondences << '\n';
  std::cout << "method      ok   fail  mean_meas   med_meas    p95_meas    mean_gt     "
               "med_gt      p95_gt      ns/corr\n";
  char line[256];
  for (const MethodSummary& s : report.methods) {
    std::snprintf(line, sizeof line,
                  "%-10s %5zu %5zu  %-11.4g %-11.4g %-11.4g %-11.4g %-11.4g %-11.4g %-10.0f",
                  method_name(s.method), s.n_ok, s.n_failed, s.mean_dist_meas,
                  s.median_dist_meas, s.p95_dist_meas, s.mean_dist_gt, s.median_dist_gt,
                  s.p95_dist_gt, s.ns_per_call);
    std::cout << line << '\n';
  }
  std::cout << "bound violations: " << report.bound_violations << '\n';
  std::cout << "eigenvalue-ratio histogram (bins of 0.25 from 1):";
  for (std::size_t b : report.ratio_histogram) std::cout << ' ' << b;
  std::cout << '\n';
  if (report.bound_violations != 0)
    throw Error(ErrorCode::NumericalBreakdown, "error-bound sandwich violated");
}

struct SweepArgs {
  std::string fundamental, point, out;
  int n = 3600;
};

void run_sweep(const SweepArgs& args) {
  auto f_stream = open_input(args.fundamental);
  const FundamentalMatrix f = read_fundamental_json(f_stream);
  const auto fields = detail::split_csv(args.point);
  if (fields.size() != 4)
    throw Error(ErrorCode::InvalidInput, "--point needs four comma-separated numbers");
  Correspondence c;
  c.x1 = Vec2(parse_double(fields[0], "--point"), parse_double(fields[1], "--point"));
  c.x2 = Vec2(parse_double(fields[2], "--point"), parse_double(fields[3], "--point"));

  const SweepTable table = sweep_epipolar_cost(f, c, args.n);
  auto out = open_output(args.out);
  write_sweep_csv(out, table);
  std::cout << "angles: " << table.angle.size()
            << "  unweighted local minima: " << count_circular_local_minima(table.unweighted)
            << "  weighted local minima: " << count_circular_local_minima(table.weighted)
            << '\n';
}

struct CensusArgs {
  int case_id = 3;
  int n = 1000;
  std::uint64_t seed = 1;
};

int run_census(const CensusArgs& args) {
  const DegreeCensus census = degree_census(args.n, args.case_id, args.seed);
  std::cout << "case " << census.case_id << ": expected degree " << census.expected_degree
            << ", matched " << census.degree_matches << '/' << census.n_samples << '\n';
  std::cout << "real-root counts:";
  for (std::size_t k = 0; k < census.real_root_histogram.size(); ++k)
    if (census.real_root_histogram[k] != 0)
      std::cout << ' ' << k << ':' << census.real_root_histogram[k];
  std::cout << '\n';
  if (census.degree_matches != census.n_samples) {
    std::cerr << "error: degree census does not match the expected class\n";
    return 2;
  }
  return 0;
}

struct BoundsArgs {
  std::string fundamental, matches, out;
  double radius = 1.0;
};

void run_bounds(const BoundsArgs& args) {
  auto f_stream = open_input(args.fundamental);
  const FundamentalMatrix f = read_fundamental_json(f_stream);
  auto match_stream = open_input(args.matches);
  const std::vector<Correspondence> matches = read_matches_csv(match_stream);
  const DiagonalizedProblem diag = diagonalize(f);

  // Square-root-free inlier decision: upper < r is equivalent to
  // |sqrt(u) - sqrt(v)| < r sqrt(2 min(a1,a2)) with u, v the two quadratic
  // forms of the instance, which is exactly what the fast predicate tests.
  const double scaled_radius = args.radius * std::sqrt(2.0 * std::min(diag.a1, diag.a2));

  auto out = open_output(args.out);
  out << "x1,y1,x2,y2,lower,best_upper,upper,ratio,inlier,err\n";
  for (const Correspondence& c : matches) {
    out << format_double(c.x1.x()) << ',' << format_double(c.x1.y()) << ','
        << format_double(c.x2.x()) << ',' << format_double(c.x2.y()) << ',';
    try {
      const Vec4 y = diag.to_local(c.stacked());
      const ErrorBounds b = error_bounds(y, diag.a1, diag.a2);
      const double u = diag.a1 * y(0) * y(0) + diag.a2 * y(2) * y(2);
      const double v = diag.a1 * y(1) * y(1) + diag.a2 * y(3) * y(3);
      const bool inlier = inlier_check_fast(u, v, scaled_radius);
      out << format_double(b.lower) << ','
          << (b.best_upper ? format_double(*b.best_upper) : "nan") << ','
          << format_double(b.upper) << ',' << format_double(b.ratio) << ','
          << (inlier ? 1 : 0) << ",\n";
    } catch (const Error& e) {
      out << "nan,nan,nan,nan,nan," << error_name(e.code()) << '\n';
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-view triangulation: closed-form weighted correction, exact solver, "
               "bounds, baselines, and benchmark harness"};
  app.require_subcommand(1);

  TriangulateArgs tri_args;
  CLI::App* tri = app.add_subcommand("triangulate", "correct correspondences and recover 3D points");
  tri->add_option("--cameras", tri_args.cameras, "camera JSON file")->required();
  tri->add_option("--matches", tri_args.matches, "correspondence CSV")->required();
  tri->add_option("--method", tri_args.method,
                  "weighted|exact|sampson|lindstrom|midpoint|dlt (default weighted)");
  tri->add_option("--out", tri_args.out, "output CSV")->required();

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "synthetic-scene benchmark over methods");
  bench->add_option("--config", bench_args.config, "scene config JSON")->required();
  bench->add_option("--methods", bench_args.methods, "methods to run (default: all)")
      ->delimiter(',');
  bench->add_option("--out", bench_args.out, "per-correspondence metrics CSV")->required();

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "per-epipolar-plane minimal cost curves");
  sweep->add_option("--fundamental", sweep_args.fundamental, "fundamental matrix JSON")
      ->required();
  sweep->add_option("--point", sweep_args.point, "measurement as \"x1,y1,x2,y2\"")->required();
  sweep->add_option("--n", sweep_args.n, "number of angles (default 3600)");
  sweep->add_option("--out", sweep_args.out, "output CSV")->required();

  CensusArgs census_args;
  CLI::App* census = app.add_subcommand("census", "degree census of the critical polynomial");
  census->add_option("--case", census_args.case_id, "weight class: 1, 2 or 3")->required();
  census->add_option("--n", census_args.n, "samples (default 1000)");
  census->add_option("--seed", census_args.seed, "RNG seed");

  BoundsArgs bounds_args;
  CLI::App* bounds = app.add_subcommand("bounds", "error bounds and fast inlier decisions");
  bounds->add_option("--fundamental", bounds_args.fundamental, "fundamental matrix JSON")
      ->required();
  bounds->add_option("--matches", bounds_args.matches, "correspondence CSV")->required();
  bounds->add_option("--radius", bounds_args.radius, "inlier radius in image units")
      ->required();
  bounds->add_option("--out", bounds_args.out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (tri->parsed()) run_triangulate(tri_args);
    if (bench->parsed()) run_bench(bench_args);
    if (sweep->parsed()) run_sweep(sweep_args);
    if (census->parsed()) return run_census(census_args);
    if (bounds->parsed()) run_bounds(bounds_args);
  } catch (const epiquad::Error& e) {
    std::cerr << "error: " << epiquad::error_name(e.code()) << ": " << e.what() << '\n';
    return is_input_error(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
