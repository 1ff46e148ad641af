#pragma once

#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "epiquad/camera.hpp"
#include "epiquad/errors.hpp"
#include "epiquad/fundamental.hpp"
#include "epiquad/synthetic.hpp"
#include "epiquad/types.hpp"

namespace epiquad {

// Shortest decimal form that parses back to the identical double; used by
// every writer so that reruns with the same seed produce byte-identical
// files.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view token, const char* what) {
  // Tolerate surrounding spaces; from_chars itself is strict.
  while (!token.empty() && (token.front() == ' ' || token.front() == '\t'))
    token.remove_prefix(1);
  while (!token.empty() && (token.back() == ' ' || token.back() == '\t'))
    token.remove_suffix(1);
  double value = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
    throw Error(ErrorCode::InvalidInput,
                std::string("cannot parse '") + std::string(token) + "' as a number in " + what);
  return value;
}

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace detail

// Correspondence CSV: header `x1,y1,x2,y2` with optional ground-truth
// columns `gx1,gy1,gx2,gy2`. A completely empty stream reads as zero
// correspondences.
inline std::vector<Correspondence> read_matches_csv(std::istream& in) {
  std::string line;
  if (!detail::next_line(in, line)) return {};
  const bool with_gt = line == "x1,y1,x2,y2,gx1,gy1,gx2,gy2";
  if (!with_gt && line != "x1,y1,x2,y2")
    throw Error(ErrorCode::InvalidInput, "matches CSV must start with the x1,y1,x2,y2 header");

  const std::size_t n_cols = with_gt ? 8 : 4;
  std::vector<Correspondence> matches;
  while (detail::next_line(in, line)) {
    if (line.empty()) continue;
    const auto fields = detail::split_csv(line);
    if (fields.size() != n_cols)
      throw Error(ErrorCode::InvalidInput, "matches CSV row has the wrong number of columns");
    Correspondence c;
    c.x1 = Vec2(parse_double(fields[0], "matches CSV"), parse_double(fields[1], "matches CSV"));
    c.x2 = Vec2(parse_double(fields[2], "matches CSV"), parse_double(fields[3], "matches CSV"));
    if (with_gt) {
      c.gt1 = Vec2(parse_double(fields[4], "matches CSV"), parse_double(fields[5], "matches CSV"));
      c.gt2 = Vec2(parse_double(fields[6], "matches CSV"), parse_double(fields[7], "matches CSV"));
    }
    matches.push_back(c);
  }
  return matches;
}

// Ground-truth columns are written when every correspondence carries them.
inline void write_matches_csv(std::ostream& out, const std::vector<Correspondence>& matches) {
  bool with_gt = !matches.empty();
  for (const Correspondence& c : matches)
    with_gt = with_gt && c.gt1.has_value() && c.gt2.has_value();

  out << (with_gt ? "x1,y1,x2,y2,gx1,gy1,gx2,gy2" : "x1,y1,x2,y2") << '\n';
  for (const Correspondence& c : matches) {
    out << format_double(c.x1.x()) << ',' << format_double(c.x1.y()) << ','
        << format_double(c.x2.x()) << ',' << format_double(c.x2.y());
    if (with_gt)
      out << ',' << format_double(c.gt1->x()) << ',' << format_double(c.gt1->y()) << ','
          << format_double(c.gt2->x()) << ',' << format_double(c.gt2->y());
    out << '\n';
  }
}

namespace detail {

inline nlohmann::json parse_json(std::istream& in, const char* what) {
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string(what) + ": " + e.what());
  }
}

}  // namespace detail

// Camera file: {"cameras": [[12 numbers, row-major 3x4], ...]}.
inline std::vector<CameraMatrix> read_cameras_json(std::istream& in) {
  const nlohmann::json j = detail::parse_json(in, "camera file");
  try {
    std::vector<CameraMatrix> cameras;
    for (const auto& entry : j.at("cameras")) {
      if (!entry.is_array() || entry.size() != 12)
        throw Error(ErrorCode::InvalidInput, "each camera needs exactly 12 numbers");
      Mat34 m;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = entry.at(4 * r + c).get<double>();
      cameras.emplace_back(m);
    }
    return cameras;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("camera file: ") + e.what());
  }
}

// Fundamental matrix: 9 row-major numbers, either as the whole document or
// under a "fundamental" key.
inline FundamentalMatrix read_fundamental_json(std::istream& in) {
  const nlohmann::json doc = detail::parse_json(in, "fundamental file");
  const nlohmann::json& arr =
      doc.is_object() && doc.contains("fundamental") ? doc.at("fundamental") : doc;
  if (!arr.is_array() || arr.size() != 9)
    throw Error(ErrorCode::InvalidInput, "fundamental matrix needs exactly 9 numbers");
  Mat3 f;
  try {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) f(r, c) = arr.at(3 * r + c).get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("fundamental file: ") + e.what());
  }
  return FundamentalMatrix(f);
}

// Scene description for the synthetic benchmark. Missing keys keep their
// defaults; "rotation" is either the string "parallel-axes" or an axis-angle
// 3-vector in radians.
inline SceneConfig read_scene_config(std::istream& in) {
  const nlohmann::json j = detail::parse_json(in, "scene config");
  SceneConfig cfg;
  try {
    if (j.contains("n_points")) cfg.n_points = j.at("n_points").get<int>();
    if (j.contains("baseline")) cfg.baseline = j.at("baseline").get<double>();
    if (j.contains("noise_sigma")) cfg.noise_sigma = j.at("noise_sigma").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("image_size")) cfg.image_size = j.at("image_size").get<double>();
    if (j.contains("rotation")) {
      const auto& rot = j.at("rotation");
      if (rot.is_string() && rot.get<std::string>() == "parallel-axes") {
        cfg.rotation = RotationSpec::parallel();
      } else if (rot.is_array() && rot.size() == 3) {
        cfg.rotation = RotationSpec::from_axis_angle(
            Vec3(rot.at(0).get<double>(), rot.at(1).get<double>(), rot.at(2).get<double>()));
      } else {
        throw Error(ErrorCode::InvalidInput,
                    "rotation must be \"parallel-axes\" or an axis-angle 3-vector");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("scene config: ") + e.what());
  }
  return cfg;
}

}  // namespace epiquad
