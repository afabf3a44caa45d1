// Copyright 2026 The pushswitch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pushswitch/geometry.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pushswitch {

double wrap_angle(double a) {
  if (!std::isfinite(a)) {
    throw std::invalid_argument("wrap_angle: non-finite angle");
  }
  double r = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

Mat2 rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

std::string_view to_string(ShapeName name) {
  switch (name) {
    case ShapeName::kT:
      return "T";
    case ShapeName::kL:
      return "L";
    case ShapeName::kTriangle:
      return "triangle";
    case ShapeName::kTrapezoid:
      return "trapezoid";
  }
  return "?";
}

ShapeName parse_shape_name(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "t") return ShapeName::kT;
  if (lower == "l") return ShapeName::kL;
  if (lower == "triangle") return ShapeName::kTriangle;
  if (lower == "trapezoid") return ShapeName::kTrapezoid;
  throw std::invalid_argument("unknown shape name '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Polygons.

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double segment_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * d - p).norm();
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1,
                        const Vec2& q2) {
  auto orient = [](const Vec2& a, const Vec2& b, const Vec2& c) {
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
  };
  auto on_segment = [](const Vec2& a, const Vec2& b, const Vec2& c) {
    return std::min(a.x(), b.x()) <= c.x() && c.x() <= std::max(a.x(), b.x()) &&
           std::min(a.y(), b.y()) <= c.y() && c.y() <= std::max(a.y(), b.y());
  };
  const int o1 = orient(p1, p2, q1);
  const int o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1);
  const int o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace

double signed_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    a += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * a;
}

bool polygon_is_simple(const std::vector<Vec2>& poly) {
  const size_t n = poly.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j],
                             poly[(j + 1) % n])) {
        return false;
      }
    }
  }
  return std::abs(signed_area(poly)) > 0.0;
}

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
  bool inside = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

double distance_to_boundary(const std::vector<Vec2>& poly, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < poly.size(); ++i) {
    best = std::min(best, segment_distance(poly[i], poly[(i + 1) % poly.size()], p));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Shapes.

ShapeModel::ShapeModel(ShapeName name, std::vector<Vec2> contour, Vec2 com,
                       const std::vector<Vec2>& point_positions)
    : name_(name), contour_(std::move(contour)), com_(std::move(com)) {
  constexpr double kOnBoundaryTol = 1e-6;
  if (!polygon_is_simple(contour_)) {
    throw std::invalid_argument("shape contour is not a simple polygon");
  }
  if (!point_in_polygon(contour_, com_) ||
      distance_to_boundary(contour_, com_) <= 0.0) {
    throw std::invalid_argument("shape CoM is not strictly inside the contour");
  }
  const double orient = signed_area(contour_) > 0.0 ? 1.0 : -1.0;
  const size_t n = contour_.size();

  int id = 1;
  for (const Vec2& p : point_positions) {
    if (distance_to_boundary(contour_, p) > kOnBoundaryTol) {
      throw std::invalid_argument("pushing point #" + std::to_string(id) +
                                  " is not on the contour");
    }
    // At a vertex two edges qualify; prefer the one facing the CoM.
    const Vec2 to_com = (com_ - p).normalized();
    Vec2 best_normal = Vec2::Zero();
    double best_score = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i) {
      const Vec2& a = contour_[i];
      const Vec2& b = contour_[(i + 1) % n];
      if (segment_distance(a, b, p) > kOnBoundaryTol) continue;
      const Vec2 d = (b - a).normalized();
      const Vec2 inward = orient * Vec2(-d.y(), d.x());
      const double score = inward.dot(to_com);
      if (score > best_score) {
        best_score = score;
        best_normal = inward;
      }
    }
    PushingPoint pp;
    pp.id = id++;
    pp.p = p;
    pp.e_n = best_normal;
    pp.e_t = Vec2(-best_normal.y(), best_normal.x());
    points_.push_back(pp);
  }
}

const PushingPoint& ShapeModel::point(int id) const {
  if (id < 1 || id > num_points()) {
    throw std::out_of_range("pushing point id " + std::to_string(id) +
                            " out of range");
  }
  return points_[static_cast<size_t>(id - 1)];
}

namespace {

std::vector<ShapeModel> make_builtin_shapes() {
  std::vector<ShapeModel> shapes;
  // Inverted T: wide bar at the bottom, stem upwards.
  shapes.emplace_back(
      ShapeName::kT,
      std::vector<Vec2>{{-0.066, -0.078}, {0.064, -0.078}, {0.064, -0.025},
                        {0.020, -0.025}, {0.020, 0.053}, {-0.020, 0.053},
                        {-0.020, -0.025}, {-0.066, -0.025}},
      Vec2(0.0, -0.029),
      std::vector<Vec2>{{0.002, 0.053}, {-0.066, -0.039}, {0.0, -0.078},
                        {0.064, -0.037}, {-0.035, -0.078}, {0.031, -0.078}});
  // Horizontal leg along the bottom, vertical leg on the left.
  shapes.emplace_back(
      ShapeName::kL,
      std::vector<Vec2>{{-0.027, -0.064}, {0.104, -0.064}, {0.104, -0.010},
                        {0.027, -0.010}, {0.027, 0.040}, {-0.027, 0.040}},
      Vec2(0.025, -0.025),
      std::vector<Vec2>{{0.027, -0.002}, {-0.027, -0.020}, {0.027, -0.064},
                        {0.104, -0.025}, {0.092, -0.010}, {0.088, -0.064}});
  // Near-triangular quadrilateral; the left edge runs through #2 and #1, the
  // right edge through #5 and #4, the short top edge through #1 and #6.
  shapes.emplace_back(
      ShapeName::kTriangle,
      std::vector<Vec2>{{-0.05025, -0.039},
                        {0.06125, -0.039},
                        {0.052 - 0.444 / 43.0, -0.002 + 1.776 / 43.0},
                        {-0.020, 0.082}},
      Vec2(0.0, 0.006),
      std::vector<Vec2>{{-0.020, 0.082}, {-0.039, 0.006}, {0.0, -0.039},
                        {0.051, 0.002}, {0.052, -0.002}, {0.006, 0.064}});
  // Right-angled trapezoid: vertical right edge, left edge x = -0.032 + 0.4 y.
  shapes.emplace_back(
      ShapeName::kTrapezoid,
      std::vector<Vec2>{{-0.0524, -0.051}, {0.063, -0.051}, {0.063, 0.053},
                        {-0.0108, 0.053}},
      Vec2(0.011, -0.004),
      std::vector<Vec2>{{0.010, 0.053}, {-0.032, 0.0}, {0.012, -0.051},
                        {0.063, -0.004}, {-0.012, -0.051}, {0.063, 0.018}});
  return shapes;
}

Vec2 json_vec2(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument("expected a two-element coordinate array");
  }
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

const std::vector<ShapeModel>& builtin_shapes() {
  static const std::vector<ShapeModel> shapes = make_builtin_shapes();
  return shapes;
}

const ShapeModel& builtin_shape(ShapeName name) {
  for (const auto& s : builtin_shapes()) {
    if (s.name() == name) return s;
  }
  throw std::invalid_argument("no builtin shape");
}

ShapeModel parse_shape_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const ShapeName name = parse_shape_name(j.at("name").get<std::string>());
    std::vector<Vec2> contour;
    for (const auto& v : j.at("contour")) contour.push_back(json_vec2(v));
    const Vec2 com = json_vec2(j.at("com"));
    std::vector<std::pair<int, Vec2>> pts;
    for (const auto& p : j.at("points")) {
      pts.emplace_back(p.at("id").get<int>(), json_vec2(p.at("p")));
    }
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Vec2> positions;
    for (size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].first != static_cast<int>(i) + 1) {
        throw std::invalid_argument("point ids must be 1..n without gaps");
      }
      positions.push_back(pts[i].second);
    }
    return ShapeModel(name, std::move(contour), com, positions);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed shape file: ") + e.what());
  }
}

ShapeModel load_shape_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open shape file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_shape_json(ss.str());
}

std::string shape_to_json(const ShapeModel& shape) {
  nlohmann::ordered_json j;
  j["name"] = std::string(to_string(shape.name()));
  j["contour"] = nlohmann::json::array();
  for (const auto& v : shape.contour()) j["contour"].push_back({v.x(), v.y()});
  j["com"] = {shape.com().x(), shape.com().y()};
  j["points"] = nlohmann::json::array();
  for (const auto& p : shape.points()) {
    j["points"].push_back({{"id", p.id}, {"p", {p.p.x(), p.p.y()}}});
  }
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Motion constraint regions.

Mcr::Mcr(const EllipseRegion& e) : region_(e) {
  if (!(e.semi_minor > 0.0) || !(e.semi_major >= e.semi_minor)) {
    throw std::invalid_argument("ellipse MCR needs semi_major >= semi_minor > 0");
  }
}

Mcr::Mcr(const CircleRegion& c) : region_(c) {
  if (!(c.radius > 0.0)) {
    throw std::invalid_argument("circle MCR needs radius > 0");
  }
}

Vec2 Mcr::center() const {
  return is_ellipse() ? ellipse().center : circle().center;
}

Mcr build_mcr(const Vec2& current, const Vec2& target, double r_min, double k) {
  if (!(r_min > 0.0) || !(k > 0.0 && k < 1.0)) {
    throw std::invalid_argument("build_mcr: need r_min > 0 and 0 < k < 1");
  }
  const Vec2 d = target - current;
  const double dist = d.norm();
  if (dist >= r_min) {
    EllipseRegion e;
    e.center = 0.5 * (current + target);
    e.semi_major = 0.5 * dist;
    e.semi_minor = 0.5 * k * dist;
    e.orientation = std::atan2(d.y(), d.x());
    return Mcr(e);
  }
  return Mcr(CircleRegion{target, r_min});
}

namespace {

Vec2 to_local(const EllipseRegion& e, const Vec2& p) {
  return rotation(-e.orientation) * (p - e.center);
}

// Bisection on the Lagrange parameter (Eberly, "Distance from a point to an
// ellipse"). Returns the nearest boundary point for a query in the closed
// first quadrant of an axis-aligned ellipse with e0 >= e1 > 0.
Vec2 nearest_first_quadrant(double e0, double e1, double y0, double y1) {
  if (y1 > 0.0) {
    if (y0 > 0.0) {
      const double z0 = y0 / e0;
      const double z1 = y1 / e1;
      const double g = z0 * z0 + z1 * z1 - 1.0;
      if (g == 0.0) return {y0, y1};
      const double r0 = (e0 / e1) * (e0 / e1);
      const double n0 = r0 * z0;
      double s0 = z1 - 1.0;
      double s1 = g < 0.0 ? 0.0 : std::hypot(n0, z1) - 1.0;
      double s = 0.0;
      for (int i = 0; i < 2000; ++i) {
        s = 0.5 * (s0 + s1);
        if (s == s0 || s == s1) break;
        const double ratio0 = n0 / (s + r0);
        const double ratio1 = z1 / (s + 1.0);
        const double gs = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if (gs > 0.0) {
          s0 = s;
        } else if (gs < 0.0) {
          s1 = s;
        } else {
          break;
        }
      }
      return {r0 * y0 / (s + r0), y1 / (s + 1.0)};
    }
    return {0.0, e1};
  }
  const double numer0 = e0 * y0;
  const double denom0 = e0 * e0 - e1 * e1;
  if (numer0 < denom0) {
    const double xde0 = numer0 / denom0;
    return {e0 * xde0, e1 * std::sqrt(std::max(0.0, 1.0 - xde0 * xde0))};
  }
  return {e0, 0.0};
}

}  // namespace

double mcr_quadratic_form(const Mcr& m, const Vec2& p) {
  if (m.is_ellipse()) {
    const auto& e = m.ellipse();
    const Vec2 q = to_local(e, p);
    return (q.x() / e.semi_major) * (q.x() / e.semi_major) +
           (q.y() / e.semi_minor) * (q.y() / e.semi_minor);
  }
  const auto& c = m.circle();
  return (p - c.center).squaredNorm() / (c.radius * c.radius);
}

bool mcr_contains(const Mcr& m, const Vec2& p) {
  return mcr_quadratic_form(m, p) <= 1.0 + 1e-9;
}

Vec2 mcr_nearest_boundary_point(const Mcr& m, const Vec2& p) {
  if (!m.is_ellipse()) {
    const auto& c = m.circle();
    const Vec2 d = p - c.center;
    const double n = d.norm();
    const Vec2 dir = n > 0.0 ? Vec2(d / n) : Vec2::UnitX();
    return c.center + c.radius * dir;
  }
  const auto& e = m.ellipse();
  const Vec2 q = to_local(e, p);
  const Vec2 b = nearest_first_quadrant(e.semi_major, e.semi_minor,
                                        std::abs(q.x()), std::abs(q.y()));
  const Vec2 local(std::copysign(b.x(), q.x()), q.y() < 0.0 ? -b.y() : b.y());
  return e.center + rotation(e.orientation) * local;
}

double mcr_signed_distance(const Mcr& m, const Vec2& p) {
  const double d = (p - mcr_nearest_boundary_point(m, p)).norm();
  return mcr_quadratic_form(m, p) > 1.0 ? d : -d;
}

Halfplane mcr_halfspace(const Mcr& m, const Vec2& p) {
  const Vec2 q = mcr_nearest_boundary_point(m, p);
  Vec2 normal;
  if (m.is_ellipse()) {
    const auto& e = m.ellipse();
    const Vec2 ql = to_local(e, q);
    const Vec2 nl(ql.x() / (e.semi_major * e.semi_major),
                  ql.y() / (e.semi_minor * e.semi_minor));
    normal = (rotation(e.orientation) * nl).normalized();
  } else {
    normal = (q - m.circle().center).normalized();
  }
  return {normal, normal.dot(q)};
}

Workspace::Workspace(double hw, double hh) : half_width(hw), half_height(hh) {
  if (!(hw > 0.0) || !(hh > 0.0)) {
    throw std::invalid_argument("workspace half extents must be positive");
  }
}

double Workspace::diagonal() const {
  return std::hypot(2.0 * half_width, 2.0 * half_height);
}

bool in_workspace(const Workspace& w, const Pose2D& p) {
  return std::abs(p.x()) <= w.half_width && std::abs(p.y()) <= w.half_height;
}

}  // namespace pushswitch
