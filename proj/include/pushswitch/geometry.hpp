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

#ifndef PUSHSWITCH_GEOMETRY_HPP_
#define PUSHSWITCH_GEOMETRY_HPP_

#include <Eigen/Core>

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pushswitch {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kPi = 3.14159265358979323846;

// Maps any finite angle into (-pi, pi]. Throws std::invalid_argument on
// non-finite input.
double wrap_angle(double a);

// Wrapped difference a - b, in (-pi, pi].
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

Mat2 rotation(double theta);

// Pose of the object frame {B} in the world frame {W}. The heading is kept
// normalized into (-pi, pi] on every write.
class Pose2D {
 public:
  Pose2D() = default;
  Pose2D(double x, double y, double theta)
      : x_(x), y_(y), theta_(wrap_angle(theta)) {}
  Pose2D(const Vec2& p, double theta) : Pose2D(p.x(), p.y(), theta) {}

  double x() const { return x_; }
  double y() const { return y_; }
  double theta() const { return theta_; }
  Vec2 position() const { return {x_, y_}; }

  void set_theta(double theta) { theta_ = wrap_angle(theta); }

  bool operator==(const Pose2D&) const = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double theta_ = 0.0;
};

enum class ShapeName { kT, kL, kTriangle, kTrapezoid };

std::string_view to_string(ShapeName name);
// Accepts "T", "L", "triangle", "trapezoid" (case-insensitive). Throws
// std::invalid_argument otherwise.
ShapeName parse_shape_name(std::string_view text);

struct PushingPoint {
  int id = 0;  // 1-based, as listed in the point table
  Vec2 p = Vec2::Zero();
  Vec2 e_n = Vec2::Zero();  // inward contact normal
  Vec2 e_t = Vec2::Zero();  // e_n rotated by +90 degrees
};

// Object contour, centre of mass and candidate pushing points, all expressed
// in {B}. Contact frames are derived from the contour at construction.
class ShapeModel {
 public:
  // Validates that the contour is a simple polygon, the CoM is strictly
  // inside, and every point lies on the boundary (1e-6 m). Throws
  // std::invalid_argument on violation.
  ShapeModel(ShapeName name, std::vector<Vec2> contour, Vec2 com,
             const std::vector<Vec2>& point_positions);

  ShapeName name() const { return name_; }
  const std::vector<Vec2>& contour() const { return contour_; }
  const Vec2& com() const { return com_; }
  const std::vector<PushingPoint>& points() const { return points_; }
  int num_points() const { return static_cast<int>(points_.size()); }

  // 1-based lookup. Throws std::out_of_range for an unknown id.
  const PushingPoint& point(int id) const;

 private:
  ShapeName name_;
  std::vector<Vec2> contour_;
  Vec2 com_;
  std::vector<PushingPoint> points_;
};

// Polygon helpers (vertices in order, closed implicitly).
bool polygon_is_simple(const std::vector<Vec2>& poly);
bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p);
double distance_to_boundary(const std::vector<Vec2>& poly, const Vec2& p);
double signed_area(const std::vector<Vec2>& poly);

const std::vector<ShapeModel>& builtin_shapes();
const ShapeModel& builtin_shape(ShapeName name);

// Shape description as JSON: {"name": "T", "contour": [[x,y],...],
// "com": [x,y], "points": [{"id": 1, "p": [x,y]}, ...]}. Normals are
// recomputed. Throws std::invalid_argument on malformed input.
ShapeModel parse_shape_json(const std::string& text);
ShapeModel load_shape_file(const std::string& path);
std::string shape_to_json(const ShapeModel& shape);

// ---------------------------------------------------------------------------
// Motion constraint regions.

struct EllipseRegion {
  Vec2 center = Vec2::Zero();
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double orientation = 0.0;  // direction of the major axis
};

struct CircleRegion {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

class Mcr {
 public:
  // Throws std::invalid_argument when the axis/radius invariants fail.
  explicit Mcr(const EllipseRegion& e);
  explicit Mcr(const CircleRegion& c);

  bool is_ellipse() const {
    return std::holds_alternative<EllipseRegion>(region_);
  }
  const EllipseRegion& ellipse() const {
    return std::get<EllipseRegion>(region_);
  }
  const CircleRegion& circle() const { return std::get<CircleRegion>(region_); }
  Vec2 center() const;
  std::string_view kind() const { return is_ellipse() ? "ellipse" : "circle"; }

 private:
  std::variant<EllipseRegion, CircleRegion> region_;
};

// Ellipse through both positions when they are at least r_min apart (major
// axis = the segment, minor = k * major); otherwise a circle of radius r_min
// around the target.
Mcr build_mcr(const Vec2& current, const Vec2& target, double r_min, double k);

// Canonical quadratic form value; <= 1 inside.
double mcr_quadratic_form(const Mcr& m, const Vec2& p);
bool mcr_contains(const Mcr& m, const Vec2& p);

// Euclidean nearest point of the region boundary.
Vec2 mcr_nearest_boundary_point(const Mcr& m, const Vec2& p);
// Positive outside, negative inside, magnitude = distance to the boundary.
double mcr_signed_distance(const Mcr& m, const Vec2& p);

struct Halfplane {
  Vec2 normal = Vec2::UnitX();
  double offset = 0.0;  // {q : normal . q <= offset}
};

// Supporting halfplane tangent at the boundary point nearest to p. At the
// exact centre of a circle the normal is +x; at the centre of an ellipse it
// is the +minor-axis direction.
Halfplane mcr_halfspace(const Mcr& m, const Vec2& p);

struct Workspace {
  double half_width = 0.25;
  double half_height = 0.25;

  Workspace() = default;
  Workspace(double hw, double hh);
  double diagonal() const;
};

// Tests the {B} origin only.
bool in_workspace(const Workspace& w, const Pose2D& p);

}  // namespace pushswitch

#endif  // PUSHSWITCH_GEOMETRY_HPP_
