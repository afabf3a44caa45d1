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

#include "pushswitch/kinematics.hpp"

#include <stdexcept>

namespace pushswitch {

void MotionModel::validate() const {
  if (!(h > 0.0) || !(mu_c > 0.0)) {
    throw std::invalid_argument("motion model needs h > 0 and mu_c > 0");
  }
}

Mat32 push_jacobian(const Vec2& c, double h) {
  const double h2 = h * h;
  const double inv = 1.0 / (h2 + c.squaredNorm());
  Mat32 b;
  b << (h2 + c.x() * c.x()) * inv, c.x() * c.y() * inv,  //
      c.x() * c.y() * inv, (h2 + c.y() * c.y()) * inv,   //
      -c.y() * inv, c.x() * inv;
  return b;
}

PushDelta push_delta(const Vec2& c, const Vec2& u, double h) {
  const double h2 = h * h;
  const double denom = h2 + c.squaredNorm();
  PushDelta d;
  d.d_com.x() = ((h2 + c.x() * c.x()) * u.x() + c.x() * c.y() * u.y()) / denom;
  d.d_com.y() = ((h2 + c.y() * c.y()) * u.y() + c.x() * c.y() * u.x()) / denom;
  d.d_omega = (c.x() * u.y() - c.y() * u.x()) / denom;
  return d;
}

Vec2 com_world(const Pose2D& pose, const ShapeModel& shape) {
  return pose.position() + rotation(pose.theta()) * shape.com();
}

Pose2D pose_from_com(const Vec2& com_w, double theta, const ShapeModel& shape) {
  const double th = wrap_angle(theta);
  return Pose2D(com_w - rotation(th) * shape.com(), th);
}

Pose2D apply_push(const Pose2D& pose, const ShapeModel& shape, int point_id,
                  const Vec2& u, const MotionModel& model,
                  const PushDelta& disturbance) {
  if (!u.allFinite()) throw std::invalid_argument("apply_push: non-finite input");
  const PushingPoint& pt = shape.point(point_id);
  PushDelta d = push_delta(pt.p - shape.com(), u, model.h);
  d.d_com += disturbance.d_com;
  d.d_omega += disturbance.d_omega;
  const Vec2 com = com_world(pose, shape) + rotation(pose.theta()) * d.d_com;
  return pose_from_com(com, pose.theta() + d.d_omega, shape);
}

Vec2 contact_point_world(const Pose2D& pose, const ShapeModel& shape,
                         int point_id) {
  return pose.position() + rotation(pose.theta()) * shape.point(point_id).p;
}

Plant::Plant(const ShapeModel& shape, const MotionModel& model,
             const NoiseModel& noise, const Pose2D& pose)
    : shape_(shape), model_(model), noise_(noise), rng_(noise.seed), pose_(pose) {
  model_.validate();
  if (noise.sigma_pos < 0.0 || noise.sigma_rot < 0.0) {
    throw std::invalid_argument("noise standard deviations must be >= 0");
  }
}

const Pose2D& Plant::push(int point_id, const Vec2& u) {
  PushDelta noise;
  if (noise_.enabled()) {
    std::normal_distribution<double> n01(0.0, 1.0);
    noise.d_com.x() = noise_.sigma_pos * n01(rng_);
    noise.d_com.y() = noise_.sigma_pos * n01(rng_);
    noise.d_omega = noise_.sigma_rot * n01(rng_);
  }
  pose_ = apply_push(pose_, shape_, point_id, u, model_, noise);
  return pose_;
}

}  // namespace pushswitch
