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

// Quasi-static single-point pushing under an ellipsoidal limit surface.
//
// A pusher displacement u applied at contact offset c (relative to the CoM,
// object frame) moves the CoM by d_com and rotates the object by d_omega:
//
//   [d_com; d_omega] = B(c, h) u,
//   B = 1 / (h^2 + |c|^2) * [[h^2 + cx^2, cx cy],
//                            [cx cy,      h^2 + cy^2],
//                            [-cy,        cx]]
//
// Sticking contact holds: the contact point moves exactly with the pusher.

#ifndef PUSHSWITCH_KINEMATICS_HPP_
#define PUSHSWITCH_KINEMATICS_HPP_

#include <Eigen/Core>

#include <cstdint>
#include <random>

#include "pushswitch/geometry.hpp"

namespace pushswitch {

using Mat32 = Eigen::Matrix<double, 3, 2>;

struct MotionModel {
  double h = 0.5;     // frictional moment / sliding friction ratio [m]
  double mu_c = 0.6;  // pusher-object friction coefficient

  void validate() const;
};

struct PushDelta {
  Vec2 d_com = Vec2::Zero();  // object frame
  double d_omega = 0.0;
};

struct NoiseModel {
  double sigma_pos = 0.0;
  double sigma_rot = 0.0;
  std::uint64_t seed = 0;

  bool enabled() const { return sigma_pos > 0.0 || sigma_rot > 0.0; }
};

Mat32 push_jacobian(const Vec2& c, double h);
PushDelta push_delta(const Vec2& c, const Vec2& u, double h);

// Object-frame CoM <-> {B} origin conversions in the world frame.
Vec2 com_world(const Pose2D& pose, const ShapeModel& shape);
Pose2D pose_from_com(const Vec2& com_w, double theta, const ShapeModel& shape);

// One quasi-static push at point `point_id` (1-based) with object-frame pusher
// displacement u. `disturbance` is added to the object-frame delta.
Pose2D apply_push(const Pose2D& pose, const ShapeModel& shape, int point_id,
                  const Vec2& u, const MotionModel& model,
                  const PushDelta& disturbance = {});

Vec2 contact_point_world(const Pose2D& pose, const ShapeModel& shape,
                         int point_id);

// Stateful plant: current pose plus an owned process-noise stream.
class Plant {
 public:
  Plant(const ShapeModel& shape, const MotionModel& model,
        const NoiseModel& noise = {}, const Pose2D& pose = {});

  const Pose2D& pose() const { return pose_; }
  void set_pose(const Pose2D& pose) { pose_ = pose; }
  const ShapeModel& shape() const { return shape_; }
  const MotionModel& model() const { return model_; }

  const Pose2D& push(int point_id, const Vec2& u);

 private:
  ShapeModel shape_;
  MotionModel model_;
  NoiseModel noise_;
  std::mt19937_64 rng_;
  Pose2D pose_;
};

}  // namespace pushswitch

#endif  // PUSHSWITCH_KINEMATICS_HPP_
