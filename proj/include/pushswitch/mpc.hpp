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

// Receding-horizon pushing controller.
//
// For a fixed pushing point the state x = [com_x, com_y, omega] evolves as
// x(i+1) = x(i) + B u(i) with B the world-lifted push Jacobian. The solver
// minimizes
//
//   J(u) = sum_{i=1..N} |x(i) - x*|_Q^2 + |u(i-1)|_R^2
//
// subject to, per step, the sticking friction cone and the input box
// (handled by exact Euclidean projection), and to every predicted position
// lying in the motion constraint region. The region is convex; it is
// replaced by the tangent halfplane at the boundary point nearest to each
// predicted position and enforced with an augmented Lagrangian. Each
// subproblem is solved by monotone accelerated projected gradient.

#ifndef PUSHSWITCH_MPC_HPP_
#define PUSHSWITCH_MPC_HPP_

#include <Eigen/Core>

#include <optional>
#include <string_view>
#include <vector>

#include "pushswitch/geometry.hpp"
#include "pushswitch/kinematics.hpp"

namespace pushswitch {

using Vec3 = Eigen::Vector3d;

struct MpcConfig {
  int horizon = 10;
  Vec3 q_weights{100.0, 100.0, 10.0};
  Vec2 r_weights{1.0, 1.0};
  Vec2 u_max{0.01, 0.01};
  // Stationarity tolerance on the projected-gradient step, relative to
  // max(u_max).
  double solver_tol = 1e-6;
  int max_solver_iters = 4000;
  int max_outer_iters = 25;
  int round_step_cap = 40;
  int stall_window = 5;
  double stall_eps = 1e-8;
  double boundary_tol = 1e-4;

  void validate() const;
};

// Two rows r with r . u <= 0; feasible pushes satisfy
// |e_t . u| <= mu (e_n . u).
struct FrictionCone {
  Vec2 row_a = Vec2::Zero();  // (-mu e_n + e_t)
  Vec2 row_b = Vec2::Zero();  // (-mu e_n - e_t)

  bool contains(const Vec2& u, double tol = 0.0) const {
    return row_a.dot(u) <= tol && row_b.dot(u) <= tol;
  }
};

FrictionCone friction_cone_rows(const Vec2& e_n, const Vec2& e_t, double mu_c);

// The convex polygon {cone} intersected with [-u_max, u_max]^2.
class InputSet {
 public:
  InputSet(const FrictionCone& cone, const Vec2& u_max);

  bool contains(const Vec2& u, double tol = 0.0) const;
  Vec2 project(const Vec2& u) const;
  const std::vector<Vec2>& vertices() const { return vertices_; }

 private:
  FrictionCone cone_;
  Vec2 u_max_;
  std::vector<Vec2> vertices_;
};

Vec2 project_input(const Vec2& u, const FrictionCone& cone, const Vec2& u_max);

struct MpcProblem {
  Mat32 B = Mat32::Zero();  // world frame
  Vec3 x0 = Vec3::Zero();
  Vec3 x_star = Vec3::Zero();
  FrictionCone cone;         // object frame, acts on u directly
  std::optional<Mcr> mcr;    // world frame, acts on predicted positions
  MpcConfig config;
};

enum class MpcStatus { kConverged, kIterCap, kInfeasible };
std::string_view to_string(MpcStatus s);

struct MpcSolution {
  std::vector<Vec2> u_seq;
  std::vector<Vec3> x_pred;
  double cost = 0.0;
  int iterations = 0;
  MpcStatus status = MpcStatus::kConverged;
};

// Unpenalized cost and predicted states of an input sequence.
double mpc_cost(const MpcProblem& problem, const std::vector<Vec2>& u_seq);
std::vector<Vec3> mpc_predict(const MpcProblem& problem,
                              const std::vector<Vec2>& u_seq);

// Owns scratch buffers; one instance per thread.
class MpcSolver {
 public:
  MpcSolution solve(const MpcProblem& problem,
                    const std::vector<Vec2>* warm_start = nullptr);

  // Penalized objective of every accepted inner iterate of the last solve
  // (recorded only when enabled).
  void record_accepted(bool on) { record_ = on; }
  const std::vector<std::vector<double>>& accepted_history() const {
    return history_;
  }

 private:
  struct Constraints;
  double objective(const MpcProblem& p, const Constraints& c,
                   const std::vector<Vec2>& u);
  void gradient(const MpcProblem& p, const Constraints& c,
                const std::vector<Vec2>& u, std::vector<Vec2>& g);
  int inner_solve(const MpcProblem& p, const Constraints& c,
                  const InputSet& set, double lipschitz, int budget,
                  std::vector<Vec2>& u, bool& converged);
  double k_eigen(int n);

  std::vector<Vec2> y_, z_, x_prev_, grad_;
  std::vector<Vec2> sums_;
  std::vector<Vec3> err_;
  int cached_n_ = -1;
  double cached_k_ = 0.0;
  bool record_ = false;
  std::vector<std::vector<double>> history_;
};

// ---------------------------------------------------------------------------
// Pushing rounds.

enum class RoundReason {
  kReachedGoal,
  kHitMcrBoundary,
  kStalled,
  kInfeasible,
  kStepCap,
  kPrimitiveDone,  // open-loop primitive executed to completion
};
std::string_view to_string(RoundReason r);

struct GoalTolerance {
  double pos = 0.015;
  double ang = 0.0436;
};

bool at_goal(const Pose2D& pose, const Pose2D& goal, const GoalTolerance& tol);

struct RoundOutcome {
  RoundReason reason = RoundReason::kStepCap;
  int steps = 0;
  std::vector<Pose2D> trajectory;  // includes the start pose
  std::vector<Vec2> inputs;        // object-frame input per plant step
  std::vector<MpcSolution> diagnostics;  // empty for open-loop rounds
};

// Regulates the object toward `target` with a fixed pushing point until one
// of the termination reasons fires. `mcr` applies to CoM positions; pass
// std::nullopt to disable it.
RoundOutcome run_round(Plant& plant, int point_id, const Pose2D& target,
                       const std::optional<Mcr>& mcr, const GoalTolerance& tol,
                       const MpcConfig& config, MpcSolver& solver);

// Applies a fixed input sequence at one point (no feedback, no region).
RoundOutcome run_open_loop(Plant& plant, int point_id,
                           const std::vector<Vec2>& inputs);

// Problem for the current plant state: B lifted by the measured heading.
MpcProblem make_problem(const Plant& plant, int point_id, const Pose2D& target,
                        const std::optional<Mcr>& mcr, const MpcConfig& config);

}  // namespace pushswitch

#endif  // PUSHSWITCH_MPC_HPP_
