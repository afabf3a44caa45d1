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

// The switching-push decision process. One action selects a pushing point;
// the environment then runs a whole pushing round (closed-loop MPC inside a
// motion constraint region, or an open-loop primitive) and returns the
// shaped reward
//
//   R(s, s') = R_env(s, s') + alpha * Phi(s') - Phi(s),
//   Phi(s)   = -|W (s - s_g)| / D.

#ifndef PUSHSWITCH_ENV_HPP_
#define PUSHSWITCH_ENV_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "pushswitch/geometry.hpp"
#include "pushswitch/kinematics.hpp"
#include "pushswitch/mpc.hpp"
#include "pushswitch/qlearn.hpp"

namespace pushswitch {

enum class Executor { kMpc, kPrimitives };
std::string_view to_string(Executor e);
Executor parse_executor(std::string_view text);

struct EpisodeConfig {
  ShapeName shape = ShapeName::kT;
  Pose2D goal{0.0, 0.0, 0.0};
  Workspace workspace{0.25, 0.25};
  double r_min = 0.03;
  double k = 1.0 / 3.0;
  int max_rounds = 70;
  double pos_tol = 0.015;
  double ang_tol = 0.0436;
  double alpha = 0.9;
  double angle_weight = 0.1;  // m/rad inside mixed norms
  // Start sampler: positions in the workspace shrunk by init_margin, heading
  // uniform in (-init_theta_max, init_theta_max].
  double init_margin = 0.05;
  double init_theta_max = kPi;
  bool use_mcr = true;
  double spp_rotation_distance = 0.025;
  std::uint64_t seed = 0;

  void validate() const;
  GoalTolerance tolerance() const { return {pos_tol, ang_tol}; }
};

State to_state(const Pose2D& p);
Pose2D to_pose(const State& s);

// |W (s - s_g)| with the angle difference wrapped.
double weighted_goal_distance(const State& s, const EpisodeConfig& cfg);
double potential(const State& s, const EpisodeConfig& cfg);
double shaping(const State& s, const State& s_next, const EpisodeConfig& cfg);
bool goal_reached(const State& s, const EpisodeConfig& cfg);
double env_reward(const State& s, const State& s_next, const EpisodeConfig& cfg,
                  bool out_of_workspace);

struct RoundResult {
  Transition transition;
  RoundOutcome outcome;
  double r_env = 0.0;
  double r_shaping = 0.0;
  bool goal = false;
  bool out_of_workspace = false;
  std::optional<Mcr> mcr;
};

// One row per plant step; zero-step rounds still emit one row.
struct TraceRow {
  int step = 0;
  int round = 0;
  int point_id = 0;
  Pose2D pose;
  Vec2 u = Vec2::Zero();
  double r_env = 0.0;
  double r_shaping = 0.0;
  std::string_view mcr_kind = "none";
};

class PushEnv : public DecisionEnv {
 public:
  PushEnv(const ShapeModel& shape, const EpisodeConfig& cfg,
          const MotionModel& model = {}, const MpcConfig& mpc = {},
          const NoiseModel& noise = {}, Executor executor = Executor::kMpc);

  // Random start (never already within goal tolerance).
  State reset() override;
  State reset_to(const Pose2D& start);

  // Dispatches to step_round or spp_execute according to the executor.
  DecisionStep step(int action) override;
  RoundResult step_action(int action);

  // Closed-loop MPC round at point index 0..5.
  RoundResult step_round(int point_idx);
  // Open-loop SP-PP primitive 0..5.
  RoundResult spp_execute(int primitive_idx);
  // Applies a fixed input sequence at a point; the region is not used.
  RoundResult step_open_loop(int point_idx, const std::vector<Vec2>& inputs);
  std::vector<Vec2> primitive_inputs(int primitive_idx) const;

  State state() const { return to_state(plant_.pose()); }
  const Pose2D& pose() const { return plant_.pose(); }
  bool done() const { return done_; }
  bool success() const { return success_; }
  int rounds() const { return rounds_; }
  int plant_steps() const { return plant_steps_; }
  const EpisodeConfig& config() const { return cfg_; }
  const MpcConfig& mpc_config() const { return mpc_; }
  const ShapeModel& shape() const { return plant_.shape(); }
  Executor executor() const { return executor_; }
  int num_actions() const { return shape().num_points(); }

  const std::vector<TraceRow>& trace() const { return trace_; }
  std::vector<Pose2D> pose_trace() const;
  const std::vector<Mcr>& round_regions() const { return regions_; }

 private:
  RoundResult finish_round(const State& before, int point_idx,
                           RoundOutcome outcome, std::optional<Mcr> mcr);
  void begin_episode(const Pose2D& start);
  void check_action(int idx) const;

  EpisodeConfig cfg_;
  MpcConfig mpc_;
  Executor executor_;
  Plant plant_;
  MpcSolver solver_;
  std::mt19937_64 rng_;
  int rounds_ = 0;
  int plant_steps_ = 0;
  bool done_ = true;
  bool success_ = false;
  std::vector<TraceRow> trace_;
  std::vector<Mcr> regions_;
};

// Simulates every action on a copy of the environment and returns the one
// with the largest immediate reward (lowest index on ties).
int lookahead_action(const PushEnv& env);

}  // namespace pushswitch

#endif  // PUSHSWITCH_ENV_HPP_
