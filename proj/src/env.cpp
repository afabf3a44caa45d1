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

#include "pushswitch/env.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pushswitch {

std::string_view to_string(Executor e) {
  return e == Executor::kMpc ? "mpc" : "spp";
}

Executor parse_executor(std::string_view text) {
  if (text == "mpc") return Executor::kMpc;
  if (text == "spp") return Executor::kPrimitives;
  throw std::invalid_argument("unknown executor '" + std::string(text) + "'");
}

void EpisodeConfig::validate() const {
  if (!(pos_tol > 0.0) || !(ang_tol > 0.0)) {
    throw std::invalid_argument("goal tolerances must be positive");
  }
  if (!(k > 0.0 && k < 1.0) || !(r_min > 0.0)) {
    throw std::invalid_argument("need r_min > 0 and 0 < k < 1");
  }
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  if (!(angle_weight >= 0.0) || init_margin < 0.0 ||
      init_margin >= workspace.half_width || init_margin >= workspace.half_height ||
      !(init_theta_max > 0.0 && init_theta_max <= kPi) ||
      !(spp_rotation_distance >= 0.0)) {
    throw std::invalid_argument("invalid episode configuration");
  }
  Workspace(workspace.half_width, workspace.half_height);
}

State to_state(const Pose2D& p) { return {p.x(), p.y(), p.theta()}; }
Pose2D to_pose(const State& s) { return {s.x(), s.y(), s.z()}; }

double weighted_goal_distance(const State& s, const EpisodeConfig& cfg) {
  const Vec3 d(s.x() - cfg.goal.x(), s.y() - cfg.goal.y(),
               cfg.angle_weight * angle_diff(s.z(), cfg.goal.theta()));
  return d.norm();
}

double potential(const State& s, const EpisodeConfig& cfg) {
  const double goal_norm =
      Vec3(cfg.goal.x(), cfg.goal.y(), cfg.angle_weight * cfg.goal.theta()).norm();
  const double scale = goal_norm > 1e-6 ? goal_norm : cfg.workspace.diagonal();
  return -weighted_goal_distance(s, cfg) / scale;
}

double shaping(const State& s, const State& s_next, const EpisodeConfig& cfg) {
  return cfg.alpha * potential(s_next, cfg) - potential(s, cfg);
}

bool goal_reached(const State& s, const EpisodeConfig& cfg) {
  return at_goal(to_pose(s), cfg.goal, cfg.tolerance());
}

double env_reward(const State& s, const State& s_next, const EpisodeConfig& cfg,
                  bool out_of_workspace) {
  if (goal_reached(s_next, cfg)) return 100.0;
  if (out_of_workspace) return -100.0;
  return weighted_goal_distance(s_next, cfg) < weighted_goal_distance(s, cfg)
             ? 1.0
             : -1.0;
}

// ---------------------------------------------------------------------------

PushEnv::PushEnv(const ShapeModel& shape, const EpisodeConfig& cfg,
                 const MotionModel& model, const MpcConfig& mpc,
                 const NoiseModel& noise, Executor executor)
    : cfg_(cfg),
      mpc_(mpc),
      executor_(executor),
      plant_(shape, model, noise),
      rng_(cfg.seed) {
  cfg_.validate();
  mpc_.validate();
}

void PushEnv::begin_episode(const Pose2D& start) {
  plant_.set_pose(start);
  rounds_ = 0;
  plant_steps_ = 0;
  done_ = false;
  success_ = false;
  trace_.clear();
  regions_.clear();
  TraceRow row;
  row.pose = start;
  trace_.push_back(row);
}

State PushEnv::reset() {
  const double hx = cfg_.workspace.half_width - cfg_.init_margin;
  const double hy = cfg_.workspace.half_height - cfg_.init_margin;
  std::uniform_real_distribution<double> ux(-hx, hx);
  std::uniform_real_distribution<double> uy(-hy, hy);
  std::uniform_real_distribution<double> ut(-cfg_.init_theta_max,
                                            cfg_.init_theta_max);
  Pose2D start;
  do {
    const double x = ux(rng_);
    const double y = uy(rng_);
    start = Pose2D(x, y, ut(rng_));
  } while (at_goal(start, cfg_.goal, cfg_.tolerance()));
  begin_episode(start);
  return state();
}

State PushEnv::reset_to(const Pose2D& start) {
  begin_episode(start);
  return state();
}

void PushEnv::check_action(int idx) const {
  if (done_) throw std::logic_error("step on a finished episode; call reset()");
  if (idx < 0 || idx >= num_actions()) {
    throw std::out_of_range("action index " + std::to_string(idx) + " out of range");
  }
}

DecisionStep PushEnv::step(int action) {
  const RoundResult r = step_action(action);
  return {r.transition, r.goal};
}

RoundResult PushEnv::step_action(int action) {
  return executor_ == Executor::kMpc ? step_round(action) : spp_execute(action);
}

RoundResult PushEnv::step_round(int point_idx) {
  check_action(point_idx);
  const State before = state();
  std::optional<Mcr> mcr;
  if (cfg_.use_mcr) {
    mcr = build_mcr(com_world(plant_.pose(), shape()),
                    com_world(cfg_.goal, shape()), cfg_.r_min, cfg_.k);
  }
  RoundOutcome outcome = run_round(plant_, point_idx + 1, cfg_.goal, mcr,
                                   cfg_.tolerance(), mpc_, solver_);
  return finish_round(before, point_idx, std::move(outcome), std::move(mcr));
}

std::vector<Vec2> PushEnv::primitive_inputs(int primitive_idx) const {
  if (primitive_idx < 0 || primitive_idx >= num_actions()) {
    throw std::out_of_range("primitive index out of range");
  }
  const ShapeModel& s = shape();
  const PushingPoint& pt = s.point(primitive_idx + 1);
  const Vec2 to_com = (s.com() - pt.p).normalized();

  Vec2 dir = to_com;
  double dist = 0.0;
  if (primitive_idx < 4) {
    dist = (cfg_.goal.position() - plant_.pose().position()).cwiseAbs().maxCoeff();
  } else {
    dist = cfg_.spp_rotation_distance;
    const Vec2 perp(-to_com.y(), to_com.x());
    const Vec2 c = pt.p - s.com();
    auto err_after = [&](const Vec2& d) {
      const double dw = push_delta(c, dist * d, plant_.model().h).d_omega;
      return std::abs(angle_diff(plant_.pose().theta() + dw, cfg_.goal.theta()));
    };
    dir = err_after(-perp) < err_after(perp) ? Vec2(-perp) : perp;
  }

  std::vector<Vec2> inputs;
  if (dist <= 0.0) return inputs;
  const double step_max = mpc_.u_max.maxCoeff();
  const int n = static_cast<int>(std::ceil(dist / step_max - 1e-12));
  inputs.assign(static_cast<size_t>(std::max(n, 1)), dir * (dist / std::max(n, 1)));
  return inputs;
}

RoundResult PushEnv::spp_execute(int primitive_idx) {
  check_action(primitive_idx);
  return step_open_loop(primitive_idx, primitive_inputs(primitive_idx));
}

RoundResult PushEnv::step_open_loop(int point_idx,
                                    const std::vector<Vec2>& inputs) {
  check_action(point_idx);
  const State before = state();
  RoundOutcome outcome = run_open_loop(plant_, point_idx + 1, inputs);
  return finish_round(before, point_idx, std::move(outcome), std::nullopt);
}

RoundResult PushEnv::finish_round(const State& before, int point_idx,
                                  RoundOutcome outcome, std::optional<Mcr> mcr) {
  ++rounds_;
  RoundResult r;
  const State after = state();
  r.out_of_workspace = !in_workspace(cfg_.workspace, plant_.pose());
  r.goal = goal_reached(after, cfg_);
  r.r_env = env_reward(before, after, cfg_, r.out_of_workspace);
  r.r_shaping = shaping(before, after, cfg_);
  r.transition.s = before;
  r.transition.action = point_idx;
  r.transition.reward = r.r_env + r.r_shaping;
  r.transition.s_next = after;
  done_ = r.goal || r.out_of_workspace || rounds_ >= cfg_.max_rounds;
  success_ = r.goal;
  r.transition.done = done_;

  const std::string_view kind = mcr ? mcr->kind() : std::string_view("none");
  if (mcr) regions_.push_back(*mcr);
  const int n = outcome.steps;
  for (int i = 0; i < std::max(n, 1); ++i) {
    TraceRow row;
    if (n > 0) ++plant_steps_;
    row.step = plant_steps_;
    row.round = rounds_;
    row.point_id = point_idx + 1;
    row.pose = outcome.trajectory[static_cast<size_t>(n > 0 ? i + 1 : 0)];
    row.u = n > 0 ? outcome.inputs[static_cast<size_t>(i)] : Vec2::Zero();
    row.mcr_kind = kind;
    if (i == std::max(n, 1) - 1) {
      row.r_env = r.r_env;
      row.r_shaping = r.r_shaping;
    }
    trace_.push_back(row);
  }
  r.outcome = std::move(outcome);
  r.mcr = std::move(mcr);
  return r;
}

std::vector<Pose2D> PushEnv::pose_trace() const {
  std::vector<Pose2D> poses;
  poses.reserve(trace_.size());
  for (const auto& row : trace_) poses.push_back(row.pose);
  return poses;
}

int lookahead_action(const PushEnv& env) {
  int best = 0;
  double best_reward = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < env.num_actions(); ++a) {
    PushEnv trial = env;
    const double r = trial.step_action(a).transition.reward;
    if (r > best_reward) {
      best_reward = r;
      best = a;
    }
  }
  return best;
}

}  // namespace pushswitch
