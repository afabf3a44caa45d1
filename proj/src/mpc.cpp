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

#include "pushswitch/mpc.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pushswitch {

void MpcConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("mpc horizon must be >= 1");
  if (!(q_weights.array() > 0.0).all() || !(r_weights.array() > 0.0).all()) {
    throw std::invalid_argument("mpc weights must be positive");
  }
  if (!(u_max.array() > 0.0).all()) {
    throw std::invalid_argument("u_max must be positive");
  }
  if (!(solver_tol > 0.0) || max_solver_iters < 1 || max_outer_iters < 1 ||
      round_step_cap < 0 || stall_window < 1 || stall_eps < 0.0 ||
      boundary_tol < 0.0) {
    throw std::invalid_argument("invalid mpc solver/round settings");
  }
}

FrictionCone friction_cone_rows(const Vec2& e_n, const Vec2& e_t, double mu_c) {
  return {-mu_c * e_n + e_t, -mu_c * e_n - e_t};
}

// ---------------------------------------------------------------------------
// Input set.

namespace {

// Sutherland-Hodgman clip of a convex polygon against row . u <= 0.
std::vector<Vec2> clip(const std::vector<Vec2>& poly, const Vec2& row) {
  std::vector<Vec2> out;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const double fa = row.dot(a);
    const double fb = row.dot(b);
    if (fa <= 0.0) out.push_back(a);
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
      const double t = fa / (fa - fb);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

Vec2 project_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return a;
  const double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
  return a + t * d;
}

}  // namespace

InputSet::InputSet(const FrictionCone& cone, const Vec2& u_max)
    : cone_(cone), u_max_(u_max) {
  std::vector<Vec2> box{{-u_max.x(), -u_max.y()},
                        {u_max.x(), -u_max.y()},
                        {u_max.x(), u_max.y()},
                        {-u_max.x(), u_max.y()}};
  vertices_ = clip(clip(box, cone.row_a), cone.row_b);
  if (vertices_.empty()) vertices_.push_back(Vec2::Zero());
}

bool InputSet::contains(const Vec2& u, double tol) const {
  return cone_.contains(u, tol) && std::abs(u.x()) <= u_max_.x() + tol &&
         std::abs(u.y()) <= u_max_.y() + tol;
}

Vec2 InputSet::project(const Vec2& u) const {
  if (contains(u)) return u;
  const size_t n = vertices_.size();
  Vec2 best = vertices_.front();
  double best_d = (best - u).squaredNorm();
  for (size_t i = 0; i < n; ++i) {
    const Vec2 q = project_segment(vertices_[i], vertices_[(i + 1) % n], u);
    const double d = (q - u).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

Vec2 project_input(const Vec2& u, const FrictionCone& cone, const Vec2& u_max) {
  return InputSet(cone, u_max).project(u);
}

std::string_view to_string(MpcStatus s) {
  switch (s) {
    case MpcStatus::kConverged:
      return "converged";
    case MpcStatus::kIterCap:
      return "iter_cap";
    case MpcStatus::kInfeasible:
      return "infeasible";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Cost.

namespace {

Vec3 initial_error(const MpcProblem& p) {
  Vec3 e = p.x0 - p.x_star;
  e.z() = angle_diff(p.x0.z(), p.x_star.z());
  return e;
}

}  // namespace

double mpc_cost(const MpcProblem& problem, const std::vector<Vec2>& u_seq) {
  const Vec3 e0 = initial_error(problem);
  const auto& q = problem.config.q_weights;
  const auto& r = problem.config.r_weights;
  Vec2 s = Vec2::Zero();
  double j = 0.0;
  for (const Vec2& u : u_seq) {
    s += u;
    const Vec3 e = e0 + problem.B * s;
    j += e.cwiseProduct(q).dot(e) + u.cwiseProduct(r).dot(u);
  }
  return j;
}

std::vector<Vec3> mpc_predict(const MpcProblem& problem,
                              const std::vector<Vec2>& u_seq) {
  std::vector<Vec3> xs;
  xs.reserve(u_seq.size());
  Vec2 s = Vec2::Zero();
  for (const Vec2& u : u_seq) {
    s += u;
    xs.push_back(problem.x0 + problem.B * s);
  }
  return xs;
}

// ---------------------------------------------------------------------------
// Solver.

struct MpcSolver::Constraints {
  Vec3 e0 = Vec3::Zero();
  bool active = false;
  std::vector<Halfplane> halfplanes;
  std::vector<double> lambda;
  double rho = 0.0;
};

double MpcSolver::k_eigen(int n) {
  // Largest eigenvalue of K(j,k) = n - max(j,k): the Gram matrix of the
  // prefix-sum operator.
  if (n != cached_n_) {
    Eigen::MatrixXd k(n, n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) k(a, b) = n - std::max(a, b);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k, Eigen::EigenvaluesOnly);
    cached_k_ = es.eigenvalues().maxCoeff();
    cached_n_ = n;
  }
  return cached_k_;
}

double MpcSolver::objective(const MpcProblem& p, const Constraints& c,
                            const std::vector<Vec2>& u) {
  const auto& q = p.config.q_weights;
  const auto& r = p.config.r_weights;
  Vec2 s = Vec2::Zero();
  double j = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    s += u[i];
    const Vec3 e = c.e0 + p.B * s;
    j += e.cwiseProduct(q).dot(e) + u[i].cwiseProduct(r).dot(u[i]);
    if (c.active) {
      const Vec2 pos = p.x0.head<2>() + p.B.topRows<2>() * s;
      const double g = c.halfplanes[i].normal.dot(pos) - c.halfplanes[i].offset;
      const double t = std::max(0.0, g + c.lambda[i] / c.rho);
      j += 0.5 * c.rho * t * t - 0.5 * c.lambda[i] * c.lambda[i] / c.rho;
    }
  }
  return j;
}

void MpcSolver::gradient(const MpcProblem& p, const Constraints& c,
                         const std::vector<Vec2>& u, std::vector<Vec2>& g) {
  const size_t n = u.size();
  const Vec3& q = p.config.q_weights;
  const Vec2& r = p.config.r_weights;
  sums_.resize(n);
  Vec2 s = Vec2::Zero();
  for (size_t i = 0; i < n; ++i) {
    s += u[i];
    const Vec3 e = c.e0 + p.B * s;
    Vec2 a = 2.0 * p.B.transpose() * e.cwiseProduct(q);
    if (c.active) {
      const Vec2 pos = p.x0.head<2>() + p.B.topRows<2>() * s;
      const double gi = c.halfplanes[i].normal.dot(pos) - c.halfplanes[i].offset;
      const double t = std::max(0.0, gi + c.lambda[i] / c.rho);
      if (t > 0.0) {
        a += c.rho * t * (p.B.topRows<2>().transpose() * c.halfplanes[i].normal);
      }
    }
    sums_[i] = a;
  }
  g.resize(n);
  Vec2 acc = Vec2::Zero();
  for (size_t j = n; j-- > 0;) {
    acc += sums_[j];
    g[j] = acc + 2.0 * r.cwiseProduct(u[j]);
  }
}

int MpcSolver::inner_solve(const MpcProblem& p, const Constraints& c,
                           const InputSet& set, double lipschitz, int budget,
                           std::vector<Vec2>& u, bool& converged) {
  const size_t n = u.size();
  const double eps = p.config.solver_tol * p.config.u_max.maxCoeff();
  const double step_size = 1.0 / lipschitz;
  y_ = u;
  x_prev_ = u;
  z_.resize(n);
  double fx = objective(p, c, u);
  double t = 1.0;
  if (record_) history_.emplace_back().push_back(fx);
  converged = false;

  int it = 0;
  while (it < budget) {
    ++it;
    gradient(p, c, y_, grad_);
    double step = 0.0;
    for (size_t j = 0; j < n; ++j) {
      z_[j] = set.project(y_[j] - step_size * grad_[j]);
      step = std::max(step, (z_[j] - y_[j]).cwiseAbs().maxCoeff());
    }
    const double fz = objective(p, c, z_);
    const bool accepted = fz <= fx;
    // Gradient-mapping restart test: momentum direction disagrees with the
    // projected-gradient step.
    double restart_dot = 0.0;
    for (size_t j = 0; j < n; ++j) {
      restart_dot += (y_[j] - z_[j]).dot(z_[j] - u[j]);
    }
    x_prev_ = u;
    if (accepted) {
      u = z_;
      fx = fz;
      if (record_) history_.back().push_back(fx);
    }
    if (step <= eps) {
      converged = true;
      break;
    }
    if (!accepted || restart_dot > 0.0) {
      t = 1.0;
      y_ = u;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    for (size_t j = 0; j < n; ++j) y_[j] = u[j] + beta * (u[j] - x_prev_[j]);
    t = t_next;
  }
  return it;
}

MpcSolution MpcSolver::solve(const MpcProblem& problem,
                             const std::vector<Vec2>* warm_start) {
  const MpcConfig& cfg = problem.config;
  cfg.validate();
  const int n = cfg.horizon;
  history_.clear();

  const InputSet set(problem.cone, cfg.u_max);
  std::vector<Vec2> u(static_cast<size_t>(n), Vec2::Zero());
  if (warm_start != nullptr) {
    for (int i = 0; i < n && i < static_cast<int>(warm_start->size()); ++i) {
      u[static_cast<size_t>(i)] = set.project((*warm_start)[static_cast<size_t>(i)]);
    }
  }

  Constraints c;
  c.e0 = initial_error(problem);
  const Vec2 x0 = problem.x0.head<2>();
  const Eigen::Matrix<double, 2, 2> bxy = problem.B.topRows<2>();

  MpcSolution sol;
  if (problem.mcr && mcr_signed_distance(*problem.mcr, x0) > 1e-9) {
    sol.u_seq.assign(static_cast<size_t>(n), Vec2::Zero());
    sol.x_pred = mpc_predict(problem, sol.u_seq);
    sol.cost = mpc_cost(problem, sol.u_seq);
    sol.status = MpcStatus::kInfeasible;
    return sol;
  }

  auto positions = [&](const std::vector<Vec2>& us) {
    std::vector<Vec2> ps;
    ps.reserve(us.size());
    Vec2 s = Vec2::Zero();
    for (const Vec2& v : us) {
      s += v;
      ps.push_back(x0 + bxy * s);
    }
    return ps;
  };
  // Tangent halfplanes at the current predictions, relaxed so that the start
  // position is always admissible.
  auto linearize = [&](const std::vector<Vec2>& us) {
    const auto ps = positions(us);
    c.halfplanes.resize(ps.size());
    for (size_t i = 0; i < ps.size(); ++i) {
      Halfplane h = mcr_halfspace(*problem.mcr, ps[i]);
      h.offset = std::max(h.offset, h.normal.dot(x0));
      c.halfplanes[i] = h;
    }
  };

  const double qb_max =
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(
          problem.B.transpose() * cfg.q_weights.asDiagonal() * problem.B,
          Eigen::EigenvaluesOnly)
          .eigenvalues()
          .maxCoeff();
  const double bxy_norm2 =
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(bxy.transpose() * bxy,
                                                     Eigen::EigenvaluesOnly)
          .eigenvalues()
          .maxCoeff();
  const double kmax = k_eigen(n);
  const double base_lipschitz =
      2.0 * (kmax * qb_max + cfg.r_weights.maxCoeff());

  const double rho0 = 2.0 * cfg.q_weights.head<2>().maxCoeff();
  const double rho_max = 1e4 * rho0;
  if (problem.mcr) {
    c.active = true;
    c.rho = rho0;
    c.lambda.assign(static_cast<size_t>(n), 0.0);
    linearize(u);
  }

  int total = 0;
  bool converged = false;
  double prev_viol = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < cfg.max_outer_iters; ++outer) {
    const double lipschitz =
        base_lipschitz + (c.active ? c.rho * kmax * bxy_norm2 : 0.0);
    bool inner_ok = false;
    total += inner_solve(problem, c, set, lipschitz, cfg.max_solver_iters - total,
                         u, inner_ok);
    if (!c.active) {
      converged = inner_ok;
      break;
    }
    const auto ps = positions(u);
    double viol = 0.0;
    double exact_viol = 0.0;
    for (size_t i = 0; i < ps.size(); ++i) {
      const double g = c.halfplanes[i].normal.dot(ps[i]) - c.halfplanes[i].offset;
      viol = std::max(viol, g);
      c.lambda[i] = std::max(0.0, c.lambda[i] + c.rho * g);
      exact_viol = std::max(exact_viol, mcr_signed_distance(*problem.mcr, ps[i]));
    }
    if (inner_ok && viol <= 1e-10 && exact_viol <= 1e-9) {
      converged = true;
      break;
    }
    if (total >= cfg.max_solver_iters) break;
    if (viol > 0.25 * prev_viol) c.rho = std::min(10.0 * c.rho, rho_max);
    prev_viol = viol;
    linearize(u);
  }

  // Shrink toward the origin (always admissible) until every prediction is
  // inside its tangent halfplane.
  if (problem.mcr) {
    for (int pass = 0; pass < 8; ++pass) {
      linearize(u);
      const auto ps = positions(u);
      double scale = 1.0;
      for (size_t i = 0; i < ps.size(); ++i) {
        const Halfplane& h = c.halfplanes[i];
        const double g = h.normal.dot(ps[i]) - h.offset;
        if (g <= 0.0) continue;
        const double slope = h.normal.dot(ps[i] - x0);
        const double slack = h.offset - h.normal.dot(x0);
        if (slope > 0.0) scale = std::min(scale, std::max(0.0, slack / slope));
      }
      if (scale >= 1.0) break;
      for (auto& v : u) v *= scale;
    }
  }

  sol.u_seq = u;
  sol.x_pred = mpc_predict(problem, u);
  sol.cost = mpc_cost(problem, u);
  sol.iterations = total;
  sol.status = converged ? MpcStatus::kConverged : MpcStatus::kIterCap;
  return sol;
}

// ---------------------------------------------------------------------------
// Rounds.

std::string_view to_string(RoundReason r) {
  switch (r) {
    case RoundReason::kReachedGoal:
      return "reached_goal";
    case RoundReason::kHitMcrBoundary:
      return "hit_mcr_boundary";
    case RoundReason::kStalled:
      return "stalled";
    case RoundReason::kInfeasible:
      return "infeasible";
    case RoundReason::kStepCap:
      return "step_cap";
    case RoundReason::kPrimitiveDone:
      return "primitive_done";
  }
  return "?";
}

bool at_goal(const Pose2D& pose, const Pose2D& goal, const GoalTolerance& tol) {
  return (pose.position() - goal.position()).norm() < tol.pos &&
         std::abs(angle_diff(pose.theta(), goal.theta())) < tol.ang;
}

MpcProblem make_problem(const Plant& plant, int point_id, const Pose2D& target,
                        const std::optional<Mcr>& mcr, const MpcConfig& config) {
  const ShapeModel& shape = plant.shape();
  const PushingPoint& pt = shape.point(point_id);
  const Pose2D& pose = plant.pose();
  const Mat32 b_obj = push_jacobian(pt.p - shape.com(), plant.model().h);

  MpcProblem p;
  p.B.topRows<2>() = rotation(pose.theta()) * b_obj.topRows<2>();
  p.B.row(2) = b_obj.row(2);
  p.x0 << com_world(pose, shape), pose.theta();
  p.x_star << com_world(target, shape), target.theta();
  p.cone = friction_cone_rows(pt.e_n, pt.e_t, plant.model().mu_c);
  p.mcr = mcr;
  p.config = config;
  return p;
}

RoundOutcome run_round(Plant& plant, int point_id, const Pose2D& target,
                       const std::optional<Mcr>& mcr, const GoalTolerance& tol,
                       const MpcConfig& config, MpcSolver& solver) {
  config.validate();
  plant.shape().point(point_id);  // validates the id

  RoundOutcome out;
  out.trajectory.push_back(plant.pose());
  auto com = [&] { return com_world(plant.pose(), plant.shape()); };

  if (at_goal(plant.pose(), target, tol)) {
    out.reason = RoundReason::kReachedGoal;
    return out;
  }
  // The ellipse places the start on its boundary by construction, so only a
  // start clearly outside ends the round immediately.
  if (mcr && mcr_signed_distance(*mcr, com()) > config.boundary_tol) {
    out.reason = RoundReason::kHitMcrBoundary;
    return out;
  }

  std::vector<Vec2> warm;
  std::vector<double> costs;
  for (;;) {
    if (out.steps >= config.round_step_cap) {
      out.reason = RoundReason::kStepCap;
      return out;
    }
    const MpcProblem problem = make_problem(plant, point_id, target, mcr, config);
    MpcSolution sol = solver.solve(problem, warm.empty() ? nullptr : &warm);
    if (sol.status == MpcStatus::kInfeasible) {
      out.diagnostics.push_back(std::move(sol));
      out.reason = RoundReason::kInfeasible;
      return out;
    }
    const Vec2 u0 = sol.u_seq.front();
    plant.push(point_id, u0);
    ++out.steps;
    out.trajectory.push_back(plant.pose());
    out.inputs.push_back(u0);

    warm.assign(sol.u_seq.begin() + 1, sol.u_seq.end());
    warm.push_back(sol.u_seq.back());
    costs.push_back(sol.cost);
    out.diagnostics.push_back(std::move(sol));

    if (at_goal(plant.pose(), target, tol)) {
      out.reason = RoundReason::kReachedGoal;
      return out;
    }
    if (mcr && mcr_signed_distance(*mcr, com()) > -config.boundary_tol) {
      out.reason = RoundReason::kHitMcrBoundary;
      return out;
    }
    const size_t w = static_cast<size_t>(config.stall_window);
    if (costs.size() > w) {
      const double before =
          *std::min_element(costs.begin(), costs.end() - static_cast<long>(w));
      const double recent =
          *std::min_element(costs.end() - static_cast<long>(w), costs.end());
      if (before - recent < config.stall_eps) {
        out.reason = RoundReason::kStalled;
        return out;
      }
    }
  }
}

RoundOutcome run_open_loop(Plant& plant, int point_id,
                           const std::vector<Vec2>& inputs) {
  plant.shape().point(point_id);
  RoundOutcome out;
  out.trajectory.push_back(plant.pose());
  for (const Vec2& u : inputs) {
    plant.push(point_id, u);
    out.trajectory.push_back(plant.pose());
    out.inputs.push_back(u);
    ++out.steps;
  }
  out.reason = RoundReason::kPrimitiveDone;
  return out;
}

}  // namespace pushswitch
