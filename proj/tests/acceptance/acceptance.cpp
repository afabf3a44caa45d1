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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Long training stages print progress to stderr.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/oracles.hpp"
#include "pushswitch/bench.hpp"
#include "pushswitch/env.hpp"
#include "pushswitch/geometry.hpp"
#include "pushswitch/io.hpp"
#include "pushswitch/kinematics.hpp"
#include "pushswitch/mpc.hpp"
#include "pushswitch/qlearn.hpp"

using namespace pushswitch;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

int failures = 0;

void report(int id, const char* name, const Verdict& v, const std::string& summary) {
  std::printf("%s %d %s: %s%s%s\n", v.pass ? "PASS" : "FAIL", id, name, summary.c_str(),
              v.detail.empty() ? "" : "; first failure: ", v.detail.c_str());
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------------------

void sticking_identity() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> c(-0.1, 0.1);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  std::uniform_real_distribution<double> h(0.05, 1.0);
  Verdict v;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Vec2 cp(c(rng), c(rng));
    const Vec2 up(u(rng), u(rng));
    const PushDelta d = push_delta(cp, up, h(rng));
    const double err = (d.d_com + d.d_omega * Vec2(-cp.y(), cp.x()) - up).norm();
    worst = std::max(worst, err);
  }
  const double secs = seconds_since(t0);
  v.require(worst <= 1e-12, fmt("residual %.3g", worst));
  v.require(secs < 1.0, fmt("took %.3f s", secs));
  report(1, "sticking-contact identity", v,
         fmt("10000 samples, max residual %.3g, %.3f s", worst, secs));
}

void kinematics_spot_values() {
  Verdict v;
  struct Case {
    Vec2 c, u;
    std::array<double, 3> approx;  // listed values
    std::array<double, 3> digits;  // relative resolution of the listed values
  };
  const std::vector<Case> cases = {
      {Vec2(0.0, -0.078), Vec2(0.0, 0.01), {0.0, 0.01, 0.0}, {0.0, 0.0, 0.0}},
      {Vec2(0.031, -0.078), Vec2(-0.01, 0.0), {-0.0097633, 9.407e-5, -0.0030345},
       {1e-4, 1e-3, 1e-4}},
  };
  double worst = 0.0;
  for (const auto& k : cases) {
    const PushDelta d = push_delta(k.c, k.u, 0.5);
    const auto o = oracle::push_delta(k.c.x(), k.c.y(), k.u.x(), k.u.y(), 0.5);
    const double got[3] = {d.d_com.x(), d.d_com.y(), d.d_omega};
    for (int i = 0; i < 3; ++i) {
      const double rel = o[i] == 0.0 ? std::abs(got[i]) : std::abs(got[i] - o[i]) / std::abs(o[i]);
      worst = std::max(worst, rel);
      v.require(o[i] == 0.0 ? std::abs(got[i]) <= 1e-18 : rel <= 1e-9,
                fmt("component %d differs from the direct evaluation by %.3g", i, rel));
      const double tol = k.digits[i] * std::abs(k.approx[i]) + 1e-15;
      v.require(std::abs(got[i] - k.approx[i]) <= tol,
                fmt("component %d = %.9g, listed %.9g", i, got[i], k.approx[i]));
    }
  }
  // The same push through the plant at the identity pose.
  const Pose2D p = apply_push(Pose2D(), builtin_shape(ShapeName::kT), 3, Vec2(0, 0.01), {}, {});
  v.require(std::abs(p.x()) <= 1e-15 && std::abs(p.y() - 0.01) <= 1e-15 &&
                std::abs(p.theta()) <= 1e-15,
            "T point 3 push does not land at (0, 0.01, 0)");
  report(2, "kinematics spot values", v,
         fmt("%zu pushes vs direct evaluation, max relative error %.3g", cases.size(), worst));
}

MpcProblem random_problem(std::mt19937_64& rng, bool with_mcr) {
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_real_distribution<double> pos(-0.03, 0.03);
  std::uniform_real_distribution<double> cd(-0.08, 0.08);
  const double a = ang(rng);
  const Vec2 e_n(std::cos(a), std::sin(a));
  const Vec2 e_t(-e_n.y(), e_n.x());
  MpcProblem p;
  const double th = ang(rng);
  const Vec2 c(cd(rng), cd(rng));
  const Mat32 b = push_jacobian(c, 0.5);
  p.B.topRows<2>() = rotation(th) * b.topRows<2>();
  p.B.row(2) = b.row(2);
  p.x0 = Vec3(pos(rng), pos(rng), th);
  p.x_star = Vec3(pos(rng), pos(rng), th + 0.2 * ang(rng));
  p.cone = friction_cone_rows(e_n, e_t, 0.6);
  p.config.horizon = 2;
  if (with_mcr) p.mcr = build_mcr(p.x0.head<2>(), p.x_star.head<2>(), 0.03, 1.0 / 3.0);
  return p;
}

void mpc_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(303);
  MpcSolver solver;
  Verdict v;
  double worst_gap = -1e300;
  double worst_violation = 0.0;
  for (int i = 0; i < 50; ++i) {
    const MpcProblem p = random_problem(rng, i % 2 == 1);
    const MpcSolution s = solver.solve(p);
    const double grid = oracle::grid_mpc_n2(p, 41);
    const double cost = oracle::mpc_cost(p, s.u_seq);
    worst_gap = std::max(worst_gap, cost - grid);
    v.require(s.status != MpcStatus::kInfeasible, fmt("problem %d reported infeasible", i));
    v.require(cost <= grid + 1e-6, fmt("problem %d: cost %.9g > grid %.9g", i, cost, grid));
    for (const Vec2& u : s.u_seq) {
      const double viol = std::max({p.cone.row_a.dot(u), p.cone.row_b.dot(u),
                                    std::abs(u.x()) - p.config.u_max.x(),
                                    std::abs(u.y()) - p.config.u_max.y(), 0.0});
      worst_violation = std::max(worst_violation, viol);
    }
  }
  const double secs = seconds_since(t0);
  v.require(worst_violation <= 1e-8, fmt("constraint violation %.3g", worst_violation));
  v.require(secs < 120.0, fmt("took %.1f s", secs));
  report(3, "MPC oracle equivalence", v,
         fmt("50 problems, max (solver - grid) cost %.3g, max violation %.3g, %.1f s", worst_gap,
             worst_violation, secs));
}

void projection_oracle() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_real_distribution<double> d(-0.03, 0.03);
  const Vec2 um(0.01, 0.01);
  Verdict v;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a = ang(rng);
    const FrictionCone cone =
        friction_cone_rows(Vec2(std::cos(a), std::sin(a)), Vec2(-std::sin(a), std::cos(a)), 0.6);
    const Vec2 u(d(rng), d(rng));
    const Vec2 p = project_input(u, cone, um);
    const Vec2 g = oracle::grid_project(u, cone, um, 2001);
    // Distances to u: the exact projection may not be beaten by any feasible
    // grid point and must be within the tolerance of the best one.
    const double gap = (u - g).norm() - (u - p).norm();
    worst = std::max(worst, std::abs(gap));
    v.require(InputSet(cone, um).contains(p, 1e-15), fmt("input %d: projection infeasible", i));
    v.require(gap >= -1e-15 && gap <= 2e-5, fmt("input %d: distance gap %.3g", i, gap));
  }
  report(4, "cone projection oracle", v,
         fmt("100 inputs, max nearest-distance gap to the 2001^2 grid %.3g", worst));
}

// Finite differences are only meaningful where the loss is smooth: every
// hidden pre-activation and the TD error must stay clear of their kinks.
bool clear_of_kinks(const QNet& n, const TdSample& t, double margin) {
  const Eigen::Matrix<double, 10, 1> z1 = n.w1 * t.s + n.b1;
  const Eigen::Matrix<double, 10, 1> z2 = n.w2 * z1.cwiseMax(0.0) + n.b2;
  const double delta = n.forward(t.s)(t.action) - t.target;
  return z1.cwiseAbs().minCoeff() > margin && z2.cwiseAbs().minCoeff() > margin &&
         std::abs(std::abs(delta) - 1.0) > margin;
}

void network_checks() {
  Verdict v;
  v.require(QNet::kLayerParams[0] == 40 && QNet::kLayerParams[1] == 110 &&
                QNet::kLayerParams[2] == 66 && QNet::num_params() == 216,
            "parameter counts");
  v.require(static_cast<int>(QNet::random(1).flatten().size()) == 216, "flattened size");
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::uniform_int_distribution<int> act(0, 5);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const QNet n = QNet::random(600 + static_cast<std::uint64_t>(trial));
    std::vector<TdSample> batch;
    while (batch.size() < 32) {
      const State s(d(rng), d(rng), 3.0 * d(rng));
      const int a = act(rng);
      const TdSample t{s, a, n.forward(s)(a) + 3.0 * d(rng)};
      if (clear_of_kinks(n, t, 1e-3)) batch.push_back(t);
    }
    const auto analytic = backward(n, batch).grad.flatten();
    const auto fd = oracle::fd_gradient(n.flatten(), batch, 1e-5);
    for (std::size_t i = 0; i < fd.size(); ++i) {
      const double scale = std::max(1e-6, std::max(std::abs(fd[i]), std::abs(analytic[i])));
      const double rel = std::abs(fd[i] - analytic[i]) / scale;
      worst = std::max(worst, rel);
      v.require(rel <= 1e-4, fmt("trial %d parameter %zu relative error %.3g", trial, i, rel));
    }
  }
  for (double delta : {0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0}) {
    const double a = std::abs(delta);
    const double expect = a <= 1.0 ? 0.5 * delta * delta : a - 0.5;
    v.require(huber(delta) == expect && huber(delta) == oracle::huber(delta),
              fmt("huber(%g) = %.17g", delta, huber(delta)));
  }
  report(5, "network and gradient checks", v,
         fmt("counts 40/110/66, 10 batches, max finite-difference relative error %.3g", worst));
}

void shaping_identities() {
  Verdict v;
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<int> act(0, 5);
  double worst = 0.0;
  int rounds = 0;
  for (const ShapeName shape : {ShapeName::kT, ShapeName::kL, ShapeName::kTriangle,
                                ShapeName::kTrapezoid}) {
    for (const Executor exec : {Executor::kMpc, Executor::kPrimitives}) {
      for (int ep = 0; ep < 3; ++ep) {
        EpisodeConfig cfg;
        cfg.shape = shape;
        cfg.alpha = 0.9;
        cfg.max_rounds = 20;
        cfg.seed = 700 + static_cast<std::uint64_t>(ep);
        const double gamma = 0.9;
        PushEnv env(builtin_shape(shape), cfg, {}, {}, {}, exec);
        const State s0 = env.reset();
        State last = s0;
        double discounted = 0.0;
        double g = 1.0;
        int t = 0;
        while (!env.done()) {
          const RoundResult r = env.step_action(act(rng));
          const double f = cfg.alpha * potential(r.transition.s_next, cfg) -
                           potential(r.transition.s, cfg);
          v.require(r.r_shaping == f, fmt("round %d shaping %.17g != %.17g", t, r.r_shaping, f));
          discounted += g * r.r_shaping;
          g *= gamma;
          last = r.transition.s_next;
          ++t;
          ++rounds;
        }
        const double expect = std::pow(gamma, t) * potential(last, cfg) - potential(s0, cfg);
        worst = std::max(worst, std::abs(discounted - expect));
      }
    }
  }
  v.require(worst <= 1e-9, fmt("telescoping residual %.3g", worst));
  report(6, "shaping identities", v,
         fmt("24 episodes, %d rounds, max telescoping residual %.3g", rounds, worst));
}

// ---------------------------------------------------------------------------
// Learning criteria.

struct Trained {
  TrainResult result;
  double secs = 0.0;
};

Trained train_net(ShapeName shape, Executor exec, std::uint64_t seed, int episodes) {
  EpisodeConfig ecfg;
  ecfg.shape = shape;
  ecfg.seed = seed;
  TrainConfig tcfg;
  tcfg.seed = seed;
  tcfg.episodes = episodes;
  NoiseModel noise;
  noise.seed = seed;
  PushEnv env(builtin_shape(shape), ecfg, {}, {}, noise, exec);
  const auto t0 = Clock::now();
  Trained t{train(env, tcfg), 0.0};
  t.secs = seconds_since(t0);
  return t;
}

// Earliest episode count <= limit at which the trailing-50 success reaches
// the threshold, or -1.
int reached_at(const std::vector<EpisodeLog>& log, double threshold, std::size_t limit) {
  for (std::size_t end = 50; end <= std::min(limit, log.size()); ++end) {
    if (trailing_success(log, end, 50) >= threshold) return static_cast<int>(end);
  }
  return -1;
}

const ShapeName kShapes[] = {ShapeName::kT, ShapeName::kL, ShapeName::kTriangle,
                             ShapeName::kTrapezoid};

void training_and_evaluation() {
  Verdict v7;
  Verdict v8;
  std::string summary7;
  std::string summary8;
  for (const ShapeName shape : kShapes) {
    int good = 0;
    QNet first_net = QNet::zeros();
    summary7 += std::string(summary7.empty() ? "" : "; ") + std::string(to_string(shape)) + ":";
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const Trained t = train_net(shape, Executor::kMpc, seed, 800);
      if (seed == 1) first_net = t.result.net;
      const int at75 = reached_at(t.result.log, 0.75, 300);
      const int at90 = reached_at(t.result.log, 0.9, 800);
      double best = 0.0;
      for (std::size_t end = 50; end <= t.result.log.size(); ++end) {
        best = std::max(best, trailing_success(t.result.log, end, 50));
      }
      if (at75 >= 0 && at90 >= 0) ++good;
      summary7 += fmt(" seed %d best trailing-50 %.2f", static_cast<int>(seed), best);
      std::fprintf(stderr, "[train] %s seed %d: best trailing-50 success %.2f, %.1f s\n",
                   std::string(to_string(shape)).c_str(), static_cast<int>(seed), best, t.secs);
    }
    v7.require(good >= 2, fmt("%s: %d of 3 seeds met both thresholds",
                              std::string(to_string(shape)).c_str(), good));

    PolicySpec spec;
    spec.shape = builtin_shape(shape);
    spec.episode.shape = shape;
    spec.kind = PolicyKind::kNet;
    spec.net = first_net;
    const auto seeds = seed_list(1, 120);
    const SuiteInfo info{"mpc+net", std::string(to_string(shape)), config_fingerprint(spec)};
    const SuiteReport a = evaluate(policy_runner(spec), seeds, info);
    const SuiteReport b = evaluate(policy_runner(spec), seeds, info);
    const bool same = report_to_json(a, false) == report_to_json(b, false);
    const double rate = a.success_rate.value_or(0.0);
    v8.require(rate >= 0.9, fmt("%s success rate %.3f", std::string(to_string(shape)).c_str(), rate));
    v8.require(same, fmt("%s re-run report differs", std::string(to_string(shape)).c_str()));
    summary8 += fmt("%s%s %.3f%s", summary8.empty() ? "" : ", ",
                    std::string(to_string(shape)).c_str(), rate, same ? "" : " (re-run differs)");
  }
  report(7, "training success", v7, summary7);
  report(8, "evaluation protocol", v8, "120-episode success rate " + summary8 +
                                           "; re-runs compared byte-for-byte");
}

void baseline_ordering() {
  Verdict v;
  std::string summary;
  const Pose2D start(-0.1, 0.1, -3.0 * kPi / 4.0);
  for (const ShapeName shape : {ShapeName::kT, ShapeName::kL}) {
    double len[2] = {0.0, 0.0};
    double ang[2] = {0.0, 0.0};
    int wins[2] = {0, 0};
    const Executor execs[2] = {Executor::kMpc, Executor::kPrimitives};
    for (int e = 0; e < 2; ++e) {
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Trained t = train_net(shape, execs[e], seed, TrainConfig{}.episodes);
        PolicySpec spec;
        spec.shape = builtin_shape(shape);
        spec.episode.shape = shape;
        spec.executor = execs[e];
        spec.kind = PolicyKind::kNet;
        spec.net = t.result.net;
        spec.start = start;
        const EpisodeTrace trace = run_policy_episode(spec, seed);
        const EpisodeMetrics m = episode_metrics(trace);
        len[e] += m.trajectory_length / 20.0;
        ang[e] += m.angle_trajectory_length / 20.0;
        wins[e] += m.success ? 1 : 0;
      }
      std::fprintf(stderr, "[baseline] %s %s: mean length %.4f m, angle %.4f rad, %d/20 reached\n",
                   std::string(to_string(shape)).c_str(),
                   std::string(to_string(execs[e])).c_str(), len[e], ang[e], wins[e]);
    }
    const std::string name(to_string(shape));
    v.require(len[0] <= len[1], fmt("%s trajectory length %.4f > %.4f", name.c_str(), len[0], len[1]));
    v.require(ang[0] <= ang[1], fmt("%s angle length %.4f > %.4f", name.c_str(), ang[0], ang[1]));
    summary += fmt("%s%s mpc %.4f m / %.4f rad (%d/20 reached) vs spp %.4f m / %.4f rad (%d/20)",
                   summary.empty() ? "" : "; ", name.c_str(), len[0], ang[0], wins[0], len[1],
                   ang[1], wins[1]);
  }
  report(9, "baseline ordering", v, summary);
}

void determinism() {
  Verdict v;
  auto run = [](std::string& log, std::string& ckpt, std::string& rep, std::string& traces) {
    const Trained t = train_net(ShapeName::kL, Executor::kMpc, 42, 5);
    std::ostringstream ls;
    write_train_log_csv(ls, t.result.log);
    log = ls.str();
    ckpt = checkpoint_to_json({t.result.net, t.result.grad_steps});
    PolicySpec spec;
    spec.shape = builtin_shape(ShapeName::kL);
    spec.episode.shape = ShapeName::kL;
    spec.net = t.result.net;
    std::vector<EpisodeTrace> out;
    const SuiteReport r = evaluate(policy_runner(spec), seed_list(42, 8),
                                   {"mpc+net", "L", config_fingerprint(spec)}, &out);
    rep = report_to_json(r, false);
    std::ostringstream ts;
    for (const auto& e : out) write_trace_csv(ts, e.rows);
    traces = ts.str();
  };
  std::string a[4];
  std::string b[4];
  run(a[0], a[1], a[2], a[3]);
  run(b[0], b[1], b[2], b[3]);
  const char* what[4] = {"training log", "checkpoint", "report", "traces"};
  for (int i = 0; i < 4; ++i) v.require(a[i] == b[i], std::string(what[i]) + " differs");
  report(10, "determinism", v,
         fmt("5-episode training and 8-episode evaluation repeated, %zu + %zu + %zu + %zu bytes "
             "compared",
             a[0].size(), a[1].size(), a[2].size(), a[3].size()));
}

}  // namespace

int main() {
  sticking_identity();
  kinematics_spot_values();
  mpc_oracle();
  projection_oracle();
  network_checks();
  shaping_identities();
  training_and_evaluation();
  baseline_ordering();
  determinism();
  return failures == 0 ? 0 : 1;
}
