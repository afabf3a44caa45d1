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

#include "pushswitch/bench.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pushswitch {

EpisodeMetrics episode_metrics(const EpisodeTrace& trace) {
  if (trace.rows.empty()) throw std::invalid_argument("episode_metrics: empty trace");
  EpisodeMetrics m;
  for (std::size_t i = 1; i < trace.rows.size(); ++i) {
    const Pose2D& a = trace.rows[i - 1].pose;
    const Pose2D& b = trace.rows[i].pose;
    m.trajectory_length += (b.position() - a.position()).norm();
    m.angle_trajectory_length += std::abs(angle_diff(b.theta(), a.theta()));
  }
  const TraceRow& last = trace.rows.back();
  m.success = at_goal(last.pose, trace.goal, trace.tol);
  m.rounds = last.round;
  m.plant_steps = last.step;
  m.wall_time = trace.wall_time;
  return m;
}

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  if (values.empty()) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  a.min = *lo;
  a.max = *hi;
  return a;
}

std::vector<std::pair<std::string, Aggregate>> SuiteReport::aggregates() const {
  auto column = [&](auto get) {
    std::vector<double> v;
    v.reserve(episodes.size());
    for (const auto& e : episodes) v.push_back(static_cast<double>(get(e)));
    return aggregate(v);
  };
  return {
      {"trajectory_length", column([](const EpisodeMetrics& e) { return e.trajectory_length; })},
      {"angle_trajectory_length",
       column([](const EpisodeMetrics& e) { return e.angle_trajectory_length; })},
      {"rounds", column([](const EpisodeMetrics& e) { return e.rounds; })},
      {"plant_steps", column([](const EpisodeMetrics& e) { return e.plant_steps; })},
      {"wall_time", column([](const EpisodeMetrics& e) { return e.wall_time; })},
  };
}

namespace {

SuiteReport assemble(const SuiteInfo& info, const std::vector<std::uint64_t>& seeds,
                     std::vector<EpisodeMetrics> episodes, double wall) {
  SuiteReport r;
  r.label = info.label;
  r.shape = info.shape;
  r.fingerprint = info.fingerprint;
  r.seeds = seeds;
  r.episodes = std::move(episodes);
  r.wall_time = wall;
  if (!r.episodes.empty()) {
    std::size_t wins = 0;
    for (const auto& e : r.episodes) wins += e.success ? 1 : 0;
    r.success_rate = static_cast<double>(wins) / static_cast<double>(r.episodes.size());
  }
  return r;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

SuiteReport evaluate_serial(const EpisodeRunner& run,
                            const std::vector<std::uint64_t>& seeds,
                            const SuiteInfo& info, std::vector<EpisodeTrace>* traces) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<EpisodeMetrics> episodes(seeds.size());
  if (traces) traces->assign(seeds.size(), {});
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    EpisodeTrace t = run(i, seeds[i]);
    episodes[i] = episode_metrics(t);
    if (traces) (*traces)[i] = std::move(t);
  }
  return assemble(info, seeds, std::move(episodes), seconds_since(t0));
}

SuiteReport evaluate(const EpisodeRunner& run, const std::vector<std::uint64_t>& seeds,
                     const SuiteInfo& info, std::vector<EpisodeTrace>* traces) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto n = static_cast<std::int64_t>(seeds.size());
  std::vector<EpisodeMetrics> episodes(seeds.size());
  if (traces) traces->assign(seeds.size(), {});
  // Exceptions may not cross the parallel region; keep the first and rethrow.
  std::exception_ptr error;

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      const auto k = static_cast<std::size_t>(i);
      EpisodeTrace t = run(k, seeds[k]);
      episodes[k] = episode_metrics(t);
      if (traces) (*traces)[k] = std::move(t);
    } catch (...) {
#pragma omp critical(pushswitch_evaluate_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return assemble(info, seeds, std::move(episodes), seconds_since(t0));
}

std::vector<std::uint64_t> seed_list(std::uint64_t base, std::size_t n) {
  // splitmix64 so that neighbouring suite seeds give unrelated episodes.
  std::vector<std::uint64_t> out(n);
  std::uint64_t x = base;
  for (auto& s : out) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    s = z ^ (z >> 31);
  }
  return out;
}

EpisodeTrace run_policy_episode(const PolicySpec& spec, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  EpisodeConfig cfg = spec.episode;
  cfg.seed = seed;
  NoiseModel noise = spec.noise;
  noise.seed ^= seed;
  PushEnv env(spec.shape, cfg, spec.model, spec.mpc, noise, spec.executor);
  if (spec.start) {
    env.reset_to(*spec.start);
  } else {
    env.reset();
  }
  // A start already at the goal is an immediate success with no rounds.
  if (!goal_reached(env.state(), cfg)) {
    while (!env.done()) {
      const int a = spec.kind == PolicyKind::kNet
                        ? argmax_action(spec.net.forward(env.state()))
                        : lookahead_action(env);
      env.step_action(a);
    }
  }
  EpisodeTrace t;
  t.rows = env.trace();
  t.regions = env.round_regions();
  t.goal = cfg.goal;
  t.tol = cfg.tolerance();
  t.wall_time = seconds_since(t0);
  return t;
}

EpisodeRunner policy_runner(PolicySpec spec) {
  return [spec = std::move(spec)](std::size_t, std::uint64_t seed) {
    return run_policy_episode(spec, seed);
  };
}

std::uint64_t config_fingerprint(const PolicySpec& spec) {
  std::ostringstream os;
  os << std::hexfloat;
  const auto& e = spec.episode;
  const auto& m = spec.mpc;
  os << to_string(spec.shape.name()) << '|';
  for (const auto& v : spec.shape.contour()) os << v.x() << ',' << v.y() << ';';
  os << spec.shape.com().x() << ',' << spec.shape.com().y() << '|';
  for (int i = 1; i <= spec.shape.num_points(); ++i) {
    const auto& p = spec.shape.point(i).p;
    os << p.x() << ',' << p.y() << ';';
  }
  os << e.goal.x() << ',' << e.goal.y() << ',' << e.goal.theta() << '|'
     << e.workspace.half_width << ',' << e.workspace.half_height << '|' << e.r_min << ','
     << e.k << ',' << e.max_rounds << ',' << e.pos_tol << ',' << e.ang_tol << ','
     << e.alpha << ',' << e.angle_weight << ',' << e.init_margin << ','
     << e.init_theta_max << ',' << e.use_mcr << ',' << e.spp_rotation_distance << '|'
     << spec.model.h << ',' << spec.model.mu_c << '|' << spec.noise.sigma_pos << ','
     << spec.noise.sigma_rot << ',' << spec.noise.seed << '|' << m.horizon << ','
     << m.q_weights.transpose() << ',' << m.r_weights.transpose() << ','
     << m.u_max.transpose() << ',' << m.solver_tol << ',' << m.max_solver_iters << ','
     << m.max_outer_iters << ',' << m.round_step_cap << ',' << m.stall_window << ','
     << m.stall_eps << ',' << m.boundary_tol << '|';
  if (spec.start) {
    os << spec.start->x() << ',' << spec.start->y() << ',' << spec.start->theta();
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string report_to_json(const SuiteReport& report, bool include_timing) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["label"] = report.label;
  j["shape"] = report.shape;
  j["fingerprint"] = hex64(report.fingerprint);
  j["episodes"] = report.episodes.size();
  j["success_rate"] =
      report.success_rate ? ordered_json(*report.success_rate) : ordered_json(nullptr);
  ordered_json agg = ordered_json::object();
  for (const auto& [name, a] : report.aggregates()) {
    if (name == "wall_time") continue;
    agg[name] = {{"mean", a.mean}, {"std", a.std}, {"min", a.min}, {"max", a.max}};
  }
  j["aggregates"] = agg;
  ordered_json seeds = ordered_json::array();
  for (auto s : report.seeds) seeds.push_back(s);
  j["seeds"] = seeds;
  ordered_json eps = ordered_json::array();
  for (std::size_t i = 0; i < report.episodes.size(); ++i) {
    const auto& e = report.episodes[i];
    eps.push_back({{"index", i},
                   {"success", e.success},
                   {"trajectory_length", e.trajectory_length},
                   {"angle_trajectory_length", e.angle_trajectory_length},
                   {"rounds", e.rounds},
                   {"plant_steps", e.plant_steps}});
  }
  j["per_episode"] = eps;
  if (include_timing) {
    // Machine-dependent; kept apart so the rest is reproducible to the bit.
    ordered_json per = ordered_json::array();
    for (const auto& e : report.episodes) per.push_back(e.wall_time);
    const Aggregate w = report.aggregates().back().second;
    j["timing"] = {{"suite_wall_time", report.wall_time},
                   {"episode_wall_time",
                    {{"mean", w.mean}, {"std", w.std}, {"min", w.min}, {"max", w.max}}},
                   {"per_episode", per}};
  }
  return j.dump(2) + "\n";
}

namespace {

std::string fmt(double v) {
  if (!std::isfinite(v)) return "n/a";
  std::ostringstream os;
  os << std::setprecision(9) << v;
  return os.str();
}

std::string rel_delta(double value, double ref) {
  if (value == ref) return "0";
  if (ref == 0.0) return "n/a";
  return fmt((value - ref) / std::abs(ref));
}

}  // namespace

Comparison compare(const std::vector<SuiteReport>& reports) {
  if (reports.size() < 2) throw std::invalid_argument("compare needs at least two reports");
  Comparison c;
  c.columns = {"label", "shape", "episodes", "success_rate", "success_rate_delta"};
  const auto ref_agg = reports.front().aggregates();
  for (const auto& [name, a] : ref_agg) {
    c.columns.push_back(name + "_mean");
    c.columns.push_back(name + "_std");
    c.columns.push_back(name + "_delta");
  }
  const SuiteReport& ref = reports.front();
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const SuiteReport& r = reports[k];
    std::vector<std::string> row{r.label, r.shape, std::to_string(r.episodes.size())};
    row.push_back(r.success_rate ? fmt(*r.success_rate) : "n/a");
    row.push_back(r.success_rate && ref.success_rate
                      ? rel_delta(*r.success_rate, *ref.success_rate)
                      : "n/a");
    const auto agg = r.aggregates();
    for (std::size_t m = 0; m < agg.size(); ++m) {
      row.push_back(fmt(agg[m].second.mean));
      row.push_back(fmt(agg[m].second.std));
      row.push_back(rel_delta(agg[m].second.mean, ref_agg[m].second.mean));
    }
    c.rows.push_back(std::move(row));
    if (k == 0) continue;
    if (r.shape != ref.shape) {
      c.warnings.push_back("shape mismatch: '" + r.label + "' uses " + r.shape +
                           ", reference uses " + ref.shape);
    }
    if (r.fingerprint != ref.fingerprint) {
      c.warnings.push_back("config fingerprint mismatch: '" + r.label + "' " +
                           hex64(r.fingerprint) + " vs " + hex64(ref.fingerprint));
    }
    if (r.seeds != ref.seeds) {
      c.warnings.push_back("seed list mismatch: '" + r.label + "' differs from '" +
                           ref.label + "'");
    }
  }
  return c;
}

std::string Comparison::to_csv() const {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(columns);
  for (const auto& r : rows) line(r);
  for (const auto& w : warnings) os << "# warning: " << w << '\n';
  return os.str();
}

std::string Comparison::to_text() const {
  // Transposed: one line per column, one field per report.
  std::size_t width = 0;
  for (const auto& c : columns) width = std::max(width, c.size());
  std::ostringstream os;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    os << std::left << std::setw(static_cast<int>(width) + 2) << columns[i];
    for (const auto& r : rows) os << std::setw(16) << r[i];
    os << '\n';
  }
  for (const auto& w : warnings) os << "warning: " << w << '\n';
  return os.str();
}

}  // namespace pushswitch
