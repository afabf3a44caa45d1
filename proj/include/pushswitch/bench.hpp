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

// Evaluation harness. Episodes are independent and seeded, so `evaluate`
// spreads them over OpenMP threads; `evaluate_serial` is the reference used
// by the tests and the benchmark. Both assemble the report in episode order.

#ifndef PUSHSWITCH_BENCH_HPP_
#define PUSHSWITCH_BENCH_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pushswitch/env.hpp"

namespace pushswitch {

struct EpisodeTrace {
  std::vector<TraceRow> rows;  // first row is the start pose
  std::vector<Mcr> regions;
  Pose2D goal;
  GoalTolerance tol;
  double wall_time = 0.0;  // seconds
};

struct EpisodeMetrics {
  bool success = false;
  double trajectory_length = 0.0;        // m, {B} origin
  double angle_trajectory_length = 0.0;  // rad
  int rounds = 0;
  int plant_steps = 0;
  double wall_time = 0.0;
};

// Throws std::invalid_argument on an empty trace.
EpisodeMetrics episode_metrics(const EpisodeTrace& trace);

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1); 0 for a single episode
  double min = 0.0;
  double max = 0.0;
};

Aggregate aggregate(const std::vector<double>& values);

struct SuiteReport {
  std::string label;
  std::string shape;
  std::uint64_t fingerprint = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<EpisodeMetrics> episodes;
  std::optional<double> success_rate;  // absent for zero episodes
  double wall_time = 0.0;

  // Keyed by metric name, fixed order: trajectory_length,
  // angle_trajectory_length, rounds, plant_steps, wall_time.
  std::vector<std::pair<std::string, Aggregate>> aggregates() const;
};

// Must be safe to call concurrently for distinct indices.
using EpisodeRunner =
    std::function<EpisodeTrace(std::size_t index, std::uint64_t seed)>;

struct SuiteInfo {
  std::string label;
  std::string shape;
  std::uint64_t fingerprint = 0;
};

SuiteReport evaluate(const EpisodeRunner& run,
                     const std::vector<std::uint64_t>& seeds,
                     const SuiteInfo& info, std::vector<EpisodeTrace>* traces = nullptr);
SuiteReport evaluate_serial(const EpisodeRunner& run,
                            const std::vector<std::uint64_t>& seeds,
                            const SuiteInfo& info,
                            std::vector<EpisodeTrace>* traces = nullptr);

// Deterministic per-episode seeds derived from one suite seed.
std::vector<std::uint64_t> seed_list(std::uint64_t base, std::size_t n);

enum class PolicyKind { kNet, kLookahead };

struct PolicySpec {
  ShapeModel shape = builtin_shape(ShapeName::kT);
  EpisodeConfig episode;
  MotionModel model;
  MpcConfig mpc;
  NoiseModel noise;
  Executor executor = Executor::kMpc;
  PolicyKind kind = PolicyKind::kNet;
  QNet net = QNet::zeros();
  std::optional<Pose2D> start;  // fixed start instead of the sampler
};

// Greedy (epsilon = 0) episode per seed.
EpisodeTrace run_policy_episode(const PolicySpec& spec, std::uint64_t seed);
EpisodeRunner policy_runner(PolicySpec spec);

// FNV-1a over every setting that affects the simulated outcome except the
// executor, the policy and the seeds, so reports of the two executors on the
// same problem share a fingerprint.
std::uint64_t config_fingerprint(const PolicySpec& spec);

std::string report_to_json(const SuiteReport& report, bool include_timing);

struct Comparison {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> warnings;

  std::string to_csv() const;
  std::string to_text() const;
};

// First report is the reference for relative deltas. Throws
// std::invalid_argument for fewer than two reports.
Comparison compare(const std::vector<SuiteReport>& reports);

}  // namespace pushswitch

#endif  // PUSHSWITCH_BENCH_HPP_
