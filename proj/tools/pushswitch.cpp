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

// pushswitch: train / eval / run / shapes.
//
// Exit codes: 0 ok, 2 usage or bad configuration, 3 I/O or checkpoint,
// 4 domain validation (e.g. a start pose outside the workspace).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pushswitch/bench.hpp"
#include "pushswitch/config.hpp"
#include "pushswitch/env.hpp"
#include "pushswitch/io.hpp"
#include "pushswitch/qlearn.hpp"

namespace fs = std::filesystem;
using namespace pushswitch;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitDomain = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> shape;
  std::vector<std::string> sets;  // key=value overrides
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "Configuration file (dotted keys)");
  app->add_option("--seed", f.seed, "Run seed");
  app->add_option("--out", f.out, "Output directory");
  app->add_option("--shape", f.shape, "Object shape: T, L, triangle, trapezoid");
  app->add_option("--set", f.sets, "Override one setting, e.g. --set mpc.N=12")
      ->type_name("KEY=VALUE");
}

// defaults < file < flags
RunConfig resolve_config(const CommonFlags& f) {
  RunConfig cfg;
  if (!f.config.empty()) {
    try {
      cfg.merge_file(f.config);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw IoError(e.what());
    }
  }
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects KEY=VALUE, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out = *f.out;
  if (f.shape) cfg.set("shape", *f.shape);
  if (cfg.shape.empty() && cfg.shape_file.empty()) {
    throw UsageError("no shape given; use --shape {T,L,triangle,trapezoid}");
  }
  return cfg;
}

Pose2D parse_pose(const std::string& text, const char* what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t pos = 0;
      v.push_back(std::stod(cell, &pos));
      if (pos != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": expected x,y,theta");
    }
  }
  if (v.size() != 3) throw UsageError(std::string(what) + ": expected x,y,theta");
  return {v[0], v[1], v[2]};
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory '" + dir + "'");
}

void write(const std::string& path, const std::string& text) {
  try {
    write_file(path, text);
  } catch (const std::exception& e) {
    throw IoError(e.what());
  }
}

PolicySpec make_spec(const RunConfig& cfg, Executor executor) {
  PolicySpec spec;
  spec.shape = cfg.shape_model();
  spec.episode = cfg.episode;
  spec.model = cfg.model;
  spec.mpc = cfg.mpc;
  spec.noise = cfg.noise;
  spec.executor = executor;
  return spec;
}

// Net from a checkpoint if one is given, otherwise the one-round lookahead.
void attach_policy(PolicySpec& spec, const std::string& checkpoint,
                   const std::string& policy) {
  if (policy == "lookahead") {
    spec.kind = PolicyKind::kLookahead;
    return;
  }
  if (checkpoint.empty()) {
    if (policy == "net") throw UsageError("--policy net needs --checkpoint");
    spec.kind = PolicyKind::kLookahead;
    return;
  }
  spec.kind = PolicyKind::kNet;
  spec.net = load_checkpoint(checkpoint).net;
}

// ---------------------------------------------------------------------------

struct TrainFlags {
  int episodes = -2;  // -2: not given
  std::string executor = "mpc";
};

int cmd_train(const CommonFlags& common, const TrainFlags& tf) {
  RunConfig cfg = resolve_config(common);
  if (tf.episodes != -2) {
    if (tf.episodes < 0) throw UsageError("--episodes must be >= 0");
    cfg.train.episodes = tf.episodes;
  }
  cfg.resolve();
  const Executor executor = parse_executor(tf.executor);
  make_dir(cfg.out);
  write(cfg.out + "/config", cfg.to_text());

  PushEnv env(cfg.shape_model(), cfg.episode, cfg.model, cfg.mpc, cfg.noise, executor);
  const TrainResult result = train(env, cfg.train);

  write(cfg.out + "/checkpoint", checkpoint_to_json({result.net, result.grad_steps}));
  std::ostringstream log;
  write_train_log_csv(log, result.log);
  write(cfg.out + "/train_log.csv", log.str());

  const std::size_t n = result.log.size();
  std::cerr << "trained " << n << " episodes, " << result.grad_steps
            << " gradient steps; trailing-50 success "
            << format_number(trailing_success(result.log, n, 50)) << "\n";
  return 0;
}

struct EvalFlags {
  int episodes = -2;
  std::string checkpoint;
  std::string baseline;
  std::string policy = "auto";
  bool compare = false;
};

int cmd_eval(const CommonFlags& common, const EvalFlags& ef) {
  RunConfig cfg = resolve_config(common);
  if (ef.episodes != -2) {
    if (ef.episodes < 0) throw UsageError("--episodes must be >= 0");
    cfg.eval_episodes = ef.episodes;
  }
  cfg.resolve();
  if (!ef.baseline.empty() && ef.baseline != "spp") {
    throw UsageError("--baseline accepts only 'spp'");
  }
  if (ef.compare && ef.baseline.empty() == false) {
    throw UsageError("--compare already runs the spp baseline; drop --baseline");
  }

  const Executor main_exec = ef.baseline == "spp" ? Executor::kPrimitives : Executor::kMpc;
  PolicySpec spec = make_spec(cfg, main_exec);
  attach_policy(spec, ef.checkpoint, ef.policy);

  const auto seeds = seed_list(cfg.seed, static_cast<std::size_t>(cfg.eval_episodes));
  auto run_suite = [&](const PolicySpec& s, const std::string& dir) {
    const std::string label = std::string(to_string(s.executor)) +
                              (s.kind == PolicyKind::kNet ? "+net" : "+lookahead");
    std::vector<EpisodeTrace> traces;
    const SuiteReport report =
        evaluate(policy_runner(s), seeds,
                 {label, cfg.shape.empty() ? std::string(to_string(s.shape.name())) : cfg.shape,
                  config_fingerprint(s)},
                 &traces);
    make_dir(dir + "/traces");
    write(dir + "/report.json", report_to_json(report, true));
    for (std::size_t i = 0; i < traces.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "/traces/episode_%04zu.csv", i);
      std::ostringstream os;
      write_trace_csv(os, traces[i].rows);
      write(dir + name, os.str());
    }
    std::cerr << label << ": " << report.episodes.size() << " episodes, success rate "
              << (report.success_rate ? format_number(*report.success_rate) : "n/a") << "\n";
    return report;
  };

  make_dir(cfg.out);
  write(cfg.out + "/config", cfg.to_text());
  const SuiteReport main_report = run_suite(spec, cfg.out);
  if (ef.compare) {
    PolicySpec spp = spec;
    spp.executor = Executor::kPrimitives;
    const SuiteReport base = run_suite(spp, cfg.out + "/spp");
    const Comparison cmp = compare({main_report, base});
    write(cfg.out + "/comparison.csv", cmp.to_csv());
    std::cout << cmp.to_text();
  }
  return 0;
}

struct RunFlags {
  std::string start;
  std::string goal;
  std::string svg;
  std::string trace;
  std::string checkpoint;
  std::string baseline;
  std::string policy = "auto";
};

int cmd_run(const CommonFlags& common, const RunFlags& rf) {
  RunConfig cfg = resolve_config(common);
  if (!rf.goal.empty()) cfg.episode.goal = parse_pose(rf.goal, "--goal");
  cfg.resolve();
  if (!rf.baseline.empty() && rf.baseline != "spp") {
    throw UsageError("--baseline accepts only 'spp'");
  }
  PolicySpec spec =
      make_spec(cfg, rf.baseline == "spp" ? Executor::kPrimitives : Executor::kMpc);
  attach_policy(spec, rf.checkpoint, rf.policy);
  if (!rf.start.empty()) {
    spec.start = parse_pose(rf.start, "--start");
    if (!in_workspace(cfg.episode.workspace, *spec.start)) {
      throw DomainError("start pose is outside the workspace");
    }
  }
  if (!in_workspace(cfg.episode.workspace, cfg.episode.goal)) {
    throw DomainError("goal pose is outside the workspace");
  }

  const EpisodeTrace trace = run_policy_episode(spec, cfg.seed);
  if (common.out) {
    make_dir(cfg.out);
    write(cfg.out + "/config", cfg.to_text());
  }
  std::ostringstream csv;
  write_trace_csv(csv, trace.rows);
  if (rf.trace.empty()) {
    std::cout << csv.str();
  } else {
    write(rf.trace, csv.str());
  }
  if (!rf.svg.empty()) {
    write(rf.svg, trajectory_svg(trace, spec.shape, cfg.episode.workspace));
  }
  const EpisodeMetrics m = episode_metrics(trace);
  std::cerr << (m.success ? "reached goal" : "did not reach goal") << " after " << m.rounds
            << " rounds, " << m.plant_steps << " plant steps; trajectory length "
            << format_number(m.trajectory_length) << " m, angle trajectory length "
            << format_number(m.angle_trajectory_length) << " rad\n";
  return 0;
}

int cmd_shapes(const std::string& svg) {
  for (const ShapeModel& s : builtin_shapes()) {
    std::cout << to_string(s.name()) << "  com (" << format_number(s.com().x()) << ", "
              << format_number(s.com().y()) << ")\n";
    for (const PushingPoint& p : s.points()) {
      std::cout << "  #" << p.id << "  p (" << format_number(p.p.x()) << ", "
                << format_number(p.p.y()) << ")  e_n (" << format_number(p.e_n.x()) << ", "
                << format_number(p.e_n.y()) << ")  e_t (" << format_number(p.e_t.x())
                << ", " << format_number(p.e_t.y()) << ")\n";
    }
  }
  if (!svg.empty()) write(svg, shapes_svg(builtin_shapes()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pushing-point switching with MPC and deep Q-learning"};
  app.require_subcommand(1);

  CommonFlags train_common, eval_common, run_common;
  TrainFlags tf;
  EvalFlags ef;
  RunFlags rf;
  std::string shapes_svg_path;

  CLI::App* train_cmd = app.add_subcommand("train", "Train the pushing-point selector");
  add_common(train_cmd, train_common);
  train_cmd->add_option("--episodes", tf.episodes, "Training episodes");
  train_cmd->add_option("--executor", tf.executor, "Round executor: mpc or spp");

  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a policy over many episodes");
  add_common(eval_cmd, eval_common);
  eval_cmd->add_option("--episodes", ef.episodes, "Evaluation episodes");
  eval_cmd->add_option("--checkpoint", ef.checkpoint, "Trained network");
  eval_cmd->add_option("--baseline", ef.baseline, "Use open-loop primitives: spp");
  eval_cmd->add_option("--policy", ef.policy, "auto, net or lookahead")
      ->check(CLI::IsMember({"auto", "net", "lookahead"}));
  eval_cmd->add_flag("--compare", ef.compare, "Also run the spp baseline and compare");

  CLI::App* run_cmd = app.add_subcommand("run", "Run one episode and print its trace");
  add_common(run_cmd, run_common);
  run_cmd->add_option("--start", rf.start, "Start pose x,y,theta");
  run_cmd->add_option("--goal", rf.goal, "Goal pose x,y,theta");
  run_cmd->add_option("--svg", rf.svg, "Write a trajectory plot");
  run_cmd->add_option("--trace", rf.trace, "Write the trace CSV here instead of stdout");
  run_cmd->add_option("--checkpoint", rf.checkpoint, "Trained network");
  run_cmd->add_option("--baseline", rf.baseline, "Use open-loop primitives: spp");
  run_cmd->add_option("--policy", rf.policy, "auto, net or lookahead")
      ->check(CLI::IsMember({"auto", "net", "lookahead"}));

  CLI::App* shapes_cmd = app.add_subcommand("shapes", "List the builtin shapes");
  shapes_cmd->add_option("--svg", shapes_svg_path, "Write labelled contours");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train_common, tf);
    if (*eval_cmd) return cmd_eval(eval_common, ef);
    if (*run_cmd) return cmd_run(run_common, rf);
    return cmd_shapes(shapes_svg_path);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return kExitIo;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
