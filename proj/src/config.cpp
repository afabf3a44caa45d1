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

#include "pushswitch/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace pushswitch {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view text) {
  text = trim(text);
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("not a boolean: '" + std::string(text) + "'");
}

std::vector<double> parse_list(std::string_view text, std::size_t n) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number<double>(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (out.size() != n) {
    throw ConfigError("expected " + std::to_string(n) + " comma-separated values");
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename T>
std::string fmt_int(T v) {
  return std::to_string(v);
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define PS_DOUBLE(KEY, EXPR)                                                   \
  Field {                                                                      \
    KEY, [](RunConfig& c, std::string_view v) { c.EXPR = parse_number<double>(v); }, \
        [](const RunConfig& c) { return fmt(c.EXPR); }                         \
  }
#define PS_INT(KEY, EXPR)                                                      \
  Field {                                                                      \
    KEY, [](RunConfig& c, std::string_view v) { c.EXPR = parse_number<int>(v); },    \
        [](const RunConfig& c) { return fmt_int(c.EXPR); }                     \
  }
#define PS_U64(KEY, EXPR)                                                      \
  Field {                                                                      \
    KEY,                                                                       \
        [](RunConfig& c, std::string_view v) {                                 \
          c.EXPR = parse_number<std::uint64_t>(v);                             \
        },                                                                     \
        [](const RunConfig& c) { return fmt_int(c.EXPR); }                     \
  }

std::string fmt_vec(const double* v, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"shape", [](RunConfig& c, std::string_view v) {
         const std::string name(trim(v));
         if (!name.empty()) parse_shape_name(name);
         c.shape = name;
       },
       [](const RunConfig& c) { return c.shape; }},
      {"shape_file", [](RunConfig& c, std::string_view v) { c.shape_file = trim(v); },
       [](const RunConfig& c) { return c.shape_file; }},
      {"out", [](RunConfig& c, std::string_view v) { c.out = trim(v); },
       [](const RunConfig& c) { return c.out; }},
      PS_U64("seed", seed),
      PS_INT("eval.episodes", eval_episodes),

      {"episode.goal",
       [](RunConfig& c, std::string_view v) {
         const auto g = parse_list(v, 3);
         c.episode.goal = Pose2D(g[0], g[1], g[2]);
       },
       [](const RunConfig& c) {
         const double g[3] = {c.episode.goal.x(), c.episode.goal.y(),
                              c.episode.goal.theta()};
         return fmt_vec(g, 3);
       }},
      {"episode.workspace",
       [](RunConfig& c, std::string_view v) {
         const auto w = parse_list(v, 2);
         c.episode.workspace = Workspace(w[0] / 2.0, w[1] / 2.0);
       },
       [](const RunConfig& c) {
         const double w[2] = {2.0 * c.episode.workspace.half_width,
                              2.0 * c.episode.workspace.half_height};
         return fmt_vec(w, 2);
       }},
      PS_DOUBLE("episode.r_min", episode.r_min),
      PS_DOUBLE("episode.k", episode.k),
      PS_INT("episode.max_rounds", episode.max_rounds),
      PS_DOUBLE("episode.pos_tol", episode.pos_tol),
      PS_DOUBLE("episode.ang_tol", episode.ang_tol),
      PS_DOUBLE("episode.alpha", episode.alpha),
      PS_DOUBLE("episode.angle_weight", episode.angle_weight),
      PS_DOUBLE("episode.init_margin", episode.init_margin),
      PS_DOUBLE("episode.init_theta_max", episode.init_theta_max),
      {"episode.use_mcr",
       [](RunConfig& c, std::string_view v) { c.episode.use_mcr = parse_bool(v); },
       [](const RunConfig& c) { return std::string(c.episode.use_mcr ? "true" : "false"); }},
      PS_DOUBLE("episode.spp_rotation_distance", episode.spp_rotation_distance),

      PS_INT("mpc.N", mpc.horizon),
      {"mpc.Q",
       [](RunConfig& c, std::string_view v) {
         const auto q = parse_list(v, 3);
         c.mpc.q_weights = Vec3(q[0], q[1], q[2]);
       },
       [](const RunConfig& c) { return fmt_vec(c.mpc.q_weights.data(), 3); }},
      {"mpc.R",
       [](RunConfig& c, std::string_view v) {
         const auto r = parse_list(v, 2);
         c.mpc.r_weights = Vec2(r[0], r[1]);
       },
       [](const RunConfig& c) { return fmt_vec(c.mpc.r_weights.data(), 2); }},
      {"mpc.u_max",
       [](RunConfig& c, std::string_view v) {
         const auto u = parse_list(v, 2);
         c.mpc.u_max = Vec2(u[0], u[1]);
       },
       [](const RunConfig& c) { return fmt_vec(c.mpc.u_max.data(), 2); }},
      PS_DOUBLE("mpc.solver_tol", mpc.solver_tol),
      PS_INT("mpc.max_solver_iters", mpc.max_solver_iters),
      PS_INT("mpc.max_outer_iters", mpc.max_outer_iters),
      PS_INT("mpc.round_step_cap", mpc.round_step_cap),
      PS_INT("mpc.stall_window", mpc.stall_window),
      PS_DOUBLE("mpc.stall_eps", mpc.stall_eps),
      PS_DOUBLE("mpc.boundary_tol", mpc.boundary_tol),

      PS_DOUBLE("model.h", model.h),
      PS_DOUBLE("model.mu_c", model.mu_c),
      PS_DOUBLE("noise.sigma_pos", noise.sigma_pos),
      PS_DOUBLE("noise.sigma_rot", noise.sigma_rot),

      PS_DOUBLE("train.lr", train.lr),
      PS_DOUBLE("train.momentum", train.momentum),
      PS_DOUBLE("train.weight_decay", train.weight_decay),
      PS_DOUBLE("train.gamma", train.gamma),
      PS_DOUBLE("train.eps_start", train.eps_start),
      PS_DOUBLE("train.eps_end", train.eps_end),
      PS_INT("train.eps_decay_episodes", train.eps_decay_episodes),
      PS_INT("train.batch_size", train.batch_size),
      PS_INT("train.buffer_capacity", train.buffer_capacity),
      PS_INT("train.target_sync_every", train.target_sync_every),
      PS_INT("train.grad_steps_per_round", train.grad_steps_per_round),
      PS_INT("train.episodes", train.episodes),
  };
  return table;
}

#undef PS_DOUBLE
#undef PS_INT
#undef PS_U64

const Field& find_field(std::string_view key) {
  for (const auto& f : fields()) {
    if (f.key == key) return f;
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  const Field& f = find_field(trim(key));
  try {
    f.set(*this, value);
  } catch (const ConfigError& e) {
    throw ConfigError(f.key + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(f.key + ": " + e.what());
  }
}

std::string RunConfig::get(std::string_view key) const {
  return find_field(key).get(*this);
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.push_back(f.key);
    return out;
  }();
  return k;
}

void RunConfig::merge_text(std::string_view text, std::string_view origin) {
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = std::string(origin) + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    try {
      set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

void RunConfig::merge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  merge_text(ss.str(), path);
}

std::string RunConfig::to_text() const {
  std::string out = "# resolved pushswitch configuration\n";
  for (const auto& f : fields()) out += f.key + " = " + f.get(*this) + "\n";
  return out;
}

void RunConfig::resolve() {
  if (shape.empty() && shape_file.empty()) throw ConfigError("no shape selected");
  episode.shape = shape_file.empty() ? parse_shape_name(shape) : shape_model().name();
  episode.seed = seed;
  train.seed = seed;
  noise.seed = seed;
  if (eval_episodes < 0) throw ConfigError("eval.episodes must be >= 0");
  try {
    episode.validate();
    mpc.validate();
    train.validate();
    model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (noise.sigma_pos < 0.0 || noise.sigma_rot < 0.0) {
    throw ConfigError("noise sigmas must be >= 0");
  }
}

ShapeModel RunConfig::shape_model() const {
  if (!shape_file.empty()) return load_shape_file(shape_file);
  if (shape.empty()) throw ConfigError("no shape selected");
  return builtin_shape(parse_shape_name(shape));
}

}  // namespace pushswitch
