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

// Run configuration: one flat text file of dotted keys,
//
//   # comment
//   mpc.N = 10
//   episode.goal = 0, 0, 0
//
// layered as defaults < file < command-line flags. The snapshot writer emits
// every key with round-trip precision, so a run restarted from its snapshot
// reproduces the original outputs.

#ifndef PUSHSWITCH_CONFIG_HPP_
#define PUSHSWITCH_CONFIG_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pushswitch/env.hpp"
#include "pushswitch/kinematics.hpp"
#include "pushswitch/mpc.hpp"
#include "pushswitch/qlearn.hpp"

namespace pushswitch {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string shape;       // builtin name; empty until set
  std::string shape_file;  // optional JSON contour overriding the builtin
  std::string out = "out";
  std::uint64_t seed = 1;
  int eval_episodes = 120;
  EpisodeConfig episode;
  MpcConfig mpc;
  TrainConfig train;
  MotionModel model;
  NoiseModel noise;

  // Throws ConfigError for an unknown key or a malformed value.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;
  static const std::vector<std::string>& keys();

  // Parses "key = value" lines; '#' starts a comment. Errors carry the line
  // number.
  void merge_text(std::string_view text, std::string_view origin = "<text>");
  void merge_file(const std::string& path);
  std::string to_text() const;

  // Copies the run seed into the episode, training and noise seeds and the
  // shape name into the episode config, then validates every section.
  void resolve();
  ShapeModel shape_model() const;
};

}  // namespace pushswitch

#endif  // PUSHSWITCH_CONFIG_HPP_
