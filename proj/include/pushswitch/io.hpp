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

// Persistence and export: network checkpoints (JSON), episode traces and
// training logs (CSV, 9 significant digits) and SVG plots.

#ifndef PUSHSWITCH_IO_HPP_
#define PUSHSWITCH_IO_HPP_

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "pushswitch/bench.hpp"
#include "pushswitch/qlearn.hpp"

namespace pushswitch {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  QNet net = QNet::zeros();
  long step = 0;  // gradient steps taken
};

// {"format": "pushswitch-qnet", "version": 1, "dims": [3,10,10,6],
//  "step": n, "layers": [{"weights": [...row-major...], "bias": [...]}, x3]}
std::string checkpoint_to_json(const Checkpoint& ckpt);
// Throws CheckpointError on malformed text or dims other than (3,10,10,6).
Checkpoint parse_checkpoint_json(const std::string& text);
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

inline constexpr const char* kTraceHeader =
    "step,round,point_id,x,y,theta,u_x,u_y,r_env,r_shaping,mcr_kind";

// Fixed 9 significant digits.
std::string format_number(double v);

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows);
// Throws std::invalid_argument on a bad header or row.
std::vector<TraceRow> read_trace_csv(std::istream& is);

void write_train_log_csv(std::ostream& os, const std::vector<EpisodeLog>& log);

// World-frame plot: workspace, {B}-origin path, per-round regions (CoM
// coordinates), start and final contours, goal marker.
std::string trajectory_svg(const EpisodeTrace& trace, const ShapeModel& shape,
                           const Workspace& workspace);
// Every contour with CoM and numbered pushing points.
std::string shapes_svg(const std::vector<ShapeModel>& shapes);

// Writes text to a file; throws std::runtime_error when it cannot.
void write_file(const std::string& path, const std::string& text);

}  // namespace pushswitch

#endif  // PUSHSWITCH_IO_HPP_
