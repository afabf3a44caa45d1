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

#include "pushswitch/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace pushswitch {

namespace {

constexpr const char* kFormat = "pushswitch-qnet";
constexpr int kVersion = 1;

template <typename M>
nlohmann::json row_major(const M& m) {
  auto a = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) a.push_back(m(r, c));
  }
  return a;
}

template <typename M>
void fill(const nlohmann::json& a, M& m, const char* what) {
  if (!a.is_array() || a.size() != static_cast<std::size_t>(m.rows() * m.cols())) {
    throw CheckpointError(std::string("checkpoint: wrong size for ") + what);
  }
  std::size_t k = 0;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      const auto& v = a[k++];
      if (!v.is_number()) throw CheckpointError("checkpoint: non-numeric value");
      m(r, c) = v.get<double>();
      if (!std::isfinite(m(r, c))) throw CheckpointError("checkpoint: non-finite value");
    }
  }
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  nlohmann::ordered_json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["dims"] = {QNet::kInputs, QNet::kHidden, QNet::kHidden, QNet::kActions};
  j["step"] = ckpt.step;
  j["layers"] = nlohmann::ordered_json::array();
  const QNet& n = ckpt.net;
  j["layers"].push_back({{"weights", row_major(n.w1)}, {"bias", row_major(n.b1)}});
  j["layers"].push_back({{"weights", row_major(n.w2)}, {"bias", row_major(n.b2)}});
  j["layers"].push_back({{"weights", row_major(n.w3)}, {"bias", row_major(n.b3)}});
  return j.dump() + "\n";
}

Checkpoint parse_checkpoint_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint: not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", "") != kFormat) {
      throw CheckpointError("checkpoint: unknown format");
    }
    if (j.at("version").get<int>() != kVersion) {
      throw CheckpointError("checkpoint: unsupported version");
    }
    const std::vector<int> dims = j.at("dims").get<std::vector<int>>();
    const std::vector<int> want{QNet::kInputs, QNet::kHidden, QNet::kHidden,
                                QNet::kActions};
    if (dims != want) throw CheckpointError("checkpoint: layer dims must be 3,10,10,6");
    const auto& layers = j.at("layers");
    if (!layers.is_array() || layers.size() != 3) {
      throw CheckpointError("checkpoint: expected 3 layers");
    }
    Checkpoint c;
    c.step = j.at("step").get<long>();
    fill(layers[0].at("weights"), c.net.w1, "layer 1 weights");
    fill(layers[0].at("bias"), c.net.b1, "layer 1 bias");
    fill(layers[1].at("weights"), c.net.w2, "layer 2 weights");
    fill(layers[1].at("bias"), c.net.b2, "layer 2 bias");
    fill(layers[2].at("weights"), c.net.w3, "layer 3 weights");
    fill(layers[2].at("bias"), c.net.b3, "layer 3 bias");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint: ") + e.what());
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  write_file(path, checkpoint_to_json(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read checkpoint '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint_json(ss.str());
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << kTraceHeader << '\n';
  for (const auto& r : rows) {
    os << r.step << ',' << r.round << ',' << r.point_id << ','
       << format_number(r.pose.x()) << ',' << format_number(r.pose.y()) << ','
       << format_number(r.pose.theta()) << ',' << format_number(r.u.x()) << ','
       << format_number(r.u.y()) << ',' << format_number(r.r_env) << ','
       << format_number(r.r_shaping) << ',' << r.mcr_kind << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

int to_int(const std::string& s) {
  std::size_t pos = 0;
  const int v = std::stoi(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad integer '" + s + "'");
  return v;
}

}  // namespace

std::vector<TraceRow> read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kTraceHeader) {
    throw std::invalid_argument("trace CSV: unexpected header");
  }
  std::vector<TraceRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != 11) throw std::invalid_argument("trace CSV: expected 11 fields");
    TraceRow r;
    r.step = to_int(c[0]);
    r.round = to_int(c[1]);
    r.point_id = to_int(c[2]);
    r.pose = Pose2D(to_double(c[3]), to_double(c[4]), to_double(c[5]));
    r.u = Vec2(to_double(c[6]), to_double(c[7]));
    r.r_env = to_double(c[8]);
    r.r_shaping = to_double(c[9]);
    if (c[10] == "ellipse") {
      r.mcr_kind = "ellipse";
    } else if (c[10] == "circle") {
      r.mcr_kind = "circle";
    } else if (c[10] == "none") {
      r.mcr_kind = "none";
    } else {
      throw std::invalid_argument("trace CSV: unknown mcr_kind '" + c[10] + "'");
    }
    rows.push_back(r);
  }
  return rows;
}

void write_train_log_csv(std::ostream& os, const std::vector<EpisodeLog>& log) {
  os << "episode,return,success,rounds,epsilon,mean_loss\n";
  for (const auto& e : log) {
    os << e.episode << ',' << format_number(e.episode_return) << ','
       << (e.success ? 1 : 0) << ',' << e.rounds << ',' << format_number(e.epsilon)
       << ',' << (std::isnan(e.mean_loss) ? std::string("nan") : format_number(e.mean_loss))
       << '\n';
  }
}

// ---------------------------------------------------------------------------
// SVG. World metres map to pixels with y flipped.

namespace {

struct Canvas {
  double scale;
  double x0, y0;  // world coordinates of the top-left corner
  std::ostringstream body;

  double px(double x) const { return (x - x0) * scale; }
  double py(double y) const { return (y0 - y) * scale; }

  void polygon(const std::vector<Vec2>& pts, const char* style) {
    body << "<polygon points=\"";
    for (const auto& p : pts) body << px(p.x()) << ',' << py(p.y()) << ' ';
    body << "\" style=\"" << style << "\"/>\n";
  }
};

std::vector<Vec2> world_contour(const ShapeModel& shape, const Pose2D& pose) {
  std::vector<Vec2> out;
  const Mat2 r = rotation(pose.theta());
  for (const auto& v : shape.contour()) out.push_back(pose.position() + r * v);
  return out;
}

std::string finish(const Canvas& c, double w, double h) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
     << c.body.str() << "</svg>\n";
  return os.str();
}

}  // namespace

std::string trajectory_svg(const EpisodeTrace& trace, const ShapeModel& shape,
                           const Workspace& ws) {
  Canvas c{1600.0, -ws.half_width - 0.05, ws.half_height + 0.05, {}};
  const double w = 2.0 * (ws.half_width + 0.05) * c.scale;
  const double h = 2.0 * (ws.half_height + 0.05) * c.scale;
  c.body << "<rect x=\"" << c.px(-ws.half_width) << "\" y=\"" << c.py(ws.half_height)
         << "\" width=\"" << 2 * ws.half_width * c.scale << "\" height=\""
         << 2 * ws.half_height * c.scale
         << "\" style=\"fill:none;stroke:#888;stroke-dasharray:6 4\"/>\n";

  for (const Mcr& m : trace.regions) {
    if (m.is_ellipse()) {
      const auto& e = m.ellipse();
      c.body << "<ellipse cx=\"" << c.px(e.center.x()) << "\" cy=\"" << c.py(e.center.y())
             << "\" rx=\"" << e.semi_major * c.scale << "\" ry=\"" << e.semi_minor * c.scale
             << "\" transform=\"rotate(" << -e.orientation * 180.0 / kPi << ' '
             << c.px(e.center.x()) << ' ' << c.py(e.center.y())
             << ")\" style=\"fill:none;stroke:#4a90d9;stroke-opacity:0.5\"/>\n";
    } else {
      const auto& ci = m.circle();
      c.body << "<circle cx=\"" << c.px(ci.center.x()) << "\" cy=\"" << c.py(ci.center.y())
             << "\" r=\"" << ci.radius * c.scale
             << "\" style=\"fill:none;stroke:#e08a2c;stroke-opacity:0.6\"/>\n";
    }
  }

  if (!trace.rows.empty()) {
    c.polygon(world_contour(shape, trace.rows.front().pose),
              "fill:#ddd;fill-opacity:0.5;stroke:#666");
    c.polygon(world_contour(shape, trace.rows.back().pose),
              "fill:#9c6;fill-opacity:0.5;stroke:#363");
    c.body << "<polyline points=\"";
    for (const auto& r : trace.rows) c.body << c.px(r.pose.x()) << ',' << c.py(r.pose.y()) << ' ';
    c.body << "\" style=\"fill:none;stroke:#c33;stroke-width:2\"/>\n";
  }
  c.polygon(world_contour(shape, trace.goal), "fill:none;stroke:#000;stroke-dasharray:3 3");
  const double gx = c.px(trace.goal.x());
  const double gy = c.py(trace.goal.y());
  c.body << "<path d=\"M" << gx - 8 << ',' << gy << " L" << gx + 8 << ',' << gy << " M" << gx
         << ',' << gy - 8 << " L" << gx << ',' << gy + 8
         << "\" style=\"stroke:#000;stroke-width:2\"/>\n";
  return finish(c, w, h);
}

std::string shapes_svg(const std::vector<ShapeModel>& shapes) {
  const double cell = 0.26;
  Canvas c{1500.0, 0.0, 0.0, {}};
  c.x0 = -cell / 2.0;
  c.y0 = cell / 2.0;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const ShapeModel& s = shapes[i];
    const Vec2 off(static_cast<double>(i) * cell, 0.0);
    std::vector<Vec2> pts;
    for (const auto& v : s.contour()) pts.push_back(v + off);
    c.polygon(pts, "fill:#eee;stroke:#333");
    const Vec2 com = s.com() + off;
    c.body << "<circle cx=\"" << c.px(com.x()) << "\" cy=\"" << c.py(com.y())
           << "\" r=\"4\" style=\"fill:#000\"/>\n";
    for (const auto& p : s.points()) {
      const Vec2 q = p.p + off;
      const Vec2 label = q - 0.012 * p.e_n;
      c.body << "<circle cx=\"" << c.px(q.x()) << "\" cy=\"" << c.py(q.y())
             << "\" r=\"4\" style=\"fill:#c33\"/>\n"
             << "<text x=\"" << c.px(label.x()) << "\" y=\"" << c.py(label.y())
             << "\" font-size=\"14\" text-anchor=\"middle\" dominant-baseline=\"middle\">"
             << p.id << "</text>\n";
    }
    c.body << "<text x=\"" << c.px(off.x()) << "\" y=\"" << c.py(-0.115)
           << "\" font-size=\"18\" text-anchor=\"middle\">" << to_string(s.name())
           << "</text>\n";
  }
  return finish(c, static_cast<double>(shapes.size()) * cell * c.scale, cell * c.scale);
}

}  // namespace pushswitch
