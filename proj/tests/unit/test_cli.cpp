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

// Drives the command-line tool as a subprocess.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "pushswitch/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result cli(const std::string& args) {
  const std::string cmd = std::string(PUSHSWITCH_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf;
  size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pushswitch_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("shapes listing and plot") {
  const Result r = cli("shapes");
  CHECK(r.code == 0);
  CHECK(r.out.find("T  com (0, -0.029)") != std::string::npos);
  CHECK(r.out.find("trapezoid  com (0.011, -0.004)") != std::string::npos);
  const fs::path dir = scratch("shapes");
  fs::create_directories(dir);
  CHECK(cli("shapes --svg " + (dir / "shapes.svg").string()).code == 0);
  const std::string svg = slurp(dir / "shapes.svg");
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(cli("shapes --bogus").code == 2);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(cli("").code == 2);
  CHECK(cli("train --episodes 1").code == 2);
  CHECK(cli("train --shape").code == 2);
  CHECK(cli("train --shape hexagon --episodes 0").code == 2);
  CHECK(cli("eval --shape L --baseline spp --episodes -1").code == 2);
  CHECK(cli("run --shape T --start 1,2").code == 2);
  CHECK(cli("train --shape T --set mpc.N=zero").code == 2);
}

TEST_CASE("train writes checkpoint, log and config; snapshot reproduces") {
  const fs::path dir = scratch("train");
  Result r = cli("train --shape T --episodes 0 --seed 7 --out " + dir.string());
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "checkpoint"));
  CHECK(fs::exists(dir / "config"));
  CHECK(slurp(dir / "train_log.csv") == "episode,return,success,rounds,epsilon,mean_loss\n");

  const fs::path a = scratch("train_a");
  const fs::path b = scratch("train_b");
  r = cli("train --shape L --episodes 2 --seed 3 --set episode.max_rounds=8 --out " +
          a.string());
  CHECK(r.code == 0);
  r = cli("train --config " + (a / "config").string() + " --out " + b.string());
  CHECK(r.code == 0);
  CHECK(slurp(a / "train_log.csv") == slurp(b / "train_log.csv"));
  CHECK(slurp(a / "checkpoint") == slurp(b / "checkpoint"));
  const std::string log = slurp(a / "train_log.csv");
  CHECK(std::count(log.begin(), log.end(), '\n') == 3);
  CHECK(cli("train --shape T --episodes 0 --out /proc/forbidden/x").code == 3);
}

TEST_CASE("eval writes a report and traces") {
  const fs::path dir = scratch("eval");
  Result r = cli("eval --shape L --baseline spp --episodes 3 --set episode.max_rounds=5 --out " +
                 dir.string());
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "traces" / "episode_0000.csv"));
  CHECK(fs::exists(dir / "traces" / "episode_0002.csv"));
  CHECK(slurp(dir / "report.json").find("\"label\": \"spp+lookahead\"") != std::string::npos);

  const fs::path model = scratch("eval_model");
  CHECK(cli("train --shape L --episodes 0 --out " + model.string()).code == 0);
  const fs::path dir2 = scratch("eval_net");
  r = cli("eval --shape L --episodes 2 --set episode.max_rounds=4 --compare --checkpoint " +
          (model / "checkpoint").string() + " --out " + dir2.string());
  CHECK(r.code == 0);
  CHECK(fs::exists(dir2 / "report.json"));
  CHECK(fs::exists(dir2 / "spp" / "report.json"));
  CHECK(fs::exists(dir2 / "comparison.csv"));
  CHECK(r.out.find("success_rate") != std::string::npos);

  const fs::path bad = scratch("eval_bad");
  fs::create_directories(bad);
  {
    std::ofstream(bad / "checkpoint") << "{\"format\": \"pushswitch-qnet\", \"version\": 1";
  }
  CHECK(cli("eval --shape L --episodes 1 --checkpoint " + (bad / "checkpoint").string() +
            " --out " + bad.string())
            .code == 3);
  CHECK(cli("eval --shape L --episodes 1 --checkpoint /nonexistent/ckpt --out " + bad.string())
            .code == 3);
}

TEST_CASE("run emits a trace and optional plot") {
  Result r = cli("run --shape T --start 0.1,0.1,0 --goal 0,0,0");
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  const auto rows = pushswitch::read_trace_csv(in);
  REQUIRE(rows.size() > 1);
  const auto& last = rows.back().pose;
  CHECK(std::hypot(last.x(), last.y()) < 0.015);
  CHECK(std::abs(last.theta()) < 0.0436);

  const fs::path dir = scratch("run");
  fs::create_directories(dir);
  r = cli("run --shape L --start 0,0,-1.5708 --goal 0,0,0 --set episode.max_rounds=3 --svg " +
          (dir / "run.svg").string() + " --trace " + (dir / "trace.csv").string());
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(slurp(dir / "trace.csv").rfind(pushswitch::kTraceHeader, 0) == 0);
  const std::string svg = slurp(dir / "run.svg");
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);

  CHECK(cli("run --shape T --start 0.3,0,0").code == 4);
  CHECK(cli("run --shape T --start 0,0,0 --policy net").code == 2);
}
