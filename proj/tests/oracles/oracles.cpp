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

#include "oracles/oracles.hpp"

#include <cmath>
#include <limits>

namespace oracle {

std::array<double, 3> push_delta(double cx, double cy, double ux, double uy, double h) {
  // v = g, w = (cx gy - cy gx) / h^2, v + w (-cy, cx) = u:
  //   gx (1 + cy^2/h^2) - gy cx cy / h^2 = ux
  //  -gx cx cy / h^2 + gy (1 + cx^2/h^2) = uy
  const double h2 = h * h;
  const double a = 1.0 + cy * cy / h2;
  const double b = -cx * cy / h2;
  const double d = 1.0 + cx * cx / h2;
  const double det = a * d - b * b;
  const double gx = (ux * d - b * uy) / det;
  const double gy = (a * uy - b * ux) / det;
  return {gx, gy, (cx * gy - cy * gx) / h2};
}

Vec2 grid_project(const Vec2& u, const pushswitch::FrictionCone& cone, const Vec2& u_max,
                  int n) {
  Vec2 best(0.0, 0.0);
  double best_d = (u - best).squaredNorm();
  for (int i = 0; i < n; ++i) {
    const double x = -u_max.x() + 2.0 * u_max.x() * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double y = -u_max.y() + 2.0 * u_max.y() * j / (n - 1);
      const Vec2 q(x, y);
      if (!cone.contains(q)) continue;
      const double d = (u - q).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = q;
      }
    }
  }
  return best;
}

double mpc_cost(const pushswitch::MpcProblem& p, const std::vector<Vec2>& u) {
  Vec3 x = p.x0;
  double j = 0.0;
  for (const Vec2& ui : u) {
    x += p.B * ui;
    Vec3 e = x - p.x_star;
    e.z() = std::remainder(e.z(), 2.0 * M_PI);
    for (int k = 0; k < 3; ++k) j += p.config.q_weights(k) * e(k) * e(k);
    for (int k = 0; k < 2; ++k) j += p.config.r_weights(k) * ui(k) * ui(k);
  }
  return j;
}

double grid_mpc_n2(const pushswitch::MpcProblem& p, int n) {
  std::vector<Vec2> set;
  const Vec2& um = p.config.u_max;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 q(-um.x() + 2.0 * um.x() * i / (n - 1), -um.y() + 2.0 * um.y() * j / (n - 1));
      if (p.cone.contains(q)) set.push_back(q);
    }
  }
  auto inside = [&](const Vec3& x) {
    return !p.mcr || pushswitch::mcr_contains(*p.mcr, x.head<2>());
  };
  double best = std::numeric_limits<double>::infinity();
  for (const Vec2& a : set) {
    const Vec3 x1 = p.x0 + p.B * a;
    if (!inside(x1)) continue;
    for (const Vec2& b : set) {
      if (!inside(x1 + p.B * b)) continue;
      best = std::min(best, oracle::mpc_cost(p, std::vector<Vec2>{a, b}));
    }
  }
  return best;
}

std::array<double, 6> forward(const std::vector<double>& w, const Vec3& s) {
  // Layout: w1 (10x3 row-major), b1, w2 (10x10), b2, w3 (6x10), b3.
  std::size_t k = 0;
  double h1[10], h2[10];
  const double* w1 = &w[k];
  k += 30;
  const double* b1 = &w[k];
  k += 10;
  for (int i = 0; i < 10; ++i) {
    double z = b1[i];
    for (int j = 0; j < 3; ++j) z += w1[i * 3 + j] * s(j);
    h1[i] = z > 0.0 ? z : 0.0;
  }
  const double* w2 = &w[k];
  k += 100;
  const double* b2 = &w[k];
  k += 10;
  for (int i = 0; i < 10; ++i) {
    double z = b2[i];
    for (int j = 0; j < 10; ++j) z += w2[i * 10 + j] * h1[j];
    h2[i] = z > 0.0 ? z : 0.0;
  }
  const double* w3 = &w[k];
  k += 60;
  const double* b3 = &w[k];
  std::array<double, 6> q{};
  for (int i = 0; i < 6; ++i) {
    double z = b3[i];
    for (int j = 0; j < 10; ++j) z += w3[i * 10 + j] * h2[j];
    q[static_cast<std::size_t>(i)] = z;
  }
  return q;
}

double huber(double d) {
  return std::fabs(d) < 1.0 ? 0.5 * d * d : std::fabs(d) - 0.5;
}

double batch_loss(const std::vector<double>& params,
                  const std::vector<pushswitch::TdSample>& batch) {
  double total = 0.0;
  for (const auto& s : batch) {
    const auto q = forward(params, s.s);
    total += huber(q[static_cast<std::size_t>(s.action)] - s.target);
  }
  return total / static_cast<double>(batch.size());
}

std::vector<double> fd_gradient(const std::vector<double>& params,
                                const std::vector<pushswitch::TdSample>& batch,
                                double eps) {
  std::vector<double> g(params.size());
  std::vector<double> p = params;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double orig = p[i];
    p[i] = orig + eps;
    const double up = batch_loss(p, batch);
    p[i] = orig - eps;
    const double dn = batch_loss(p, batch);
    p[i] = orig;
    g[i] = (up - dn) / (2.0 * eps);
  }
  return g;
}

}  // namespace oracle
