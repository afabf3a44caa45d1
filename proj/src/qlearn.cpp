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

#include "pushswitch/qlearn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pushswitch {

namespace {

template <typename M>
void fill_uniform(M& m, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) m(r, c) = dist(rng);
  }
}

template <typename M>
void append(std::vector<double>& out, const M& m) {
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  }
}

template <typename M>
std::size_t read(std::span<const double> in, std::size_t pos, M& m) {
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) m(r, c) = in[pos++];
  }
  return pos;
}

}  // namespace

QNet QNet::zeros() {
  QNet n;
  n.w1.setZero();
  n.b1.setZero();
  n.w2.setZero();
  n.b2.setZero();
  n.w3.setZero();
  n.b3.setZero();
  return n;
}

QNet QNet::random(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  QNet n;
  const double k1 = 1.0 / std::sqrt(static_cast<double>(kInputs));
  const double k2 = 1.0 / std::sqrt(static_cast<double>(kHidden));
  fill_uniform(n.w1, k1, rng);
  fill_uniform(n.b1, k1, rng);
  fill_uniform(n.w2, k2, rng);
  fill_uniform(n.b2, k2, rng);
  fill_uniform(n.w3, k2, rng);
  fill_uniform(n.b3, k2, rng);
  return n;
}

QValues QNet::forward(const State& s) const {
  const Eigen::Matrix<double, kHidden, 1> a1 = (w1 * s + b1).cwiseMax(0.0);
  const Eigen::Matrix<double, kHidden, 1> a2 = (w2 * a1 + b2).cwiseMax(0.0);
  return w3 * a2 + b3;
}

std::vector<double> QNet::flatten() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(num_params()));
  append(out, w1);
  append(out, b1);
  append(out, w2);
  append(out, b2);
  append(out, w3);
  append(out, b3);
  return out;
}

void QNet::unflatten(std::span<const double> values) {
  if (values.size() != static_cast<std::size_t>(num_params())) {
    throw std::invalid_argument("QNet::unflatten: wrong parameter count");
  }
  std::size_t pos = 0;
  pos = read(values, pos, w1);
  pos = read(values, pos, b1);
  pos = read(values, pos, w2);
  pos = read(values, pos, b2);
  pos = read(values, pos, w3);
  read(values, pos, b3);
}

QNet& QNet::operator+=(const QNet& o) {
  w1 += o.w1;
  b1 += o.b1;
  w2 += o.w2;
  b2 += o.b2;
  w3 += o.w3;
  b3 += o.b3;
  return *this;
}

QNet& QNet::operator*=(double s) {
  w1 *= s;
  b1 *= s;
  w2 *= s;
  b2 *= s;
  w3 *= s;
  b3 *= s;
  return *this;
}

double huber(double delta) {
  const double a = std::abs(delta);
  return a < 1.0 ? 0.5 * delta * delta : a - 0.5;
}

double huber_derivative(double delta) {
  if (std::abs(delta) < 1.0) return delta;
  return delta > 0.0 ? 1.0 : -1.0;
}

LossGradient backward(const QNet& net, std::span<const TdSample> batch) {
  if (batch.empty()) throw std::invalid_argument("backward: empty batch");
  constexpr int H = QNet::kHidden;
  LossGradient out;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const TdSample& smp : batch) {
    const Eigen::Matrix<double, H, 1> z1 = net.w1 * smp.s + net.b1;
    const Eigen::Matrix<double, H, 1> a1 = z1.cwiseMax(0.0);
    const Eigen::Matrix<double, H, 1> z2 = net.w2 * a1 + net.b2;
    const Eigen::Matrix<double, H, 1> a2 = z2.cwiseMax(0.0);
    const double q = net.w3.row(smp.action).dot(a2) + net.b3(smp.action);
    const double delta = q - smp.target;
    out.loss += huber(delta) * inv_n;

    const double dq = huber_derivative(delta) * inv_n;
    if (dq == 0.0) continue;
    out.grad.w3.row(smp.action) += dq * a2.transpose();
    out.grad.b3(smp.action) += dq;
    const Eigen::Matrix<double, H, 1> dz2 =
        (dq * net.w3.row(smp.action).transpose()).cwiseProduct(
            (z2.array() > 0.0).cast<double>().matrix());
    out.grad.w2 += dz2 * a1.transpose();
    out.grad.b2 += dz2;
    const Eigen::Matrix<double, H, 1> dz1 =
        (net.w2.transpose() * dz2)
            .cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
    out.grad.w1 += dz1 * smp.s.transpose();
    out.grad.b1 += dz1;
  }
  return out;
}

double q_target(const QNet& target_net, const Transition& t, double gamma) {
  if (t.done) return t.reward;
  const QValues q = target_net.forward(t.s_next);
  return t.reward + gamma * q(argmax_action(q));
}

int argmax_action(const QValues& q) {
  int best = 0;
  for (int i = 1; i < q.size(); ++i) {
    if (q(i) > q(best)) best = i;
  }
  return best;
}

int select_point(const QNet& net, const State& s, double epsilon,
                 std::mt19937_64& rng) {
  if (epsilon > 0.0) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon) {
      std::uniform_int_distribution<int> pick(0, QNet::kActions - 1);
      return pick(rng);
    }
  }
  return argmax_action(net.forward(s));
}

SgdMomentum::SgdMomentum(double lr, double momentum, double weight_decay)
    : lr_(lr), momentum_(momentum), weight_decay_(weight_decay),
      velocity_(QNet::zeros()) {}

void SgdMomentum::step(QNet& net, const QGradients& grad) {
  velocity_ *= momentum_;
  velocity_ += grad;
  net *= (1.0 - lr_ * weight_decay_);
  QNet delta = velocity_;
  delta *= -lr_;
  net += delta;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be > 0");
  items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(const Transition& t) {
  if (items_.size() < capacity_) {
    items_.push_back(t);
    return;
  }
  items_[head_] = t;
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= items_.size()) throw std::out_of_range("ReplayBuffer::at");
  return items_[(head_ + i) % items_.size()];
}

std::size_t ReplayBuffer::sample_index(std::mt19937_64& rng) const {
  if (items_.empty()) throw std::logic_error("sampling an empty replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  return pick(rng);
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n,
                                             std::mt19937_64& rng) const {
  std::vector<Transition> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(items_[sample_index(rng)]);
  return out;
}

void TrainConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("0 < gamma < 1");
  if (!(eps_end <= eps_start) || eps_end < 0.0 || eps_start > 1.0) {
    throw std::invalid_argument("need 0 <= eps_end <= eps_start <= 1");
  }
  if (!(lr > 0.0) || momentum < 0.0 || weight_decay < 0.0 || batch_size < 1 ||
      buffer_capacity < 1 || target_sync_every < 1 || episodes < 0 ||
      eps_decay_episodes < 0 || grad_steps_per_round < 0) {
    throw std::invalid_argument("invalid training configuration");
  }
}

double TrainConfig::epsilon_at(int episode) const {
  if (eps_decay_episodes <= 0) return eps_end;
  const double frac =
      std::min(1.0, static_cast<double>(episode) / eps_decay_episodes);
  return eps_start + (eps_end - eps_start) * frac;
}

TrainResult train(DecisionEnv& env, const TrainConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  TrainResult result;
  result.net = QNet::random(cfg.seed);
  QNet target = result.net;
  SgdMomentum opt(cfg.lr, cfg.momentum, cfg.weight_decay);
  ReplayBuffer buffer(static_cast<std::size_t>(cfg.buffer_capacity));
  std::vector<TdSample> batch(static_cast<std::size_t>(cfg.batch_size));

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    EpisodeLog log;
    log.episode = ep;
    log.epsilon = cfg.epsilon_at(ep);
    double loss_sum = 0.0;
    int loss_count = 0;

    State s = env.reset();
    for (bool done = false; !done;) {
      const int action = select_point(result.net, s, log.epsilon, rng);
      const DecisionStep st = env.step(action);
      buffer.push(st.transition);
      log.episode_return += st.transition.reward;
      ++log.rounds;
      log.success = st.success;
      s = st.transition.s_next;
      done = st.transition.done;

      if (buffer.size() < static_cast<std::size_t>(cfg.batch_size)) continue;
      for (int g = 0; g < cfg.grad_steps_per_round; ++g) {
        for (auto& smp : batch) {
          const Transition& t = buffer.at(buffer.sample_index(rng));
          smp.s = t.s;
          smp.action = t.action;
          smp.target = q_target(target, t, cfg.gamma);
        }
        const LossGradient lg = backward(result.net, batch);
        if (!std::isfinite(lg.loss)) {
          throw std::runtime_error("training diverged: non-finite loss");
        }
        opt.step(result.net, lg.grad);
        ++result.grad_steps;
        if (result.grad_steps % cfg.target_sync_every == 0) target = result.net;
        loss_sum += lg.loss;
        ++loss_count;
      }
    }
    log.mean_loss = loss_count > 0 ? loss_sum / loss_count
                                   : std::numeric_limits<double>::quiet_NaN();
    result.log.push_back(log);
  }
  return result;
}

double trailing_success(const std::vector<EpisodeLog>& log, std::size_t end,
                        std::size_t window) {
  end = std::min(end, log.size());
  const std::size_t begin = end > window ? end - window : 0;
  if (end == begin) return 0.0;
  std::size_t wins = 0;
  for (std::size_t i = begin; i < end; ++i) wins += log[i].success ? 1 : 0;
  return static_cast<double>(wins) / static_cast<double>(end - begin);
}

}  // namespace pushswitch
