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

// Pushing-point selection by deep Q-learning: a 3-10-10-6 value network,
// Huber temporal-difference loss against a frozen target network, SGD with
// momentum and decoupled weight decay, uniform experience replay and
// epsilon-greedy exploration.

#ifndef PUSHSWITCH_QLEARN_HPP_
#define PUSHSWITCH_QLEARN_HPP_

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace pushswitch {

using State = Eigen::Vector3d;  // [p_Bx, p_By, omega]
using QValues = Eigen::Matrix<double, 6, 1>;

struct QNet {
  static constexpr int kInputs = 3;
  static constexpr int kHidden = 10;
  static constexpr int kActions = 6;
  static constexpr std::array<int, 3> kLayerParams{40, 110, 66};

  Eigen::Matrix<double, kHidden, kInputs> w1;
  Eigen::Matrix<double, kHidden, 1> b1;
  Eigen::Matrix<double, kHidden, kHidden> w2;
  Eigen::Matrix<double, kHidden, 1> b2;
  Eigen::Matrix<double, kActions, kHidden> w3;
  Eigen::Matrix<double, kActions, 1> b3;

  static QNet zeros();
  // Uniform in +-1/sqrt(fan_in) per layer.
  static QNet random(std::uint64_t seed);

  // Rectifier on the two hidden layers only; the output layer is affine so
  // that negative values are representable.
  QValues forward(const State& s) const;

  static int num_params() { return 40 + 110 + 66; }
  // Order: w1 (row-major), b1, w2, b2, w3, b3.
  std::vector<double> flatten() const;
  void unflatten(std::span<const double> values);

  QNet& operator+=(const QNet& o);
  QNet& operator*=(double s);
};

using QGradients = QNet;

double huber(double delta);
double huber_derivative(double delta);

struct TdSample {
  State s = State::Zero();
  int action = 0;
  double target = 0.0;
};

struct LossGradient {
  double loss = 0.0;  // batch mean
  QGradients grad = QGradients::zeros();
};

// Mean Huber loss of Q(s, action) against the fixed target; only the
// selected output carries gradient.
LossGradient backward(const QNet& net, std::span<const TdSample> batch);

struct Transition {
  State s = State::Zero();
  int action = 0;
  double reward = 0.0;
  State s_next = State::Zero();
  bool done = false;
};

// r if done, else r + gamma * max_c Q_target(s', c).
double q_target(const QNet& target_net, const Transition& t, double gamma);

// Index of the largest value; ties go to the lowest index.
int argmax_action(const QValues& q);

// Epsilon-greedy. The generator is consumed only when epsilon > 0.
int select_point(const QNet& net, const State& s, double epsilon,
                 std::mt19937_64& rng);

class SgdMomentum {
 public:
  SgdMomentum(double lr, double momentum, double weight_decay);
  // v <- momentum * v + g;  w <- (1 - lr * weight_decay) * w - lr * v
  void step(QNet& net, const QGradients& grad);

 private:
  double lr_;
  double momentum_;
  double weight_decay_;
  QNet velocity_;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  // i-th item from the oldest stored.
  const Transition& at(std::size_t i) const;
  // Uniform with replacement.
  std::vector<Transition> sample(std::size_t n, std::mt19937_64& rng) const;
  std::size_t sample_index(std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // next slot to overwrite once full
  std::vector<Transition> items_;
};

struct TrainConfig {
  double lr = 1e-4;
  double momentum = 0.9;
  double weight_decay = 1e-5;
  double gamma = 0.9;
  double eps_start = 0.5;
  double eps_end = 0.1;
  int eps_decay_episodes = 150;
  int batch_size = 64;
  int buffer_capacity = 20000;
  int target_sync_every = 200;
  int grad_steps_per_round = 1;
  int episodes = 800;
  std::uint64_t seed = 1;

  void validate() const;
  double epsilon_at(int episode) const;
};

// Episode interface the trainer drives: one action = one pushing round.
struct DecisionStep {
  Transition transition;
  bool success = false;
};

class DecisionEnv {
 public:
  virtual ~DecisionEnv() = default;
  virtual State reset() = 0;
  virtual DecisionStep step(int action) = 0;
};

struct EpisodeLog {
  int episode = 0;
  double episode_return = 0.0;
  bool success = false;
  int rounds = 0;
  double epsilon = 0.0;
  double mean_loss = 0.0;  // NaN when no gradient step happened
};

struct TrainResult {
  QNet net;
  std::vector<EpisodeLog> log;
  long grad_steps = 0;
};

// Throws std::runtime_error on a non-finite loss.
TrainResult train(DecisionEnv& env, const TrainConfig& cfg);

// Fraction of successes over the last `window` episodes ending at `end`
// (exclusive).
double trailing_success(const std::vector<EpisodeLog>& log, std::size_t end,
                        std::size_t window);

}  // namespace pushswitch

#endif  // PUSHSWITCH_QLEARN_HPP_
