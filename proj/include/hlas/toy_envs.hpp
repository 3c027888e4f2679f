#pragma once

#include "hlas/env.hpp"

namespace hlas {

// One-step bandit over a clipped scalar action: reward 1 iff
// clamp(a, -1, 1) >= 0.9.  The favorable reward sits at the action limit,
// which is exactly the situation that makes an unpenalized action mean
// drift without bound.
class BanditEnv : public Env {
 public:
  int obs_dim() const override { return 1; }
  int action_dim() const override { return 1; }
  void seed(std::uint64_t) override {}
  Eigen::VectorXd reset() override {
    done_ = false;
    return Eigen::VectorXd::Zero(1);
  }
  StepResult step(const Eigen::VectorXd& raw_action) override;

 private:
  bool done_ = true;
};

// Two-option duration toy: total distance 4; action >= 0 advances 2 per
// step (finishes in 2 steps), action < 0 advances 0.8 (finishes in 5).
// Terminal reward 1 either way, so with discounting the shorter horizon
// gives the larger return.
class DurationToyEnv : public Env {
 public:
  int obs_dim() const override { return 1; }
  int action_dim() const override { return 1; }
  void seed(std::uint64_t) override {}
  Eigen::VectorXd reset() override {
    progress_ = 0.0;
    done_ = false;
    return observe();
  }
  StepResult step(const Eigen::VectorXd& raw_action) override;

  static constexpr double kDistance = 4.0;
  static constexpr double kLongMove = 2.0;
  static constexpr double kShortMove = 0.8;

 private:
  Eigen::VectorXd observe() const {
    Eigen::VectorXd obs(1);
    obs[0] = (kDistance - progress_) / kDistance;
    return obs;
  }
  double progress_ = 0.0;
  bool done_ = true;
};

// Fully scripted counter: observation k = 0,1,2, rewards 0.5*(k+1),
// terminates on the third step.  Exists so rollout collection can be
// checked against a hand-written trace.
class CountingEnv : public Env {
 public:
  int obs_dim() const override { return 1; }
  int action_dim() const override { return 1; }
  void seed(std::uint64_t) override {}
  Eigen::VectorXd reset() override {
    k_ = 0;
    done_ = false;
    return observe();
  }
  StepResult step(const Eigen::VectorXd&) override;

 private:
  Eigen::VectorXd observe() const {
    Eigen::VectorXd obs(1);
    obs[0] = static_cast<double>(k_);
    return obs;
  }
  int k_ = 0;
  bool done_ = true;
};

}  // namespace hlas
