#include "hlas/toy_envs.hpp"

#include <algorithm>
#include <stdexcept>

namespace hlas {

StepResult BanditEnv::step(const Eigen::VectorXd& raw_action) {
  if (done_) throw std::logic_error("step on finished bandit episode");
  done_ = true;
  const double a = std::clamp(raw_action[0], -1.0, 1.0);
  StepResult res;
  res.observation = Eigen::VectorXd::Zero(1);
  res.reward = a >= 0.9 ? 1.0 : 0.0;
  res.terminated = true;
  res.cause = TerminationCause::goal;
  return res;
}

StepResult DurationToyEnv::step(const Eigen::VectorXd& raw_action) {
  if (done_) throw std::logic_error("step on finished toy episode");
  progress_ += raw_action[0] >= 0.0 ? kLongMove : kShortMove;
  StepResult res;
  if (progress_ >= kDistance - 1e-12) {
    done_ = true;
    res.reward = 1.0;
    res.terminated = true;
    res.cause = TerminationCause::goal;
  }
  res.observation = observe();
  return res;
}

StepResult CountingEnv::step(const Eigen::VectorXd&) {
  if (done_) throw std::logic_error("step on finished counting episode");
  const double reward = 0.5 * (k_ + 1);
  ++k_;
  StepResult res;
  res.reward = reward;
  if (k_ == 3) {
    done_ = true;
    res.terminated = true;
    res.cause = TerminationCause::goal;
  }
  res.observation = observe();
  return res;
}

}  // namespace hlas
