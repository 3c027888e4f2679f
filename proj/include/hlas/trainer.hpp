#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <deque>
#include <functional>
#include <memory>
#include <vector>

#include "hlas/config.hpp"
#include "hlas/env.hpp"
#include "hlas/net.hpp"
#include "hlas/rng.hpp"

namespace hlas {

// One PPO rollout: n_envs independent slices of steps_per_env transitions,
// laid out env-major (column e*steps_per_env + t).  Episodes may span
// iteration boundaries; the trainer keeps per-env cursors.
struct RolloutBatch {
  int n_envs = 0;
  int steps_per_env = 0;
  Eigen::MatrixXd obs;      // obs_dim x N
  Eigen::MatrixXd actions;  // action_dim x N
  Eigen::VectorXd log_probs;
  Eigen::VectorXd values;
  Eigen::VectorXd rewards;
  std::vector<unsigned char> done;   // episode ended at this transition
  Eigen::VectorXd bootstrap_values;  // V(obs after the slice), per env

  // filled by compute_advantages
  Eigen::VectorXd advantages;  // normalized
  Eigen::VectorXd returns;     // advantage + value, pre-normalization

  long col(int e, int t) const {
    return static_cast<long>(e) * steps_per_env + t;
  }
  long size() const { return static_cast<long>(n_envs) * steps_per_env; }
};

struct EpisodeRecord {
  int end_step = 0;   // slice index of the terminating transition
  int env_index = 0;
  double episode_return = 0.0;
  int length = 0;     // action steps
  TerminationCause cause = TerminationCause::none;
};

// Per-env rollout cursor; persists across collect calls so episodes can
// straddle iterations.
struct EnvCursor {
  Eigen::VectorXd obs;
  double partial_return = 0.0;
  int partial_length = 0;
  bool needs_reset = true;
};

// Runs every env for steps_per_env policy queries, one thread per env.
// Deterministic for a fixed seed: each worker owns its slice, its env and
// its action RNG, and finished episodes are merged in (end_step, env) order.
RolloutBatch collect_rollouts(const PolicyParams& p,
                              std::vector<std::unique_ptr<Env>>& envs,
                              std::vector<Rng>& action_rngs,
                              std::vector<EnvCursor>& cursors,
                              int steps_per_env,
                              std::vector<EpisodeRecord>& episodes_out);

// GAE(lambda) per env slice, bootstrapped with V at the cut unless the last
// transition terminated.  returns = advantage + value; advantages are then
// normalized over the whole batch.
void compute_advantages(RolloutBatch& b, double gamma, double lambda);

// d = mean_i sum_j max(|mu_ij| - (1 - eps), 0)^2 over batch columns.
double antiwindup_penalty(const Eigen::MatrixXd& mu, double eps);

// Accumulates scale * dd/dmu into dmu (the term is C^1, zero at the margin).
void add_antiwindup_grad(const Eigen::MatrixXd& mu, double eps, double scale,
                         Eigen::MatrixXd& dmu);

// Doubling/halving controller, applied once per iteration on the
// post-update batch penalty.
double adapt_penalty_coefficient(double c3, double d, double d_tar);

struct PpoStats {
  double total_loss = 0.0;
  double policy_loss = 0.0;
  double value_mse = 0.0;
  double entropy = 0.0;
  double d = 0.0;
  double clip_fraction = 0.0;
};

// Clipped-surrogate PPO objective (minimization form) over the given batch
// columns:
//   L = -mean min(r*A, clip(r)*A) + c1*mean (V - ret)^2 - c2*H + c3*d.
// With grads == nullptr only the value and stats are computed, which is what
// the finite-difference oracle uses.
PpoStats ppo_minibatch(const PolicyParams& p, const RolloutBatch& b,
                       const std::vector<long>& idx, const TrainerConfig& cfg,
                       double c3, GradBuffer* grads);

struct IterationMetrics {
  int iteration = 0;
  long cumulative_env_steps = 0;
  double avg_return = 0.0;  // over the last <=100 finished episodes; NaN if none
  double clip_fraction = 0.0;  // mean over the iteration's minibatches
  double value_loss = 0.0;     // mean raw MSE over the minibatches
  double entropy = 0.0;        // post-update policy entropy
  double d = 0.0;              // post-update full-batch penalty
  double c3 = 0.0;             // coefficient used in this iteration's loss
  double wall_clock_seconds = 0.0;
  long episodes_finished = 0;  // cumulative
  long goal_episodes = 0;      // cumulative episodes that ended at the goal
};

struct EpisodeResult {
  double episode_return = 0.0;
  int action_steps = 0;
  TerminationCause cause = TerminationCause::none;
  double elapsed_time = 0.0;
  double peak_heating = 0.0;
  long saturation_steps = 0;
  Eigen::VectorXd final_observation;
};

// One full episode under the mean policy (or sampled if stochastic).
EpisodeResult run_episode(const PolicyParams& p, Env& env, bool stochastic,
                          Rng* action_rng);

NetArch arch_from(const ExperimentConfig& cfg);

// Mutable trainer state outside the network/optimizer, for checkpoints.
struct TrainerSnapshot {
  int iteration = 0;
  long cumulative_env_steps = 0;
  long episodes_finished = 0;
  long goal_episodes = 0;
  double c3 = 1.0;
  std::vector<double> return_window;
};

class Trainer {
 public:
  // Reentry experiment: envs built from cfg with full-width initial
  // conditions (ic_scale = 1).
  Trainer(const ExperimentConfig& cfg, std::uint64_t seed);

  // Generic ctor for toy environments and unit tests.
  Trainer(const TrainerConfig& cfg, const NetArch& arch,
          const std::function<std::unique_ptr<Env>(int)>& make_env,
          std::uint64_t seed);

  IterationMetrics train_iteration();

  const PolicyParams& policy() const { return policy_; }
  PolicyParams& policy() { return policy_; }
  const AdamState& adam() const { return adam_; }
  AdamState& adam() { return adam_; }
  const TrainerConfig& config() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }

  double avg_return() const;  // NaN until an episode finishes
  double c3() const { return c3_; }
  int iteration() const { return iteration_; }
  long cumulative_env_steps() const { return cumulative_steps_; }
  long goal_episodes() const { return goal_episodes_; }
  long episodes_finished() const { return episodes_finished_; }

  TrainerSnapshot snapshot() const;
  void restore(const TrainerSnapshot& s);

  // Called once per finished episode, in merge order (end step, then env
  // index), before the policy update for that iteration.
  void set_episode_callback(std::function<void(const EpisodeRecord&)> cb) {
    episode_callback_ = std::move(cb);
  }

 private:
  TrainerConfig cfg_;
  std::uint64_t seed_ = 0;
  PolicyParams policy_;
  GradBuffer grads_;
  AdamState adam_{Eigen::VectorXd(), Eigen::VectorXd(), 0};
  double c3_ = 1.0;
  int iteration_ = 0;
  long cumulative_steps_ = 0;
  long episodes_finished_ = 0;
  long goal_episodes_ = 0;
  std::deque<double> return_window_;
  std::function<void(const EpisodeRecord&)> episode_callback_;

  std::vector<std::unique_ptr<Env>> envs_;
  std::vector<Rng> action_rngs_;
  std::vector<EnvCursor> cursors_;
  Rng shuffle_rng_{0};
  std::chrono::steady_clock::time_point start_;
};

}  // namespace hlas
