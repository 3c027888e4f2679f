#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "hlas/config.hpp"
#include "hlas/controller.hpp"
#include "hlas/rng.hpp"
#include "hlas/segment.hpp"
#include "hlas/vehicle.hpp"

namespace hlas {

enum class TerminationCause { none, goal, constraint_violation, obstacle,
                              timeout };
const char* termination_cause_name(TerminationCause c);

struct StepResult {
  Eigen::VectorXd observation;
  double reward = 0.0;
  bool terminated = false;
  TerminationCause cause = TerminationCause::none;
  // diagnostics
  double elapsed_time = 0.0;   // episode time after this action step [s]
  double heating_peak = 0.0;   // max q seen during this action step
  int saturation_count = 0;    // sub-steps where a command clamped
  double effective_tau = 0.0;  // tau after rounding to a dt multiple [s]
};

// Minimal episodic-environment interface the trainer drives.  One instance
// per rollout worker; instances never share mutable state.
class Env {
 public:
  virtual ~Env() = default;
  virtual int obs_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual void seed(std::uint64_t s) = 0;
  virtual Eigen::VectorXd reset() = 0;
  virtual StepResult step(const Eigen::VectorXd& raw_action) = 0;
};

// --- pieces of the reentry MDP, exposed for direct testing ---

// Horizon reward Phi: latitude in DEGREES, exp(phi) below zero and 1 + phi
// above, continuous at zero.  Zero for the debris problem.
double horizon_reward(const VehicleState& x, const ProblemSpec& spec);

// (h, v, gamma) or (h, theta, phi) depending on the problem kind.
std::array<double, 3> terminal_components(const VehicleState& x,
                                          const ProblemSpec& spec);

// Quadratic miss measure Psi over the terminal components.
double terminal_ellipsoid(const VehicleState& x, const ProblemSpec& spec);

// Reward granted for the action step that ends with `cause`.
// goal: Phi + c0*min(1, 1/Psi); timeout: Phi (latitude-max) or 0 (debris);
// violation/obstacle: 0; none: 0.
double reward_fn(const VehicleState& x, TerminationCause cause,
                 const ProblemSpec& spec);

// All terminal tolerance bands simultaneously satisfied (non-strict).
bool terminal_check(const VehicleState& x, const ProblemSpec& spec);

// Hit iff inside or on the boundary of any ellipse.
bool obstacle_check(const VehicleState& x, const std::vector<Ellipse>& map);

Eigen::VectorXd normalize_obs(const VehicleState& x,
                              const std::vector<double>& scales);

// Uniform initial condition.  ic_scale multiplies the perturbation
// half-widths (1 during training, 0.5 for the published evaluation
// protocol, 0 for the nominal state).  For the debris problem the
// (theta, phi, psi) components come from the semicircle geometry.
VehicleState sample_initial_state(const ProblemSpec& spec, Rng& rng,
                                  double ic_scale);

// The shuttle reentry MDP.  A raw policy action decodes to a duration and
// per-channel polynomial profiles; the profiles drive either the commands
// directly or the dynamic-inversion controller, for round(tau/dt) RK4
// sub-steps with zero-order hold.
class ReentryEnv : public Env {
 public:
  struct TraceRow {
    double t = 0.0;
    VehicleState x;
    ControlInput u_cmd;
    double q = 0.0;
    double reward = 0.0;
    int action_step = 0;
    TerminationCause cause = TerminationCause::none;
  };
  using TraceSink = std::function<void(const TraceRow&)>;

  explicit ReentryEnv(const ExperimentConfig& cfg, double ic_scale = 1.0);

  int obs_dim() const override { return 8; }
  int action_dim() const override { return hlas_.action_dim(); }
  void seed(std::uint64_t s) override { rng_ = Rng(s); }
  Eigen::VectorXd reset() override;
  StepResult step(const Eigen::VectorXd& raw_action) override;

  // Start an episode from a caller-chosen state instead of sampling.
  Eigen::VectorXd reset_to(const VehicleState& x0);

  const VehicleState& state() const { return x_; }
  double elapsed() const { return t_; }
  int action_steps() const { return action_steps_; }
  bool done() const { return done_; }
  const ProblemSpec& spec() const { return spec_; }

  // Receives one row per dt sub-step (plus the initial row at reset).
  void set_trace_sink(TraceSink sink) { trace_ = std::move(sink); }

 private:
  VehicleParams params_;
  ProblemSpec spec_;
  HlasConfig hlas_;
  std::vector<double> obs_scales_;
  double ic_scale_ = 1.0;
  Rng rng_{0};

  VehicleState x_;
  double t_ = 0.0;
  int action_steps_ = 0;
  bool done_ = true;
  std::vector<double> prev_z_end_;  // last z values, for the continuity flag
  bool have_prev_z_ = false;
  TraceSink trace_;
};

}  // namespace hlas
