#include "hlas/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hlas {

const char* termination_cause_name(TerminationCause c) {
  switch (c) {
    case TerminationCause::none: return "none";
    case TerminationCause::goal: return "goal";
    case TerminationCause::constraint_violation: return "constraint-violation";
    case TerminationCause::obstacle: return "obstacle";
    case TerminationCause::timeout: return "timeout";
  }
  return "?";
}

double horizon_reward(const VehicleState& x, const ProblemSpec& spec) {
  if (spec.kind == ProblemKind::debris_avoidance) return 0.0;
  const double phi_deg = rad2deg(x.phi);
  return phi_deg < 0.0 ? std::exp(phi_deg) : 1.0 + phi_deg;
}

std::array<double, 3> terminal_components(const VehicleState& x,
                                          const ProblemSpec& spec) {
  if (spec.kind == ProblemKind::latitude_max) return {x.h, x.v, x.gamma};
  return {x.h, x.theta, x.phi};
}

double terminal_ellipsoid(const VehicleState& x, const ProblemSpec& spec) {
  const auto c = terminal_components(x, spec);
  double psi = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double e = (c[i] - spec.target[i]) / spec.scales[i];
    psi += e * e;
  }
  return psi;
}

double reward_fn(const VehicleState& x, TerminationCause cause,
                 const ProblemSpec& spec) {
  switch (cause) {
    case TerminationCause::goal: {
      const double psi = terminal_ellipsoid(x, spec);
      const double capped = psi > 1.0 ? 1.0 / psi : 1.0;
      return horizon_reward(x, spec) + spec.c0 * capped;
    }
    case TerminationCause::timeout:
      return horizon_reward(x, spec);  // zero for the debris problem
    case TerminationCause::constraint_violation:
    case TerminationCause::obstacle:
    case TerminationCause::none:
      return 0.0;
  }
  return 0.0;
}

bool terminal_check(const VehicleState& x, const ProblemSpec& spec) {
  const auto c = terminal_components(x, spec);
  for (int i = 0; i < 3; ++i) {
    if (std::fabs(c[i] - spec.target[i]) > spec.tolerances[i]) return false;
  }
  return true;
}

bool obstacle_check(const VehicleState& x, const std::vector<Ellipse>& map) {
  for (const Ellipse& e : map) {
    const double dt = (x.theta - e.theta_c) / e.a_theta;
    const double dp = (x.phi - e.phi_c) / e.a_phi;
    if (dt * dt + dp * dp <= 1.0) return true;
  }
  return false;
}

Eigen::VectorXd normalize_obs(const VehicleState& x,
                              const std::vector<double>& scales) {
  const auto a = x.as_array();
  Eigen::VectorXd obs(8);
  for (int i = 0; i < 8; ++i) obs[i] = a[i] / scales[i];
  return obs;
}

VehicleState sample_initial_state(const ProblemSpec& spec, Rng& rng,
                                  double ic_scale) {
  if (spec.kind == ProblemKind::latitude_max) {
    const auto nom = spec.ic_nominal.as_array();
    std::array<double, 8> out{};
    for (int i = 0; i < 8; ++i) {
      const double hw = ic_scale * spec.ic_halfwidths[i];
      out[i] = nom[i] + rng.uniform(-hw, hw);
    }
    return VehicleState::from_array(out);
  }

  // Debris problem: start on a semicircle south of the target, pointed at
  // the target.  Bearing parameter 0 puts the start due south.
  const double theta_f = spec.target[1];
  const double phi_f = spec.target[2];
  const double r = spec.semicircle.radius +
                   rng.uniform(-1.0, 1.0) * ic_scale *
                       spec.semicircle.radius_halfwidth;
  const double u = rng.uniform(-0.5 * kPi, 0.5 * kPi);

  VehicleState x;
  x.theta = theta_f + r * std::sin(u);
  x.phi = phi_f - r * std::cos(u);
  x.h = spec.ic_nominal.h +
        rng.uniform(-1.0, 1.0) * ic_scale * spec.ic_halfwidths[0];
  x.v = spec.ic_nominal.v +
        rng.uniform(-1.0, 1.0) * ic_scale * spec.ic_halfwidths[1];
  x.gamma = spec.ic_nominal.gamma +
            rng.uniform(-1.0, 1.0) * ic_scale * spec.ic_halfwidths[4];
  // bearing to target on the local tangent plane (longitude shrinks with
  // latitude); psi = 0 is due north, pi/2 due east
  const double bearing = std::atan2((theta_f - x.theta) * std::cos(x.phi),
                                    phi_f - x.phi);
  x.psi = bearing + rng.uniform(-1.0, 1.0) * ic_scale *
                        spec.semicircle.heading_halfwidth;
  x.alpha = spec.ic_nominal.alpha;
  x.sigma = spec.ic_nominal.sigma;
  return x;
}

ReentryEnv::ReentryEnv(const ExperimentConfig& cfg, double ic_scale)
    : params_(cfg.vehicle),
      spec_(cfg.problem),
      hlas_(cfg.hlas),
      obs_scales_(cfg.network.obs_scales),
      ic_scale_(ic_scale) {
  params_.validate();
  spec_.validate();
  hlas_.validate();
  if (hlas_.n_channels != 2) {
    throw std::invalid_argument("reentry env needs exactly 2 action channels");
  }
  if (obs_scales_.size() != 8) {
    throw std::invalid_argument("reentry env needs 8 observation scales");
  }
}

Eigen::VectorXd ReentryEnv::reset() {
  return reset_to(sample_initial_state(spec_, rng_, ic_scale_));
}

Eigen::VectorXd ReentryEnv::reset_to(const VehicleState& x0) {
  if (!x0.finite()) {
    throw std::invalid_argument("reset_to: non-finite initial state");
  }
  x_ = x0;
  t_ = 0.0;
  action_steps_ = 0;
  done_ = false;
  have_prev_z_ = false;
  if (trace_) {
    TraceRow row;
    row.t = 0.0;
    row.x = x_;
    row.q = aero_forces(x_, params_).q;
    trace_(row);
  }
  return normalize_obs(x_, obs_scales_);
}

StepResult ReentryEnv::step(const Eigen::VectorXd& raw_action) {
  if (done_) throw std::logic_error("step called on a finished episode");
  ++action_steps_;

  DecodedAction action = decode_action(raw_action, hlas_);
  if (hlas_.continuity && have_prev_z_) {
    for (int c = 0; c < hlas_.n_channels; ++c) {
      action.nodes[c][0] = prev_z_end_[c];
    }
  }
  SegmentPoly seg = fit_segment(action, hlas_);
  const int n_sub =
      std::max<long>(1, std::llround(action.tau / spec_.dt));
  const double tau_eff = n_sub * spec_.dt;
  seg.tau = tau_eff;  // profile stretched over the rounded duration

  double heating_peak = 0.0;
  int saturation_count = 0;
  VehicleState last_valid = x_;

  for (int i = 0; i < n_sub; ++i) {
    const std::vector<double> z = eval_segment(seg, i * spec_.dt);
    ControlInput u{};
    bool step_ok = true;
    TerminationCause cause = TerminationCause::none;
    try {
      if (spec_.variant == Variant::hlas_dynamics ||
          spec_.variant == Variant::hlas_fixed_tau) {
        const ControllerOutput co =
            control_from_desired_dynamics(x_, {z[0], z[1]}, params_);
        u = co.control;
        if (co.diag.saturated) ++saturation_count;
      } else {
        const ControlInput raw{z[0], z[1]};
        u = clamp_controls(raw, params_);
        if (u.alpha_cmd != raw.alpha_cmd || u.sigma_cmd != raw.sigma_cmd) {
          ++saturation_count;
        }
      }
      last_valid = x_;
      x_ = rk4_step(x_, u, spec_.dt, params_);
    } catch (const std::exception&) {
      // polar singularity / non-finite propagation: treat as infeasible
      step_ok = false;
      cause = TerminationCause::constraint_violation;
    }

    double q = 0.0;
    if (step_ok) {
      t_ += spec_.dt;
      q = aero_forces(x_, params_).q;
      heating_peak = std::max(heating_peak, q);
      if (check_path_constraints(x_, q, params_) != PathConstraint::none) {
        cause = TerminationCause::constraint_violation;
      } else if (spec_.kind == ProblemKind::debris_avoidance &&
                 obstacle_check(x_, spec_.obstacles)) {
        cause = TerminationCause::obstacle;
      }
    }

    if (cause != TerminationCause::none) {
      if (step_ok && trace_) {
        trace_({t_, x_, u, q, 0.0, action_steps_, cause});
      }
      done_ = true;
      StepResult res;
      res.observation = normalize_obs(last_valid, obs_scales_);
      res.reward = 0.0;
      res.terminated = true;
      res.cause = cause;
      res.elapsed_time = t_;
      res.heating_peak = heating_peak;
      res.saturation_count = saturation_count;
      res.effective_tau = tau_eff;
      return res;
    }

    const bool last_sub = (i + 1 == n_sub);
    if (!last_sub && trace_) {
      trace_({t_, x_, u, q, 0.0, action_steps_, TerminationCause::none});
    }
    if (last_sub) {
      // terminal checks happen only at sub-horizon ends
      TerminationCause end_cause = TerminationCause::none;
      if (terminal_check(x_, spec_)) {
        end_cause = TerminationCause::goal;
      } else if (action_steps_ >= spec_.max_action_steps) {
        end_cause = TerminationCause::timeout;
      }
      const double reward = reward_fn(x_, end_cause, spec_);
      if (trace_) {
        trace_({t_, x_, u, q, reward, action_steps_, end_cause});
      }
      prev_z_end_ = eval_segment(seg, tau_eff);
      have_prev_z_ = true;
      done_ = (end_cause != TerminationCause::none);
      StepResult res;
      res.observation = normalize_obs(x_, obs_scales_);
      res.reward = reward;
      res.terminated = done_;
      res.cause = end_cause;
      res.elapsed_time = t_;
      res.heating_peak = heating_peak;
      res.saturation_count = saturation_count;
      res.effective_tau = tau_eff;
      return res;
    }
  }
  throw std::logic_error("unreachable");  // loop always returns on last_sub
}

}  // namespace hlas
