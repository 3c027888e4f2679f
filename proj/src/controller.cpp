#include "hlas/controller.hpp"

#include <cmath>
#include <stdexcept>

namespace hlas {

AccelCommand accel_command(const VehicleState& x, const DesiredRates& rates,
                           const VehicleParams& p) {
  const double cphi = std::cos(x.phi);
  if (std::fabs(cphi) < 1e-9) {
    throw std::domain_error("accel_command: polar singularity (cos phi ~ 0)");
  }
  if (!(x.v > 0.0)) {
    throw std::domain_error("accel_command: v must be > 0");
  }
  const double cgam = std::cos(x.gamma);
  const double r = p.Re + x.h;

  AccelCommand a;
  a.a2 = x.v * cgam *
         (x.h * rates.psi_dot * cphi + p.Re * rates.psi_dot * cphi -
          x.v * cgam * std::sin(x.phi) * std::sin(x.psi)) /
         (cphi * r);
  a.a3 = -x.v * (p.Re * rates.gamma_dot + rates.gamma_dot * x.h - x.v * cgam) / r;
  return a;
}

AeroForceCommand required_aero_force(const AccelCommand& a,
                                     const VehicleState& x,
                                     const VehicleParams& p) {
  AeroForceCommand cmd;
  const double g = p.mu / ((x.h + p.Re) * (x.h + p.Re));
  cmd.f2 = p.m * a.a2;
  cmd.f3 = p.m * (a.a3 - g * std::cos(x.gamma));
  cmd.L_cmd = std::hypot(cmd.f2, cmd.f3);
  // diagnostic: aero force the glider is actually producing along velocity x
  cmd.f1 = -aero_forces(x, p).D;
  return cmd;
}

ControllerOutput bank_and_alpha(const AeroForceCommand& cmd,
                                const VehicleState& x, const VehicleParams& p) {
  if (!(x.v > 0.0)) {
    throw std::domain_error("bank_and_alpha: v must be > 0");
  }
  ControllerOutput out;
  out.diag = cmd;
  out.diag.sigma_cmd_raw = std::atan2(cmd.f2, -cmd.f3);

  const double rho = p.rho0 * std::exp(-x.h / p.H0);
  const double CL_req = 2.0 * cmd.L_cmd / (p.S * rho * x.v * x.v);
  out.diag.alpha_cmd_raw = deg2rad((CL_req - p.a0) / p.a1);

  out.control = clamp_controls(
      {out.diag.alpha_cmd_raw, out.diag.sigma_cmd_raw}, p);
  out.diag.saturated = out.control.alpha_cmd != out.diag.alpha_cmd_raw ||
                       out.control.sigma_cmd != out.diag.sigma_cmd_raw;
  return out;
}

ControllerOutput control_from_desired_dynamics(const VehicleState& x,
                                               const DesiredRates& rates,
                                               const VehicleParams& p) {
  const AccelCommand a = accel_command(x, rates, p);
  return bank_and_alpha(required_aero_force(a, x, p), x, p);
}

}  // namespace hlas
