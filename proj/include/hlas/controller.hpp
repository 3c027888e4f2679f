#pragma once

#include "hlas/vehicle.hpp"

namespace hlas {

// Desired output dynamics for the dynamic-inversion tracking controller.
struct DesiredRates {
  double gamma_dot = 0.0;  // desired vertical flight-path angle rate [rad/s]
  double psi_dot = 0.0;    // desired heading rate [rad/s]
};

// Required aerodynamic force in the velocity frame plus the raw (unclamped)
// bank/alpha solution.  f1 is diagnostic only: the aero force actually acting
// along the velocity x-axis (-drag); it is never commanded on a glider.
struct AeroForceCommand {
  double f1 = 0.0;             // [N]
  double f2 = 0.0;             // [N]
  double f3 = 0.0;             // [N]
  double L_cmd = 0.0;          // required lift magnitude [N]
  double sigma_cmd_raw = 0.0;  // [rad], before clamping
  double alpha_cmd_raw = 0.0;  // [rad], before clamping
  bool saturated = false;
};

struct AccelCommand {
  double a2 = 0.0;  // [m/s^2]
  double a3 = 0.0;  // [m/s^2]
};

struct ControllerOutput {
  ControlInput control;   // clamped commands
  AeroForceCommand diag;  // force solution and saturation flag
};

// Velocity-frame acceleration that realizes the desired (gamma_dot, psi_dot)
// at the current state.  The along-velocity component is not commanded.
// Throws std::domain_error at the polar singularity or v <= 0.
AccelCommand accel_command(const VehicleState& x, const DesiredRates& rates,
                           const VehicleParams& p);

// Newton's second law in the velocity frame with gravity
// g_V = [-g sin(gamma), 0, g cos(gamma)]: f2 = m*a2, f3 = m*(a3 - g cos(gamma)).
AeroForceCommand required_aero_force(const AccelCommand& a,
                                     const VehicleState& x,
                                     const VehicleParams& p);

// Bank-to-turn inversion: sigma_cmd = atan2(f2, -f3), lift magnitude solved
// analytically through C_L.  Saturation is flagged, never an error.
ControllerOutput bank_and_alpha(const AeroForceCommand& cmd,
                                const VehicleState& x, const VehicleParams& p);

// Composition of the three steps above.
ControllerOutput control_from_desired_dynamics(const VehicleState& x,
                                               const DesiredRates& rates,
                                               const VehicleParams& p);

}  // namespace hlas
