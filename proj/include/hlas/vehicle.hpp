#pragma once

#include <array>
#include <string>

namespace hlas {

constexpr double kPi = 3.14159265358979323846;
constexpr double deg2rad(double d) { return d * kPi / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

// Shuttle reentry state over a spherical non-rotating Earth.
// Angles in radians, lengths in meters, speeds in m/s.
struct VehicleState {
  double h = 0.0;      // altitude [m]
  double v = 0.0;      // speed [m/s]
  double theta = 0.0;  // longitude [rad]
  double phi = 0.0;    // latitude [rad]
  double gamma = 0.0;  // vertical flight-path angle [rad]
  double psi = 0.0;    // heading angle [rad]
  double alpha = 0.0;  // angle of attack [rad]
  double sigma = 0.0;  // bank angle [rad]

  std::array<double, 8> as_array() const {
    return {h, v, theta, phi, gamma, psi, alpha, sigma};
  }
  static VehicleState from_array(const std::array<double, 8>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7]};
  }
  bool finite() const;
};

struct ControlInput {
  double alpha_cmd = 0.0;  // commanded angle of attack [rad]
  double sigma_cmd = 0.0;  // commanded bank angle [rad]
};

// Physical and aerodynamic constants.  Not hard-coded anywhere: loaded from a
// config file whose provenance string travels with the values.
struct VehicleParams {
  double Re = 0.0;    // Earth radius [m]
  double m = 0.0;     // vehicle mass [kg]
  double S = 0.0;     // reference area [m^2]
  double rho0 = 0.0;  // sea-level density [kg/m^3]
  double H0 = 0.0;    // density scale height [m]
  double mu = 0.0;    // gravitational parameter [m^3/s^2]

  // C_L = a0 + a1*ahat, C_D = b0 + b1*ahat + b2*ahat^2, ahat in degrees
  double a0 = 0.0, a1 = 0.0;
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  // leading-edge heating polynomial in ahat (degrees)
  double hc0 = 0.0, hc1 = 0.0, hc2 = 0.0, hc3 = 0.0;

  double tau_alpha = 1.0;  // angle-of-attack loop time constant [s]
  double tau_sigma = 1.0;  // bank loop time constant [s]

  // path-constraint and command limits
  double q_max = 80.0;                       // heating limit [BTU/ft^2-s]
  double h_min = 20000.0;                    // [m]
  double v_min = 600.0;                      // [m/s]
  double gamma_abs_max = deg2rad(20.0);      // [rad]
  double alpha_cmd_max = deg2rad(45.0);      // [rad]
  double sigma_cmd_max = deg2rad(89.0);      // [rad]

  std::string provenance;

  // Throws std::invalid_argument on non-finite or sign-invalid values.
  void validate() const;
};

struct AeroOutputs {
  double L = 0.0;    // lift [N]
  double D = 0.0;    // drag [N]
  double rho = 0.0;  // air density [kg/m^3]
  double g = 0.0;    // gravitational acceleration [m/s^2]
  double CL = 0.0;
  double CD = 0.0;
  double q = 0.0;    // leading-edge heating [BTU/ft^2-s]
};

using StateDeriv = std::array<double, 8>;

// Exponential atmosphere, point-mass gravity, polynomial aero in ahat =
// (180/pi)*alpha.  Heating is included in the outputs.
AeroOutputs aero_forces(const VehicleState& x, const VehicleParams& p);

// q = 779.67*(hc0 + hc1*ahat + hc2*ahat^2 + hc3*ahat^3)*sqrt(rho)
//     *(3.28084e-4*v)^3.07, ahat in degrees.  Imperial conversion factors
// are part of the formula; inputs are SI.
double heating(const VehicleState& x, double rho, const VehicleParams& p);

// Spherical-Earth reentry dynamics with first-order lag on both attitude
// loops.  Throws std::domain_error near the polar singularity
// (|cos phi| < 1e-9) or for v < 1e-6.
StateDeriv derivatives(const VehicleState& x, const ControlInput& u,
                       const VehicleParams& p);

// Classical RK4 with zero-order hold on the control.  dt > 0.
// Throws std::runtime_error if the result is non-finite.
VehicleState rk4_step(const VehicleState& x, const ControlInput& u, double dt,
                      const VehicleParams& p);

// Component-wise clamp to the command limits.  Idempotent.
ControlInput clamp_controls(const ControlInput& raw, const VehicleParams& p);

enum class PathConstraint { none, altitude, speed, flight_path_angle, heating };

const char* path_constraint_name(PathConstraint c);

// Boundary values are feasible (all inequalities non-strict).
PathConstraint check_path_constraints(const VehicleState& x, double q,
                                      const VehicleParams& p);

}  // namespace hlas
