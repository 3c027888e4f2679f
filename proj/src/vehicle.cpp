#include "hlas/vehicle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hlas {

bool VehicleState::finite() const {
  for (double c : as_array()) {
    if (!std::isfinite(c)) return false;
  }
  return true;
}

void VehicleParams::validate() const {
  auto positive = [](double x, const char* name) {
    if (!(std::isfinite(x) && x > 0.0)) {
      throw std::invalid_argument(std::string("vehicle param '") + name +
                                  "' must be finite and > 0");
    }
  };
  positive(Re, "Re");
  positive(m, "m");
  positive(S, "S");
  positive(rho0, "rho0");
  positive(H0, "H0");
  positive(mu, "mu");
  positive(tau_alpha, "tau_alpha");
  positive(tau_sigma, "tau_sigma");
  positive(q_max, "q_max");
  for (double c : {a0, a1, b0, b1, b2, hc0, hc1, hc2, hc3, h_min, v_min,
                   gamma_abs_max, alpha_cmd_max, sigma_cmd_max}) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument("vehicle param has non-finite value");
    }
  }
  if (a1 == 0.0) {
    // the controller's analytic lift inversion divides by a1
    throw std::invalid_argument("vehicle param 'a1' must be nonzero");
  }
}

AeroOutputs aero_forces(const VehicleState& x, const VehicleParams& p) {
  AeroOutputs out;
  const double ahat = rad2deg(x.alpha);
  out.CL = p.a0 + p.a1 * ahat;
  out.CD = p.b0 + (p.b1 + p.b2 * ahat) * ahat;
  out.rho = p.rho0 * std::exp(-x.h / p.H0);
  const double qbarS = 0.5 * out.rho * x.v * x.v * p.S;
  out.L = out.CL * qbarS;
  out.D = out.CD * qbarS;
  const double r = x.h + p.Re;
  out.g = p.mu / (r * r);
  out.q = heating(x, out.rho, p);
  return out;
}

double heating(const VehicleState& x, double rho, const VehicleParams& p) {
  const double ahat = rad2deg(x.alpha);
  const double qa = p.hc0 + (p.hc1 + (p.hc2 + p.hc3 * ahat) * ahat) * ahat;
  return 779.67 * qa * std::sqrt(rho) * std::pow(3.28084e-4 * x.v, 3.07);
}

StateDeriv derivatives(const VehicleState& x, const ControlInput& u,
                       const VehicleParams& p) {
  const double cphi = std::cos(x.phi);
  if (std::fabs(cphi) < 1e-9) {
    throw std::domain_error("derivatives: polar singularity (cos phi ~ 0)");
  }
  if (x.v < 1e-6) {
    throw std::domain_error("derivatives: speed below 1e-6 m/s");
  }

  const AeroOutputs aero = aero_forces(x, p);
  const double r = x.h + p.Re;
  const double sgam = std::sin(x.gamma);
  const double cgam = std::cos(x.gamma);
  const double spsi = std::sin(x.psi);
  const double cpsi = std::cos(x.psi);
  const double csig = std::cos(x.sigma);
  const double ssig = std::sin(x.sigma);

  StateDeriv d;
  d[0] = x.v * sgam;                                       // h_dot
  d[1] = -aero.D / p.m - aero.g * sgam;                    // v_dot
  d[2] = x.v / r * cgam * spsi / cphi;                     // theta_dot
  d[3] = x.v / r * cgam * cpsi;                            // phi_dot
  d[4] = aero.L * csig / (p.m * x.v) +
         (x.v / r - aero.g / x.v) * cgam;                  // gamma_dot
  d[5] = aero.L * ssig / (p.m * x.v * cgam) +
         x.v / r * cgam * spsi * std::sin(x.phi) / cphi;   // psi_dot
  d[6] = (u.alpha_cmd - x.alpha) / p.tau_alpha;            // alpha_dot
  d[7] = (u.sigma_cmd - x.sigma) / p.tau_sigma;            // sigma_dot
  return d;
}

namespace {

VehicleState advance(const VehicleState& x, const StateDeriv& k, double s) {
  auto a = x.as_array();
  for (int i = 0; i < 8; ++i) a[i] += s * k[i];
  return VehicleState::from_array(a);
}

}  // namespace

VehicleState rk4_step(const VehicleState& x, const ControlInput& u, double dt,
                      const VehicleParams& p) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be > 0");
  const StateDeriv k1 = derivatives(x, u, p);
  const StateDeriv k2 = derivatives(advance(x, k1, 0.5 * dt), u, p);
  const StateDeriv k3 = derivatives(advance(x, k2, 0.5 * dt), u, p);
  const StateDeriv k4 = derivatives(advance(x, k3, dt), u, p);

  auto a = x.as_array();
  for (int i = 0; i < 8; ++i) {
    a[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  VehicleState out = VehicleState::from_array(a);
  if (!out.finite()) {
    throw std::runtime_error("rk4_step: non-finite state after update");
  }
  return out;
}

ControlInput clamp_controls(const ControlInput& raw, const VehicleParams& p) {
  auto clamp = [](double x, double lim) {
    return x < -lim ? -lim : (x > lim ? lim : x);
  };
  return {clamp(raw.alpha_cmd, p.alpha_cmd_max),
          clamp(raw.sigma_cmd, p.sigma_cmd_max)};
}

const char* path_constraint_name(PathConstraint c) {
  switch (c) {
    case PathConstraint::none: return "none";
    case PathConstraint::altitude: return "altitude";
    case PathConstraint::speed: return "speed";
    case PathConstraint::flight_path_angle: return "flight_path_angle";
    case PathConstraint::heating: return "heating";
  }
  return "?";
}

PathConstraint check_path_constraints(const VehicleState& x, double q,
                                      const VehicleParams& p) {
  if (x.h < p.h_min) return PathConstraint::altitude;
  if (x.v < p.v_min) return PathConstraint::speed;
  if (std::fabs(x.gamma) > p.gamma_abs_max) {
    return PathConstraint::flight_path_angle;
  }
  if (q > p.q_max) return PathConstraint::heating;
  return PathConstraint::none;
}

}  // namespace hlas
