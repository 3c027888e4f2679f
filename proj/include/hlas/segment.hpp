#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hlas {

// High-level action space layout: raw policy action in [-1,1]^{1+n*(p+1)}
// maps to a duration tau plus per-channel polynomial node values.
struct HlasConfig {
  int degree = 1;      // p
  int n_channels = 2;  // z channels
  double tau_min = 2.0;
  double tau_max = 30.0;
  std::vector<double> z_min;  // per channel, physical units
  std::vector<double> z_max;
  bool continuity = false;  // enforce z_{h+1}(0) = z_h(1)

  int action_dim() const { return 1 + n_channels * (degree + 1); }
  // Throws std::invalid_argument on inconsistent limits.
  void validate() const;
};

struct DecodedAction {
  double tau = 0.0;
  // nodes[channel][i], i = 0..p, at normalized abscissae i/p
  std::vector<std::vector<double>> nodes;
};

// Per-channel polynomial z(t') = sum_k coeffs[k] t'^k over t' in [0,1],
// applied in physical time through t' = t/tau.
struct SegmentPoly {
  double tau = 0.0;
  std::vector<std::vector<double>> coeffs;  // [channel][k], k = 0..p
};

// Clamps raw components to [-1,1], then maps affinely onto the physical
// ranges.  Throws std::invalid_argument on a length mismatch.
DecodedAction decode_action(const Eigen::VectorXd& raw, const HlasConfig& cfg);

// Unique degree-<=p interpolant through the evenly spaced nodes
// (single node at t'=0 when p=0), via a Vandermonde solve.
SegmentPoly fit_segment(const DecodedAction& action, const HlasConfig& cfg);

// Horner evaluation at t' = t/tau.  Throws std::out_of_range outside [0,tau].
std::vector<double> eval_segment(const SegmentPoly& seg, double t);

// y_des(t) = y_prev + tau * sum_k c_k/(k+1) (t/tau)^{k+1}; the leading tau
// factor makes d/dt y_des = z(t) in physical time.
std::vector<double> integrate_segment(const SegmentPoly& seg,
                                      const std::vector<double>& y_prev,
                                      double t);

struct LemmaReport {
  double m1 = 0.0;                    // sup-norm fit error of z* vs f*
  double max_integrated_error = 0.0;  // sup_t |x_hat(t) - x*(t)|
  bool bound_satisfied = false;       // error <= m1*(t - t0) everywhere
};

// Numerical check of the linear error-growth bound for piecewise-polynomial
// approximations of a sampled reference derivative f*.  For degree 0 each
// segment uses the midpoint of the sampled range (the sup-norm-optimal
// constant); for higher degree a least-squares fit.  Both f* and z* are
// integrated with the same trapezoid rule so the bound is exact on the grid.
// Throws std::invalid_argument on an empty partition.
LemmaReport lemma_error_oracle(const std::vector<double>& f_samples, double t0,
                               double sample_dt,
                               const std::vector<double>& durations,
                               int degree);

}  // namespace hlas
