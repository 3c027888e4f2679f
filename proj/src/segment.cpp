#include "hlas/segment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hlas {

void HlasConfig::validate() const {
  if (degree < 0) throw std::invalid_argument("hlas: degree must be >= 0");
  if (n_channels < 1) {
    throw std::invalid_argument("hlas: n_channels must be >= 1");
  }
  if (!(tau_min <= tau_max) || !(tau_min > 0.0)) {
    throw std::invalid_argument("hlas: need 0 < tau_min <= tau_max");
  }
  if (static_cast<int>(z_min.size()) != n_channels ||
      static_cast<int>(z_max.size()) != n_channels) {
    throw std::invalid_argument("hlas: z bounds must have n_channels entries");
  }
  for (int c = 0; c < n_channels; ++c) {
    if (!(z_min[c] < z_max[c])) {
      throw std::invalid_argument("hlas: need z_min < z_max per channel");
    }
  }
}

DecodedAction decode_action(const Eigen::VectorXd& raw, const HlasConfig& cfg) {
  if (raw.size() != cfg.action_dim()) {
    throw std::invalid_argument("decode_action: raw action length mismatch");
  }
  auto unit = [](double x) {  // clamp then map [-1,1] -> [0,1]
    x = std::clamp(x, -1.0, 1.0);
    return 0.5 * (x + 1.0);
  };
  DecodedAction out;
  out.tau = cfg.tau_min + unit(raw[0]) * (cfg.tau_max - cfg.tau_min);
  out.nodes.resize(cfg.n_channels);
  int k = 1;
  for (int c = 0; c < cfg.n_channels; ++c) {
    out.nodes[c].resize(cfg.degree + 1);
    for (int i = 0; i <= cfg.degree; ++i) {
      out.nodes[c][i] =
          cfg.z_min[c] + unit(raw[k++]) * (cfg.z_max[c] - cfg.z_min[c]);
    }
  }
  return out;
}

SegmentPoly fit_segment(const DecodedAction& action, const HlasConfig& cfg) {
  const int p = cfg.degree;
  SegmentPoly seg;
  seg.tau = action.tau;
  seg.coeffs.resize(cfg.n_channels);

  // Vandermonde at abscissae i/p; nonsingular since abscissae are distinct.
  Eigen::MatrixXd V(p + 1, p + 1);
  for (int i = 0; i <= p; ++i) {
    const double t = (p == 0) ? 0.0 : static_cast<double>(i) / p;
    double pw = 1.0;
    for (int j = 0; j <= p; ++j) {
      V(i, j) = pw;
      pw *= t;
    }
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(V);

  for (int c = 0; c < cfg.n_channels; ++c) {
    if (static_cast<int>(action.nodes[c].size()) != p + 1) {
      throw std::invalid_argument("fit_segment: need p+1 nodes per channel");
    }
    Eigen::VectorXd rhs(p + 1);
    for (int i = 0; i <= p; ++i) rhs[i] = action.nodes[c][i];
    const Eigen::VectorXd sol = lu.solve(rhs);
    seg.coeffs[c].assign(sol.data(), sol.data() + p + 1);
  }
  return seg;
}

std::vector<double> eval_segment(const SegmentPoly& seg, double t) {
  if (t < 0.0 || t > seg.tau) {
    throw std::out_of_range("eval_segment: t outside [0, tau]");
  }
  const double tp = t / seg.tau;
  std::vector<double> z(seg.coeffs.size());
  for (std::size_t c = 0; c < seg.coeffs.size(); ++c) {
    const auto& ck = seg.coeffs[c];
    double acc = 0.0;
    for (auto it = ck.rbegin(); it != ck.rend(); ++it) acc = acc * tp + *it;
    z[c] = acc;
  }
  return z;
}

std::vector<double> integrate_segment(const SegmentPoly& seg,
                                      const std::vector<double>& y_prev,
                                      double t) {
  if (t < 0.0 || t > seg.tau) {
    throw std::out_of_range("integrate_segment: t outside [0, tau]");
  }
  if (y_prev.size() != seg.coeffs.size()) {
    throw std::invalid_argument("integrate_segment: y_prev size mismatch");
  }
  const double tp = t / seg.tau;
  std::vector<double> y(y_prev);
  for (std::size_t c = 0; c < seg.coeffs.size(); ++c) {
    double pw = tp;  // tp^{k+1}
    double acc = 0.0;
    for (std::size_t k = 0; k < seg.coeffs[c].size(); ++k) {
      acc += seg.coeffs[c][k] / static_cast<double>(k + 1) * pw;
      pw *= tp;
    }
    y[c] += seg.tau * acc;
  }
  return y;
}

namespace {

// least-squares polynomial fit of given degree over (ts, fs)
std::vector<double> ls_fit(const std::vector<double>& ts,
                           const std::vector<double>& fs, int degree) {
  const int n = static_cast<int>(ts.size());
  const int m = std::min(degree, n - 1) + 1;
  Eigen::MatrixXd A(n, m);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    double pw = 1.0;
    for (int j = 0; j < m; ++j) {
      A(i, j) = pw;
      pw *= ts[i];
    }
    b[i] = fs[i];
  }
  Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
  std::vector<double> out(degree + 1, 0.0);
  for (int j = 0; j < m; ++j) out[j] = sol[j];
  return out;
}

double poly_eval(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

}  // namespace

LemmaReport lemma_error_oracle(const std::vector<double>& f_samples, double t0,
                               double sample_dt,
                               const std::vector<double>& durations,
                               int degree) {
  if (durations.empty()) {
    throw std::invalid_argument("lemma_error_oracle: empty partition");
  }
  if (f_samples.size() < 2 || !(sample_dt > 0.0)) {
    throw std::invalid_argument("lemma_error_oracle: need dense samples");
  }
  const int n = static_cast<int>(f_samples.size());

  // z* sampled on the same grid as f*
  std::vector<double> z(n, 0.0);
  double seg_start = t0;
  std::size_t seg = 0;
  int i0 = 0;
  while (i0 < n && seg < durations.size()) {
    const double seg_end = seg_start + durations[seg];
    int i1 = i0;
    while (i1 < n && t0 + i1 * sample_dt <= seg_end + 1e-12) ++i1;
    if (seg + 1 == durations.size()) i1 = n;  // last segment absorbs the tail
    if (i1 > i0) {
      if (degree == 0) {
        const auto [lo, hi] =
            std::minmax_element(f_samples.begin() + i0, f_samples.begin() + i1);
        const double mid = 0.5 * (*lo + *hi);
        std::fill(z.begin() + i0, z.begin() + i1, mid);
      } else {
        std::vector<double> fs(f_samples.begin() + i0, f_samples.begin() + i1);
        std::vector<double> ts(fs.size());
        for (std::size_t k = 0; k < ts.size(); ++k) {
          ts[k] = t0 + (i0 + static_cast<int>(k)) * sample_dt - seg_start;
        }
        const auto c = ls_fit(ts, fs, degree);
        for (int i = i0; i < i1; ++i) {
          z[i] = poly_eval(c, t0 + i * sample_dt - seg_start);
        }
      }
    }
    i0 = i1;
    seg_start = seg_end;
    ++seg;
  }

  LemmaReport report;
  for (int i = 0; i < n; ++i) {
    report.m1 = std::max(report.m1, std::fabs(z[i] - f_samples[i]));
  }

  // trapezoid integration of both trajectories from t0
  double xf = 0.0, xz = 0.0;
  report.bound_satisfied = true;
  for (int i = 1; i < n; ++i) {
    xf += 0.5 * sample_dt * (f_samples[i - 1] + f_samples[i]);
    xz += 0.5 * sample_dt * (z[i - 1] + z[i]);
    const double err = std::fabs(xz - xf);
    report.max_integrated_error = std::max(report.max_integrated_error, err);
    const double bound = report.m1 * (i * sample_dt) + 1e-12;
    if (err > bound) report.bound_satisfied = false;
  }
  return report;
}

}  // namespace hlas
