#include "hlas/net.hpp"

#include <cmath>
#include <stdexcept>

namespace hlas {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;  // log(2*pi)

Dense make_dense(int out, int in) {
  return {Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)};
}

void append_dense_blocks(std::vector<BlockRef>& out, const std::string& name,
                         Dense& d) {
  out.push_back({name + ".W", d.W.data(), d.W.size()});
  out.push_back({name + ".b", d.b.data(), d.b.size()});
}

// y = W x + b for a batch in columns
Eigen::MatrixXd affine(const Dense& d, const Eigen::MatrixXd& x) {
  return (d.W * x).colwise() + d.b;
}

Eigen::MatrixXd relu(const Eigen::MatrixXd& z) { return z.cwiseMax(0.0); }

}  // namespace

void NetArch::validate() const {
  if (input_dim < 1 || head_hidden < 1 || action_dim < 1) {
    throw std::invalid_argument("net arch: dims must be >= 1");
  }
  if (shared.empty()) {
    throw std::invalid_argument("net arch: need at least one shared layer");
  }
  for (int w : shared) {
    if (w < 1) throw std::invalid_argument("net arch: widths must be >= 1");
  }
}

long NetArch::param_count() const {
  long n = 0;
  int in = input_dim;
  for (int w : shared) {
    n += static_cast<long>(w) * in + w;
    in = w;
  }
  n += static_cast<long>(head_hidden) * in + head_hidden;  // policy hidden
  n += static_cast<long>(action_dim) * head_hidden + action_dim;
  n += static_cast<long>(head_hidden) * in + head_hidden;  // value hidden
  n += static_cast<long>(head_hidden) + 1;                 // value out
  n += action_dim;                                         // log_std
  return n;
}

PolicyParams PolicyParams::make(const NetArch& arch, Rng& rng) {
  arch.validate();
  PolicyParams p;
  p.arch = arch;
  int in = arch.input_dim;
  for (int w : arch.shared) {
    p.trunk.push_back(make_dense(w, in));
    orthogonal_init(p.trunk.back().W, std::sqrt(2.0), rng);
    in = w;
  }
  p.policy_hidden = make_dense(arch.head_hidden, in);
  orthogonal_init(p.policy_hidden.W, std::sqrt(2.0), rng);
  p.policy_out = make_dense(arch.action_dim, arch.head_hidden);
  orthogonal_init(p.policy_out.W, 0.01, rng);
  p.value_hidden = make_dense(arch.head_hidden, in);
  orthogonal_init(p.value_hidden.W, std::sqrt(2.0), rng);
  p.value_out = make_dense(1, arch.head_hidden);
  orthogonal_init(p.value_out.W, 1.0, rng);
  p.log_std = Eigen::VectorXd::Zero(arch.action_dim);
  p.obs_scales = Eigen::VectorXd::Ones(arch.input_dim);
  return p;
}

long PolicyParams::param_count() const { return arch.param_count(); }

bool PolicyParams::finite() const {
  auto blocks = param_blocks(const_cast<PolicyParams&>(*this));
  for (const BlockRef& b : blocks) {
    for (long i = 0; i < b.size; ++i) {
      if (!std::isfinite(b.data[i])) return false;
    }
  }
  return true;
}

GradBuffer GradBuffer::zeros(const NetArch& arch) {
  GradBuffer g;
  int in = arch.input_dim;
  for (int w : arch.shared) {
    g.trunk.push_back(make_dense(w, in));
    in = w;
  }
  g.policy_hidden = make_dense(arch.head_hidden, in);
  g.policy_out = make_dense(arch.action_dim, arch.head_hidden);
  g.value_hidden = make_dense(arch.head_hidden, in);
  g.value_out = make_dense(1, arch.head_hidden);
  g.log_std = Eigen::VectorXd::Zero(arch.action_dim);
  return g;
}

void GradBuffer::set_zero() {
  for (Dense& d : trunk) {
    d.W.setZero();
    d.b.setZero();
  }
  policy_hidden.W.setZero();
  policy_hidden.b.setZero();
  policy_out.W.setZero();
  policy_out.b.setZero();
  value_hidden.W.setZero();
  value_hidden.b.setZero();
  value_out.W.setZero();
  value_out.b.setZero();
  log_std.setZero();
}

std::vector<BlockRef> param_blocks(PolicyParams& p) {
  std::vector<BlockRef> out;
  for (std::size_t i = 0; i < p.trunk.size(); ++i) {
    append_dense_blocks(out, "trunk" + std::to_string(i), p.trunk[i]);
  }
  append_dense_blocks(out, "policy_hidden", p.policy_hidden);
  append_dense_blocks(out, "policy_out", p.policy_out);
  append_dense_blocks(out, "value_hidden", p.value_hidden);
  append_dense_blocks(out, "value_out", p.value_out);
  out.push_back({"log_std", p.log_std.data(), p.log_std.size()});
  return out;
}

std::vector<BlockRef> grad_blocks(GradBuffer& g) {
  std::vector<BlockRef> out;
  for (std::size_t i = 0; i < g.trunk.size(); ++i) {
    append_dense_blocks(out, "trunk" + std::to_string(i), g.trunk[i]);
  }
  append_dense_blocks(out, "policy_hidden", g.policy_hidden);
  append_dense_blocks(out, "policy_out", g.policy_out);
  append_dense_blocks(out, "value_hidden", g.value_hidden);
  append_dense_blocks(out, "value_out", g.value_out);
  out.push_back({"log_std", g.log_std.data(), g.log_std.size()});
  return out;
}

void forward_batch(const PolicyParams& p, const Eigen::MatrixXd& obs,
                   ForwardCache& cache) {
  if (obs.rows() != p.arch.input_dim) {
    throw std::invalid_argument("forward: observation dimension mismatch");
  }
  cache.obs = obs;
  cache.trunk_act.resize(p.trunk.size());
  const Eigen::MatrixXd* prev = &cache.obs;
  for (std::size_t l = 0; l < p.trunk.size(); ++l) {
    cache.trunk_act[l] = relu(affine(p.trunk[l], *prev));
    prev = &cache.trunk_act[l];
  }
  cache.pol_act = relu(affine(p.policy_hidden, *prev));
  cache.val_act = relu(affine(p.value_hidden, *prev));
  cache.mu = affine(p.policy_out, cache.pol_act);
  cache.value = affine(p.value_out, cache.val_act).row(0);
  if (!cache.mu.allFinite() || !cache.value.allFinite()) {
    throw std::runtime_error("forward: non-finite network output");
  }
}

void backward_batch(const PolicyParams& p, const ForwardCache& cache,
                    const Eigen::MatrixXd& dmu,
                    const Eigen::RowVectorXd& dvalue, GradBuffer& grads) {
  if (dmu.rows() != p.arch.action_dim || dmu.cols() != cache.obs.cols() ||
      dvalue.cols() != cache.obs.cols()) {
    throw std::invalid_argument("backward: adjoint shape mismatch");
  }
  const Eigen::MatrixXd& last_trunk = cache.trunk_act.back();

  // policy head
  grads.policy_out.W.noalias() += dmu * cache.pol_act.transpose();
  grads.policy_out.b += dmu.rowwise().sum();
  Eigen::MatrixXd d_pol = (p.policy_out.W.transpose() * dmu).array() *
                          (cache.pol_act.array() > 0.0).cast<double>();
  grads.policy_hidden.W.noalias() += d_pol * last_trunk.transpose();
  grads.policy_hidden.b += d_pol.rowwise().sum();

  // value head
  grads.value_out.W.noalias() += dvalue * cache.val_act.transpose();
  grads.value_out.b(0) += dvalue.sum();
  Eigen::MatrixXd d_val = (p.value_out.W.transpose() * dvalue).array() *
                          (cache.val_act.array() > 0.0).cast<double>();
  grads.value_hidden.W.noalias() += d_val * last_trunk.transpose();
  grads.value_hidden.b += d_val.rowwise().sum();

  // trunk
  Eigen::MatrixXd d_act = p.policy_hidden.W.transpose() * d_pol +
                          p.value_hidden.W.transpose() * d_val;
  for (long l = static_cast<long>(p.trunk.size()) - 1; l >= 0; --l) {
    const Eigen::MatrixXd d_z =
        d_act.array() * (cache.trunk_act[l].array() > 0.0).cast<double>();
    const Eigen::MatrixXd& below =
        l == 0 ? cache.obs : cache.trunk_act[l - 1];
    grads.trunk[l].W.noalias() += d_z * below.transpose();
    grads.trunk[l].b += d_z.rowwise().sum();
    if (l > 0) d_act = p.trunk[l].W.transpose() * d_z;
  }
}

Eigen::VectorXd policy_mean(const PolicyParams& p,
                            const Eigen::VectorXd& obs) {
  ForwardCache cache;
  forward_batch(p, obs, cache);
  return cache.mu.col(0);
}

double value_of(const PolicyParams& p, const Eigen::VectorXd& obs) {
  ForwardCache cache;
  forward_batch(p, obs, cache);
  return cache.value(0);
}

Eigen::VectorXd sample_gaussian(const Eigen::VectorXd& mu,
                                const Eigen::VectorXd& log_std, Rng& rng) {
  Eigen::VectorXd a(mu.size());
  for (long j = 0; j < mu.size(); ++j) {
    a[j] = mu[j] + std::exp(log_std[j]) * rng.normal();
  }
  return a;
}

double gaussian_log_prob(const Eigen::VectorXd& a, const Eigen::VectorXd& mu,
                         const Eigen::VectorXd& log_std) {
  double lp = 0.0;
  for (long j = 0; j < mu.size(); ++j) {
    const double z = (a[j] - mu[j]) * std::exp(-log_std[j]);
    lp += -log_std[j] - 0.5 * kLog2Pi - 0.5 * z * z;
  }
  return lp;
}

double gaussian_entropy(const Eigen::VectorXd& log_std) {
  return log_std.sum() +
         0.5 * (kLog2Pi + 1.0) * static_cast<double>(log_std.size());
}

AdamState AdamState::zeros(long n) {
  return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0};
}

void adam_update(PolicyParams& p, GradBuffer& g, AdamState& st, double lr,
                 double beta1, double beta2, double eps) {
  auto pb = param_blocks(p);
  auto gb = grad_blocks(g);
  if (pb.size() != gb.size()) {
    throw std::invalid_argument("adam: param/grad block mismatch");
  }
  ++st.t;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(st.t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(st.t));
  long off = 0;
  for (std::size_t k = 0; k < pb.size(); ++k) {
    if (pb[k].size != gb[k].size) {
      throw std::invalid_argument("adam: block size mismatch at " + pb[k].name);
    }
    for (long i = 0; i < pb[k].size; ++i, ++off) {
      const double grad = gb[k].data[i];
      double& m = st.m[off];
      double& v = st.v[off];
      m = beta1 * m + (1.0 - beta1) * grad;
      v = beta2 * v + (1.0 - beta2) * grad * grad;
      pb[k].data[i] -= lr * (m / bc1) / (std::sqrt(v / bc2) + eps);
      if (!std::isfinite(pb[k].data[i])) {
        throw std::runtime_error("adam: non-finite parameter in " +
                                 pb[k].name);
      }
    }
  }
  // keep the density non-degenerate
  p.log_std = p.log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
}

double global_grad_norm(GradBuffer& g) {
  double ss = 0.0;
  for (const BlockRef& b : grad_blocks(g)) {
    for (long i = 0; i < b.size; ++i) ss += b.data[i] * b.data[i];
  }
  return std::sqrt(ss);
}

void clip_grad_norm(GradBuffer& g, double max_norm) {
  const double norm = global_grad_norm(g);
  if (norm <= max_norm || norm == 0.0) return;
  const double f = max_norm / norm;
  for (BlockRef& b : grad_blocks(g)) {
    for (long i = 0; i < b.size; ++i) b.data[i] *= f;
  }
}

void orthogonal_init(Eigen::MatrixXd& W, double gain, Rng& rng) {
  const long rows = W.rows(), cols = W.cols();
  const long r = std::max(rows, cols), c = std::min(rows, cols);
  Eigen::MatrixXd A(r, c);
  for (long j = 0; j < c; ++j) {
    for (long i = 0; i < r; ++i) A(i, j) = rng.normal();
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(r, c);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(c);
  for (long j = 0; j < c; ++j) {
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  }
  W = (rows >= cols) ? Q : Eigen::MatrixXd(Q.transpose());
  W *= gain;
}

}  // namespace hlas
