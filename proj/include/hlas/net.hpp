#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hlas/rng.hpp"

namespace hlas {

constexpr double kLogStdMin = -20.0;
constexpr double kLogStdMax = 2.0;

struct NetArch {
  int input_dim = 8;
  std::vector<int> shared{256, 256};  // ReLU trunk widths
  int head_hidden = 128;              // private hidden width per head
  int action_dim = 5;

  long param_count() const;
  void validate() const;
  bool operator==(const NetArch&) const = default;
};

struct Dense {
  Eigen::MatrixXd W;  // out x in
  Eigen::VectorXd b;
};

// Actor-critic parameters: shared ReLU trunk, one private hidden layer per
// head, linear outputs, plus a state-independent learnable log-std vector.
// Double precision throughout; obs_scales ride along so a checkpoint fully
// determines evaluation behavior.
struct PolicyParams {
  NetArch arch;
  std::vector<Dense> trunk;
  Dense policy_hidden, policy_out;  // -> mu (action_dim)
  Dense value_hidden, value_out;    // -> scalar
  Eigen::VectorXd log_std;          // clamped to [kLogStdMin, kLogStdMax]
  Eigen::VectorXd obs_scales;       // input_dim

  // Orthogonal init: sqrt(2) gain on hidden layers, 0.01 on the policy
  // output, 1.0 on the value output; zero biases, zero log-std.
  static PolicyParams make(const NetArch& arch, Rng& rng);
  long param_count() const;
  bool finite() const;
};

// Gradient accumulators congruent with PolicyParams.
struct GradBuffer {
  std::vector<Dense> trunk;
  Dense policy_hidden, policy_out, value_hidden, value_out;
  Eigen::VectorXd log_std;

  static GradBuffer zeros(const NetArch& arch);
  void set_zero();
};

// Named views of the parameter memory in a fixed order; the flat layout
// used by the optimizer, checkpoints, and the gradient checker.
struct BlockRef {
  std::string name;
  double* data = nullptr;
  long size = 0;
};
std::vector<BlockRef> param_blocks(PolicyParams& p);
std::vector<BlockRef> grad_blocks(GradBuffer& g);

struct ForwardCache {
  Eigen::MatrixXd obs;                    // input_dim x N
  std::vector<Eigen::MatrixXd> trunk_act; // post-ReLU, one per trunk layer
  Eigen::MatrixXd pol_act, val_act;       // post-ReLU head hiddens
  Eigen::MatrixXd mu;                     // action_dim x N
  Eigen::RowVectorXd value;               // 1 x N
};

// Batched deterministic forward pass; throws on non-finite outputs.
void forward_batch(const PolicyParams& p, const Eigen::MatrixXd& obs,
                   ForwardCache& cache);

// Reverse pass for the recorded computation.  dmu is d(loss)/d(mu),
// dvalue is d(loss)/d(value); gradients are accumulated into grads
// (log-std gradients are the caller's job since log-std bypasses the net).
void backward_batch(const PolicyParams& p, const ForwardCache& cache,
                    const Eigen::MatrixXd& dmu,
                    const Eigen::RowVectorXd& dvalue, GradBuffer& grads);

// Single-observation conveniences.
Eigen::VectorXd policy_mean(const PolicyParams& p, const Eigen::VectorXd& obs);
double value_of(const PolicyParams& p, const Eigen::VectorXd& obs);

// Diagonal Gaussian pieces (Box-Muller sampling via Rng).
Eigen::VectorXd sample_gaussian(const Eigen::VectorXd& mu,
                                const Eigen::VectorXd& log_std, Rng& rng);
double gaussian_log_prob(const Eigen::VectorXd& a, const Eigen::VectorXd& mu,
                         const Eigen::VectorXd& log_std);
double gaussian_entropy(const Eigen::VectorXd& log_std);

struct AdamState {
  Eigen::VectorXd m, v;
  long t = 0;
  static AdamState zeros(long n);
};

// Bias-corrected adaptive-moment update over the flat block layout.
// Throws std::runtime_error if any parameter leaves the finite range.
void adam_update(PolicyParams& p, GradBuffer& g, AdamState& st, double lr,
                 double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

double global_grad_norm(GradBuffer& g);
// Scales all gradients so the global norm is at most max_norm.
void clip_grad_norm(GradBuffer& g, double max_norm);

void orthogonal_init(Eigen::MatrixXd& W, double gain, Rng& rng);

}  // namespace hlas
