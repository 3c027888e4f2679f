#include "hlas/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace hlas {

namespace {

// Full-batch penalty with updated parameters, chunked so the activations of
// a 24k-column batch never materialize at once.  Fixed chunk size keeps the
// summation order deterministic.
double batch_penalty(const PolicyParams& p, const Eigen::MatrixXd& obs,
                     double eps) {
  constexpr long kChunk = 4096;
  const long n = obs.cols();
  ForwardCache cache;
  double total = 0.0;
  for (long start = 0; start < n; start += kChunk) {
    const long m = std::min(kChunk, n - start);
    forward_batch(p, obs.middleCols(start, m), cache);
    total += antiwindup_penalty(cache.mu, eps) * static_cast<double>(m);
  }
  return total / static_cast<double>(n);
}

}  // namespace

RolloutBatch collect_rollouts(const PolicyParams& p,
                              std::vector<std::unique_ptr<Env>>& envs,
                              std::vector<Rng>& action_rngs,
                              std::vector<EnvCursor>& cursors,
                              int steps_per_env,
                              std::vector<EpisodeRecord>& episodes_out) {
  const int n_envs = static_cast<int>(envs.size());
  if (n_envs == 0 || steps_per_env <= 0) {
    throw std::invalid_argument("collect_rollouts: empty rollout request");
  }
  if (action_rngs.size() != envs.size() || cursors.size() != envs.size()) {
    throw std::invalid_argument("collect_rollouts: per-env state mismatch");
  }
  const int obs_dim = envs[0]->obs_dim();
  const int act_dim = envs[0]->action_dim();

  RolloutBatch b;
  b.n_envs = n_envs;
  b.steps_per_env = steps_per_env;
  const long n = b.size();
  b.obs.resize(obs_dim, n);
  b.actions.resize(act_dim, n);
  b.log_probs.resize(n);
  b.values.resize(n);
  b.rewards.resize(n);
  b.done.assign(static_cast<std::size_t>(n), 0);
  b.bootstrap_values.resize(n_envs);

  std::vector<std::vector<EpisodeRecord>> local_eps(n_envs);
  std::vector<std::exception_ptr> errors(n_envs);

  auto work = [&](int e) {
    try {
      Env& env = *envs[e];
      Rng& rng = action_rngs[e];
      EnvCursor& cur = cursors[e];
      if (cur.needs_reset) {
        cur.obs = env.reset();
        cur.partial_return = 0.0;
        cur.partial_length = 0;
        cur.needs_reset = false;
      }
      ForwardCache cache;
      for (int t = 0; t < steps_per_env; ++t) {
        const long c = b.col(e, t);
        forward_batch(p, cur.obs, cache);
        const Eigen::VectorXd mu = cache.mu.col(0);
        const Eigen::VectorXd a = sample_gaussian(mu, p.log_std, rng);
        b.obs.col(c) = cur.obs;
        b.actions.col(c) = a;
        b.log_probs[c] = gaussian_log_prob(a, mu, p.log_std);
        b.values[c] = cache.value(0);
        const StepResult sr = env.step(a);
        b.rewards[c] = sr.reward;
        b.done[static_cast<std::size_t>(c)] = sr.terminated ? 1 : 0;
        cur.partial_return += sr.reward;
        cur.partial_length += 1;
        if (sr.terminated) {
          local_eps[e].push_back(
              {t, e, cur.partial_return, cur.partial_length, sr.cause});
          cur.obs = env.reset();
          cur.partial_return = 0.0;
          cur.partial_length = 0;
        } else {
          cur.obs = sr.observation;
        }
      }
      b.bootstrap_values[e] = value_of(p, cursors[e].obs);
    } catch (...) {
      errors[e] = std::current_exception();
    }
  };

  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(n_envs));
  for (int e = 0; e < n_envs; ++e) workers.emplace_back(work, e);
  for (auto& w : workers) w.join();
  for (int e = 0; e < n_envs; ++e) {
    if (errors[e]) std::rethrow_exception(errors[e]);
  }

  for (int e = 0; e < n_envs; ++e) {
    episodes_out.insert(episodes_out.end(), local_eps[e].begin(),
                        local_eps[e].end());
  }
  std::sort(episodes_out.begin(), episodes_out.end(),
            [](const EpisodeRecord& a, const EpisodeRecord& z) {
              return a.end_step != z.end_step ? a.end_step < z.end_step
                                              : a.env_index < z.env_index;
            });
  return b;
}

void compute_advantages(RolloutBatch& b, double gamma, double lambda) {
  const long n = b.size();
  b.advantages.resize(n);
  for (int e = 0; e < b.n_envs; ++e) {
    double acc = 0.0;
    for (int t = b.steps_per_env - 1; t >= 0; --t) {
      const long c = b.col(e, t);
      const double nonterm = b.done[static_cast<std::size_t>(c)] ? 0.0 : 1.0;
      const double next_v = (t == b.steps_per_env - 1)
                                ? b.bootstrap_values[e]
                                : b.values[b.col(e, t + 1)];
      const double delta =
          b.rewards[c] + gamma * next_v * nonterm - b.values[c];
      acc = delta + gamma * lambda * nonterm * acc;
      b.advantages[c] = acc;
    }
  }
  b.returns = b.advantages + b.values;
  const double mean = b.advantages.mean();
  const double var = (b.advantages.array() - mean).square().mean();
  b.advantages = (b.advantages.array() - mean) / (std::sqrt(var) + 1e-8);
}

double antiwindup_penalty(const Eigen::MatrixXd& mu, double eps) {
  const double margin = 1.0 - eps;
  return (mu.array().abs() - margin).max(0.0).square().sum() /
         static_cast<double>(mu.cols());
}

void add_antiwindup_grad(const Eigen::MatrixXd& mu, double eps, double scale,
                         Eigen::MatrixXd& dmu) {
  const double margin = 1.0 - eps;
  const double f = 2.0 * scale / static_cast<double>(mu.cols());
  dmu.array() += f * (mu.array().abs() - margin).max(0.0) * mu.array().sign();
}

double adapt_penalty_coefficient(double c3, double d, double d_tar) {
  if (d < d_tar / 1.5) return c3 / 2.0;
  if (d > 1.5 * d_tar) return 2.0 * c3;
  return c3;
}

PpoStats ppo_minibatch(const PolicyParams& p, const RolloutBatch& b,
                       const std::vector<long>& idx, const TrainerConfig& cfg,
                       double c3, GradBuffer* grads) {
  const long m = static_cast<long>(idx.size());
  if (m == 0) throw std::invalid_argument("ppo_minibatch: empty index set");
  const long act_dim = b.actions.rows();

  Eigen::MatrixXd obs_mb(b.obs.rows(), m);
  Eigen::MatrixXd act_mb(act_dim, m);
  Eigen::VectorXd lp_old(m), adv(m), ret(m);
  for (long i = 0; i < m; ++i) {
    const long c = idx[static_cast<std::size_t>(i)];
    obs_mb.col(i) = b.obs.col(c);
    act_mb.col(i) = b.actions.col(c);
    lp_old[i] = b.log_probs[c];
    adv[i] = b.advantages[c];
    ret[i] = b.returns[c];
  }

  ForwardCache cache;
  forward_batch(p, obs_mb, cache);

  const Eigen::ArrayXd inv_var = (-2.0 * p.log_std.array()).exp();
  const Eigen::MatrixXd diff = act_mb - cache.mu;

  // log N(a | mu, sigma) column-wise
  const double log_norm =
      p.log_std.sum() + 0.5 * static_cast<double>(act_dim) *
                            std::log(2.0 * kPi);
  const Eigen::ArrayXXd wsq = diff.array().square().colwise() * inv_var;
  const Eigen::VectorXd lp_new =
      (-0.5 * wsq.colwise().sum() - log_norm).transpose().matrix();

  const Eigen::ArrayXd ratio = (lp_new - lp_old).array().exp();
  Eigen::VectorXd dlp = Eigen::VectorXd::Zero(m);
  double surr_sum = 0.0;
  long clipped = 0;
  for (long i = 0; i < m; ++i) {
    const double r = ratio[i], a = adv[i];
    const bool clip_active = (a > 0.0 && r > 1.0 + cfg.clip_eps) ||
                             (a < 0.0 && r < 1.0 - cfg.clip_eps);
    const double rc =
        std::clamp(r, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
    surr_sum += std::min(r * a, rc * a);
    if (clip_active) {
      ++clipped;
    } else {
      dlp[i] = -r * a / static_cast<double>(m);
    }
  }

  PpoStats st;
  st.policy_loss = -surr_sum / static_cast<double>(m);
  st.value_mse = (cache.value.transpose() - ret).array().square().mean();
  st.entropy = gaussian_entropy(p.log_std);
  st.d = antiwindup_penalty(cache.mu, cfg.epsilon_aw);
  st.clip_fraction = static_cast<double>(clipped) / static_cast<double>(m);
  st.total_loss = st.policy_loss + cfg.c1 * st.value_mse -
                  cfg.c2 * st.entropy + c3 * st.d;

  if (grads != nullptr) {
    Eigen::MatrixXd dmu = ((diff.array().colwise() * inv_var).rowwise() *
                           dlp.transpose().array())
                              .matrix();
    if (c3 != 0.0) {
      add_antiwindup_grad(cache.mu, cfg.epsilon_aw, c3, dmu);
    }
    Eigen::RowVectorXd dvalue =
        (2.0 * cfg.c1 / static_cast<double>(m)) *
        (cache.value - ret.transpose());
    backward_batch(p, cache, dmu, dvalue, *grads);
    // d lp / d log_std_j = diff^2 / sigma^2 - 1, summed with the surrogate
    // adjoint; the entropy term contributes -c2 per component.
    Eigen::VectorXd dls =
        ((diff.array().square().matrix() * dlp).array() * inv_var).matrix();
    dls.array() -= dlp.sum();
    dls.array() -= cfg.c2;
    grads->log_std += dls;
  }
  return st;
}

EpisodeResult run_episode(const PolicyParams& p, Env& env, bool stochastic,
                          Rng* action_rng) {
  if (stochastic && action_rng == nullptr) {
    throw std::invalid_argument("run_episode: stochastic mode needs an RNG");
  }
  EpisodeResult r;
  Eigen::VectorXd obs = env.reset();
  while (true) {
    const Eigen::VectorXd mu = policy_mean(p, obs);
    const Eigen::VectorXd a =
        stochastic ? sample_gaussian(mu, p.log_std, *action_rng) : mu;
    const StepResult sr = env.step(a);
    r.episode_return += sr.reward;
    r.action_steps += 1;
    r.peak_heating = std::max(r.peak_heating, sr.heating_peak);
    r.saturation_steps += sr.saturation_count;
    obs = sr.observation;
    if (sr.terminated) {
      r.cause = sr.cause;
      r.elapsed_time = sr.elapsed_time;
      break;
    }
  }
  r.final_observation = obs;
  return r;
}

NetArch arch_from(const ExperimentConfig& cfg) {
  NetArch a;
  a.input_dim = 8;
  a.shared = cfg.network.shared_layers;
  a.head_hidden = cfg.network.head_hidden;
  a.action_dim = cfg.hlas.action_dim();
  return a;
}

Trainer::Trainer(const ExperimentConfig& cfg, std::uint64_t seed)
    : Trainer(
          cfg.trainer, arch_from(cfg),
          [&cfg](int) { return std::make_unique<ReentryEnv>(cfg, 1.0); },
          seed) {
  policy_.obs_scales = Eigen::Map<const Eigen::VectorXd>(
      cfg.network.obs_scales.data(),
      static_cast<long>(cfg.network.obs_scales.size()));
}

Trainer::Trainer(const TrainerConfig& cfg, const NetArch& arch,
                 const std::function<std::unique_ptr<Env>(int)>& make_env,
                 std::uint64_t seed)
    : cfg_(cfg),
      seed_(seed),
      grads_(GradBuffer::zeros(arch)),
      shuffle_rng_(mix_seed(seed, 1)) {
  cfg_.validate();
  Rng init(mix_seed(seed, 0));
  policy_ = PolicyParams::make(arch, init);
  adam_ = AdamState::zeros(policy_.param_count());
  c3_ = cfg_.c3_init;
  for (int e = 0; e < cfg_.n_envs; ++e) {
    envs_.push_back(make_env(e));
    envs_.back()->seed(mix_seed(seed, 100 + static_cast<std::uint64_t>(e)));
    action_rngs_.emplace_back(
        mix_seed(seed, 200 + static_cast<std::uint64_t>(e)));
    cursors_.emplace_back();
  }
  start_ = std::chrono::steady_clock::now();
}

IterationMetrics Trainer::train_iteration() {
  std::vector<EpisodeRecord> episodes;
  RolloutBatch b = collect_rollouts(policy_, envs_, action_rngs_, cursors_,
                                    cfg_.steps_per_env, episodes);
  for (const EpisodeRecord& rec : episodes) {
    return_window_.push_back(rec.episode_return);
    if (return_window_.size() > 100) return_window_.pop_front();
    ++episodes_finished_;
    if (rec.cause == TerminationCause::goal) ++goal_episodes_;
    if (episode_callback_) episode_callback_(rec);
  }

  compute_advantages(b, cfg_.gamma, cfg_.gae_lambda);

  const long n = b.size();
  std::vector<long> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0L);
  const double c3_eff = cfg_.antiwindup_enabled ? c3_ : 0.0;

  double clip_sum = 0.0, vloss_sum = 0.0;
  long n_updates = 0;
  std::vector<long> idx(static_cast<std::size_t>(cfg_.minibatch));
  for (int epoch = 0; epoch < cfg_.n_epochs; ++epoch) {
    shuffle_rng_.shuffle(order);
    for (long start = 0; start + cfg_.minibatch <= n;
         start += cfg_.minibatch) {
      std::copy(order.begin() + start,
                order.begin() + start + cfg_.minibatch, idx.begin());
      grads_.set_zero();
      const PpoStats st =
          ppo_minibatch(policy_, b, idx, cfg_, c3_eff, &grads_);
      clip_grad_norm(grads_, cfg_.max_grad_norm);
      adam_update(policy_, grads_, adam_, cfg_.lr);
      clip_sum += st.clip_fraction;
      vloss_sum += st.value_mse;
      ++n_updates;
    }
  }

  const double d_post = batch_penalty(policy_, b.obs, cfg_.epsilon_aw);
  if (cfg_.antiwindup_enabled) {
    c3_ = adapt_penalty_coefficient(c3_, d_post, cfg_.d_tar());
  }

  ++iteration_;
  cumulative_steps_ += n;

  IterationMetrics m;
  m.iteration = iteration_;
  m.cumulative_env_steps = cumulative_steps_;
  m.avg_return = avg_return();
  m.clip_fraction = clip_sum / static_cast<double>(n_updates);
  m.value_loss = vloss_sum / static_cast<double>(n_updates);
  m.entropy = gaussian_entropy(policy_.log_std);
  m.d = d_post;
  m.c3 = c3_eff;
  m.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
          .count();
  m.episodes_finished = episodes_finished_;
  m.goal_episodes = goal_episodes_;
  return m;
}

double Trainer::avg_return() const {
  if (return_window_.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::accumulate(return_window_.begin(), return_window_.end(), 0.0) /
         static_cast<double>(return_window_.size());
}

TrainerSnapshot Trainer::snapshot() const {
  TrainerSnapshot s;
  s.iteration = iteration_;
  s.cumulative_env_steps = cumulative_steps_;
  s.episodes_finished = episodes_finished_;
  s.goal_episodes = goal_episodes_;
  s.c3 = c3_;
  s.return_window.assign(return_window_.begin(), return_window_.end());
  return s;
}

void Trainer::restore(const TrainerSnapshot& s) {
  iteration_ = s.iteration;
  cumulative_steps_ = s.cumulative_env_steps;
  episodes_finished_ = s.episodes_finished;
  goal_episodes_ = s.goal_episodes;
  c3_ = s.c3;
  return_window_.assign(s.return_window.begin(), s.return_window.end());
}

}  // namespace hlas
