#include "hlas/runio.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace hlas {

using nlohmann::json;

std::string num_str(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  return json(v).dump();
}

namespace {

json dense_to_json(const std::string& name, const Dense& d) {
  json w = json::array();
  for (long r = 0; r < d.W.rows(); ++r) {
    for (long c = 0; c < d.W.cols(); ++c) w.push_back(d.W(r, c));
  }
  json b = json::array();
  for (long i = 0; i < d.b.size(); ++i) b.push_back(d.b[i]);
  return json{{"name", name},
              {"rows", d.W.rows()},
              {"cols", d.W.cols()},
              {"W", std::move(w)},
              {"b", std::move(b)}};
}

void dense_from_json(const json& j, const std::string& name, Dense& d) {
  if (j.at("name").get<std::string>() != name) {
    throw std::invalid_argument("checkpoint: expected layer '" + name +
                                "', found '" +
                                j.at("name").get<std::string>() + "'");
  }
  const long rows = j.at("rows").get<long>();
  const long cols = j.at("cols").get<long>();
  if (rows != d.W.rows() || cols != d.W.cols()) {
    throw std::invalid_argument("checkpoint: layer '" + name +
                                "' shape mismatch");
  }
  const auto& w = j.at("W");
  const auto& b = j.at("b");
  if (static_cast<long>(w.size()) != rows * cols ||
      static_cast<long>(b.size()) != rows) {
    throw std::invalid_argument("checkpoint: layer '" + name +
                                "' element count mismatch");
  }
  long k = 0;
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) d.W(r, c) = w[k++].get<double>();
  }
  for (long i = 0; i < rows; ++i) d.b[i] = b[i].get<double>();
}

json vec_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (long i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vec_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) {
    throw std::invalid_argument("checkpoint: '" + what + "' must be an array");
  }
  Eigen::VectorXd v(static_cast<long>(j.size()));
  for (long i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  const PolicyParams& p = c.policy;
  json layers = json::array();
  for (std::size_t i = 0; i < p.trunk.size(); ++i) {
    layers.push_back(
        dense_to_json("trunk" + std::to_string(i), p.trunk[i]));
  }
  layers.push_back(dense_to_json("policy_hidden", p.policy_hidden));
  layers.push_back(dense_to_json("policy_out", p.policy_out));
  layers.push_back(dense_to_json("value_hidden", p.value_hidden));
  layers.push_back(dense_to_json("value_out", p.value_out));

  json j{{"kind", "hlas_planner_checkpoint"},
         {"format_version", kCheckpointFormatVersion},
         {"config_digest", c.config_digest},
         {"seed", c.seed},
         {"arch",
          {{"input_dim", c.policy.arch.input_dim},
           {"shared", c.policy.arch.shared},
           {"head_hidden", c.policy.arch.head_hidden},
           {"action_dim", c.policy.arch.action_dim}}},
         {"activation", "relu"},
         {"layers", std::move(layers)},
         {"log_std", vec_to_json(c.policy.log_std)},
         {"obs_scales", vec_to_json(c.policy.obs_scales)},
         {"trainer",
          {{"iteration", c.trainer.iteration},
           {"cumulative_env_steps", c.trainer.cumulative_env_steps},
           {"episodes_finished", c.trainer.episodes_finished},
           {"goal_episodes", c.trainer.goal_episodes},
           {"c3", c.trainer.c3},
           {"return_window", c.trainer.return_window}}},
         {"adam",
          {{"m", vec_to_json(c.adam.m)},
           {"v", vec_to_json(c.adam.v)},
           {"t", c.adam.t}}}};
  if (std::isfinite(c.best_avg_return)) {
    j["best_avg_return"] = c.best_avg_return;
  }

  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("checkpoint: cannot write '" + path + "'");
  }
  out << j.dump() << "\n";
  if (!out) {
    throw std::runtime_error("checkpoint: write failed for '" + path + "'");
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("checkpoint: cannot open '" + path + "'");
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("checkpoint: parse error in '" + path +
                                "': " + e.what());
  }
  if (!j.contains("kind") ||
      j.at("kind").get<std::string>() != "hlas_planner_checkpoint") {
    throw std::invalid_argument("checkpoint: '" + path +
                                "' is not a checkpoint file");
  }
  if (j.at("format_version").get<int>() != kCheckpointFormatVersion) {
    throw std::invalid_argument("checkpoint: unsupported format version");
  }
  if (j.at("activation").get<std::string>() != "relu") {
    throw std::invalid_argument("checkpoint: unsupported activation");
  }

  Checkpoint c;
  c.config_digest = j.at("config_digest").get<std::string>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.best_avg_return = j.contains("best_avg_return")
                          ? j.at("best_avg_return").get<double>()
                          : std::numeric_limits<double>::quiet_NaN();

  NetArch arch;
  const json& ja = j.at("arch");
  arch.input_dim = ja.at("input_dim").get<int>();
  arch.shared = ja.at("shared").get<std::vector<int>>();
  arch.head_hidden = ja.at("head_hidden").get<int>();
  arch.action_dim = ja.at("action_dim").get<int>();
  arch.validate();

  Rng scratch(0);
  c.policy = PolicyParams::make(arch, scratch);
  const json& layers = j.at("layers");
  if (layers.size() != c.policy.trunk.size() + 4) {
    throw std::invalid_argument("checkpoint: layer count mismatch");
  }
  std::size_t k = 0;
  for (std::size_t i = 0; i < c.policy.trunk.size(); ++i) {
    dense_from_json(layers[k++], "trunk" + std::to_string(i),
                    c.policy.trunk[i]);
  }
  dense_from_json(layers[k++], "policy_hidden", c.policy.policy_hidden);
  dense_from_json(layers[k++], "policy_out", c.policy.policy_out);
  dense_from_json(layers[k++], "value_hidden", c.policy.value_hidden);
  dense_from_json(layers[k++], "value_out", c.policy.value_out);

  c.policy.log_std = vec_from_json(j.at("log_std"), "log_std");
  c.policy.obs_scales = vec_from_json(j.at("obs_scales"), "obs_scales");
  if (c.policy.log_std.size() != arch.action_dim ||
      c.policy.obs_scales.size() != arch.input_dim) {
    throw std::invalid_argument(
        "checkpoint: log_std/obs_scales length mismatch");
  }
  if (!c.policy.finite()) {
    throw std::runtime_error("checkpoint: non-finite parameters in '" + path +
                             "'");
  }

  const json& jt = j.at("trainer");
  c.trainer.iteration = jt.at("iteration").get<int>();
  c.trainer.cumulative_env_steps = jt.at("cumulative_env_steps").get<long>();
  c.trainer.episodes_finished = jt.at("episodes_finished").get<long>();
  c.trainer.goal_episodes = jt.at("goal_episodes").get<long>();
  c.trainer.c3 = jt.at("c3").get<double>();
  c.trainer.return_window =
      jt.at("return_window").get<std::vector<double>>();

  const json& jad = j.at("adam");
  c.adam.m = vec_from_json(jad.at("m"), "adam.m");
  c.adam.v = vec_from_json(jad.at("v"), "adam.v");
  c.adam.t = jad.at("t").get<long>();
  const long n_params = c.policy.param_count();
  if (c.adam.m.size() != n_params || c.adam.v.size() != n_params) {
    throw std::invalid_argument("checkpoint: optimizer state size mismatch");
  }
  return c;
}

TrainingLog::TrainingLog(const std::string& path,
                         const std::string& config_digest, std::uint64_t seed,
                         bool append)
    : out_(path, append ? std::ios::app : std::ios::trunc) {
  if (!out_) {
    throw std::invalid_argument("training log: cannot open '" + path + "'");
  }
  if (!append) {
    out_ << "# hlas_planner training log, config_digest=" << config_digest
         << ", seed=" << seed << "\n";
    out_ << "iteration,cumulative_env_steps,avg_return_100,clip_fraction,"
            "value_loss,entropy,d,c3,wall_clock_s\n";
  }
}

void TrainingLog::add(const IterationMetrics& m) {
  out_ << m.iteration << ',' << m.cumulative_env_steps << ','
       << num_str(m.avg_return) << ',' << num_str(m.clip_fraction) << ','
       << num_str(m.value_loss) << ',' << num_str(m.entropy) << ','
       << num_str(m.d) << ',' << num_str(m.c3) << ','
       << num_str(m.wall_clock_seconds) << '\n';
  out_.flush();
}

TrajectoryWriter::TrajectoryWriter(const std::string& path,
                                   const std::string& config_digest,
                                   std::uint64_t seed)
    : out_(path, std::ios::trunc) {
  if (!out_) {
    throw std::invalid_argument("trajectory: cannot open '" + path + "'");
  }
  out_ << "# hlas_planner trajectory, config_digest=" << config_digest
       << ", seed=" << seed << "\n";
  out_ << "t,h,v,theta,phi,gamma,psi,alpha,sigma,alpha_cmd,sigma_cmd,q,"
          "reward,action_step_index,termination_cause\n";
}

void TrajectoryWriter::add(const ReentryEnv::TraceRow& row) {
  const VehicleState& x = row.x;
  out_ << num_str(row.t) << ',' << num_str(x.h) << ',' << num_str(x.v) << ','
       << num_str(x.theta) << ',' << num_str(x.phi) << ',' << num_str(x.gamma)
       << ',' << num_str(x.psi) << ',' << num_str(x.alpha) << ','
       << num_str(x.sigma) << ',' << num_str(row.u_cmd.alpha_cmd) << ','
       << num_str(row.u_cmd.sigma_cmd) << ',' << num_str(row.q) << ','
       << num_str(row.reward) << ',' << row.action_step << ','
       << (row.cause == TerminationCause::none
               ? ""
               : termination_cause_name(row.cause))
       << '\n';
}

ReentryEnv::TraceSink TrajectoryWriter::sink() {
  return [this](const ReentryEnv::TraceRow& row) { this->add(row); };
}

}  // namespace hlas
