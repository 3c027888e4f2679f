#include "hlas/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hlas {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw std::invalid_argument(where + ": " + what);
}

const json& require(const json& j, const std::string& key,
                    const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) bad(where, "missing key '" + key + "'");
  return *it;
}

double require_finite(const json& j, const std::string& key,
                      const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number()) bad(where, "key '" + key + "' is not a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad(where, "key '" + key + "' is not finite");
  return d;
}

double opt_num(const json& j, const std::string& key, double fallback,
               const std::string& where) {
  if (!j.contains(key)) return fallback;
  return require_finite(j, key, where);
}

int opt_int(const json& j, const std::string& key, int fallback,
            const std::string& where) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) bad(where, "key '" + key + "' is not an integer");
  return v.get<int>();
}

bool opt_bool(const json& j, const std::string& key, bool fallback,
              const std::string& where) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) bad(where, "key '" + key + "' is not a boolean");
  return v.get<bool>();
}

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      bad(where, "unknown key '" + item.key() + "'");
    }
  }
}

// State-shaped blob: lengths plain, angles carried as <name>_deg.
VehicleState state_from_json(const json& j, const std::string& where) {
  reject_unknown(j,
                 {"h", "v", "theta_deg", "phi_deg", "gamma_deg", "psi_deg",
                  "alpha_deg", "sigma_deg"},
                 where);
  VehicleState x;
  x.h = require_finite(j, "h", where);
  x.v = require_finite(j, "v", where);
  x.theta = deg2rad(require_finite(j, "theta_deg", where));
  x.phi = deg2rad(require_finite(j, "phi_deg", where));
  x.gamma = deg2rad(require_finite(j, "gamma_deg", where));
  x.psi = deg2rad(require_finite(j, "psi_deg", where));
  x.alpha = deg2rad(require_finite(j, "alpha_deg", where));
  x.sigma = deg2rad(require_finite(j, "sigma_deg", where));
  return x;
}

json state_to_json(const VehicleState& x) {
  return json{{"h", x.h},
              {"v", x.v},
              {"theta_deg", rad2deg(x.theta)},
              {"phi_deg", rad2deg(x.phi)},
              {"gamma_deg", rad2deg(x.gamma)},
              {"psi_deg", rad2deg(x.psi)},
              {"alpha_deg", rad2deg(x.alpha)},
              {"sigma_deg", rad2deg(x.sigma)}};
}

// (h, v, gamma) or (h, theta, phi) triple depending on the problem kind.
std::array<double, 3> triple_from_json(const json& j, ProblemKind kind,
                                       const std::string& where) {
  if (kind == ProblemKind::latitude_max) {
    reject_unknown(j, {"h", "v", "gamma_deg"}, where);
    return {require_finite(j, "h", where), require_finite(j, "v", where),
            deg2rad(require_finite(j, "gamma_deg", where))};
  }
  reject_unknown(j, {"h", "theta_deg", "phi_deg"}, where);
  return {require_finite(j, "h", where),
          deg2rad(require_finite(j, "theta_deg", where)),
          deg2rad(require_finite(j, "phi_deg", where))};
}

json triple_to_json(const std::array<double, 3>& t, ProblemKind kind) {
  if (kind == ProblemKind::latitude_max) {
    return json{{"h", t[0]}, {"v", t[1]}, {"gamma_deg", rad2deg(t[2])}};
  }
  return json{
      {"h", t[0]}, {"theta_deg", rad2deg(t[1])}, {"phi_deg", rad2deg(t[2])}};
}

void fill_problem_defaults(ProblemSpec& p) {
  if (p.kind == ProblemKind::latitude_max) {
    p.target = {24384.0, 762.0, deg2rad(-5.0)};
    p.scales = {250.0, 8.0, deg2rad(0.1)};
    p.tolerances = {500.0, 16.0, deg2rad(0.5)};
    p.ic_nominal = {79248.0, 7802.0, 0.0, 0.0, deg2rad(-1.0), deg2rad(90.0),
                    0.0, 0.0};
    p.ic_halfwidths = {4000.0, 390.0, deg2rad(2.0), deg2rad(2.0),
                       deg2rad(2.0), deg2rad(2.0), 0.0, 0.0};
  } else {
    p.target = {24384.0, 0.0, deg2rad(50.0)};
    p.scales = {1000.0, deg2rad(1.0), deg2rad(1.0)};
    p.tolerances = {500.0, deg2rad(1.0), deg2rad(1.0)};
    // theta/phi/psi are produced by the semicircle geometry at reset;
    // the nominal entries for them are placeholders.
    p.ic_nominal = {79248.0, 7802.0, 0.0, 0.0, deg2rad(-1.0), 0.0, 0.0, 0.0};
    p.ic_halfwidths = {2000.0, 100.0, 0.0, 0.0, deg2rad(1.0), 0.0, 0.0, 0.0};
  }
}

}  // namespace

const char* problem_kind_name(ProblemKind k) {
  switch (k) {
    case ProblemKind::latitude_max: return "latitude-max";
    case ProblemKind::debris_avoidance: return "debris-avoidance";
  }
  return "?";
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::hlas_control: return "hlas-control";
    case Variant::hlas_dynamics: return "hlas-dynamics";
    case Variant::hlas_fixed_tau: return "hlas-fixed-tau";
    case Variant::baseline: return "baseline";
  }
  return "?";
}

ProblemKind parse_problem_kind(const std::string& s) {
  if (s == "latitude-max") return ProblemKind::latitude_max;
  if (s == "debris-avoidance") return ProblemKind::debris_avoidance;
  bad("problem.kind", "unknown value '" + s + "'");
}

Variant parse_variant(const std::string& s) {
  if (s == "hlas-control") return Variant::hlas_control;
  if (s == "hlas-dynamics") return Variant::hlas_dynamics;
  if (s == "hlas-fixed-tau") return Variant::hlas_fixed_tau;
  if (s == "baseline") return Variant::baseline;
  bad("variant", "unknown value '" + s + "'");
}

void ProblemSpec::validate() const {
  const std::string w = "problem";
  if (!(dt > 0.0)) bad(w, "dt must be positive");
  if (max_action_steps < 1) bad(w, "max_action_steps must be >= 1");
  if (c0 < 0.0) bad(w, "c0 must be non-negative");
  for (int i = 0; i < 3; ++i) {
    if (!(scales[i] > 0.0)) bad(w, "terminal scales must be positive");
    if (!(tolerances[i] > 0.0)) bad(w, "terminal tolerances must be positive");
  }
  for (double hw : ic_halfwidths) {
    if (hw < 0.0 || !std::isfinite(hw)) {
      bad(w, "ic halfwidths must be finite and non-negative");
    }
  }
  if (kind == ProblemKind::debris_avoidance) {
    if (!(semicircle.radius > 0.0)) bad(w, "semicircle radius must be positive");
    for (const Ellipse& e : obstacles) {
      if (!(e.a_theta > 0.0) || !(e.a_phi > 0.0)) {
        bad(w, "obstacle semi-axes must be positive");
      }
    }
  }
}

void NetworkConfig::validate() const {
  if (shared_layers.empty()) bad("network", "shared_layers must be non-empty");
  for (int wdt : shared_layers) {
    if (wdt < 1) bad("network", "layer widths must be >= 1");
  }
  if (head_hidden < 1) bad("network", "head_hidden must be >= 1");
  if (obs_scales.size() != 8) bad("network", "obs_scales must have 8 entries");
  for (double s : obs_scales) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      bad("network", "obs_scales must be positive and finite");
    }
  }
}

void TrainerConfig::validate() const {
  const std::string w = "trainer";
  if (!(gamma > 0.0) || gamma > 1.0) bad(w, "gamma must be in (0, 1]");
  if (!(lr > 0.0)) bad(w, "lr must be positive");
  if (!(clip_eps > 0.0)) bad(w, "clip_eps must be positive");
  if (!(epsilon_aw > 0.0) || epsilon_aw >= 1.0) {
    bad(w, "epsilon_aw must be in (0, 1)");
  }
  if (!(c3_init > 0.0)) bad(w, "c3_init must be positive");
  if (n_envs < 1 || steps_per_env < 1 || minibatch < 1 || n_epochs < 1) {
    bad(w, "n_envs, steps_per_env, minibatch, n_epochs must be >= 1");
  }
  if ((static_cast<long>(n_envs) * steps_per_env) % minibatch != 0) {
    bad(w, "minibatch must divide n_envs * steps_per_env");
  }
  if (gae_lambda < 0.0 || gae_lambda > 1.0) {
    bad(w, "gae_lambda must be in [0, 1]");
  }
  if (!(max_grad_norm > 0.0)) bad(w, "max_grad_norm must be positive");
}

void ExperimentConfig::validate() const {
  vehicle.validate();
  problem.validate();
  hlas.validate();
  network.validate();
  trainer.validate();
}

VehicleParams vehicle_from_json(const json& j) {
  const std::string w = "vehicle";
  reject_unknown(
      j, {"Re", "m", "S", "rho0", "H0", "mu", "a0", "a1", "b0", "b1", "b2",
          "hc0", "hc1", "hc2", "hc3", "tau_alpha", "tau_sigma", "q_max",
          "h_min", "v_min", "gamma_abs_max_deg", "alpha_cmd_max_deg",
          "sigma_cmd_max_deg", "provenance"},
      w);
  VehicleParams p;
  p.Re = require_finite(j, "Re", w);
  p.m = require_finite(j, "m", w);
  p.S = require_finite(j, "S", w);
  p.rho0 = require_finite(j, "rho0", w);
  p.H0 = require_finite(j, "H0", w);
  p.mu = require_finite(j, "mu", w);
  p.a0 = require_finite(j, "a0", w);
  p.a1 = require_finite(j, "a1", w);
  p.b0 = require_finite(j, "b0", w);
  p.b1 = require_finite(j, "b1", w);
  p.b2 = require_finite(j, "b2", w);
  p.hc0 = require_finite(j, "hc0", w);
  p.hc1 = require_finite(j, "hc1", w);
  p.hc2 = require_finite(j, "hc2", w);
  p.hc3 = require_finite(j, "hc3", w);
  p.tau_alpha = require_finite(j, "tau_alpha", w);
  p.tau_sigma = require_finite(j, "tau_sigma", w);
  p.q_max = require_finite(j, "q_max", w);
  p.h_min = require_finite(j, "h_min", w);
  p.v_min = require_finite(j, "v_min", w);
  p.gamma_abs_max = deg2rad(require_finite(j, "gamma_abs_max_deg", w));
  p.alpha_cmd_max = deg2rad(require_finite(j, "alpha_cmd_max_deg", w));
  p.sigma_cmd_max = deg2rad(require_finite(j, "sigma_cmd_max_deg", w));
  const json& prov = require(j, "provenance", w);
  if (!prov.is_string()) bad(w, "provenance must be a string");
  p.provenance = prov.get<std::string>();
  p.validate();
  return p;
}

json vehicle_to_json(const VehicleParams& p) {
  return json{{"Re", p.Re},
              {"m", p.m},
              {"S", p.S},
              {"rho0", p.rho0},
              {"H0", p.H0},
              {"mu", p.mu},
              {"a0", p.a0},
              {"a1", p.a1},
              {"b0", p.b0},
              {"b1", p.b1},
              {"b2", p.b2},
              {"hc0", p.hc0},
              {"hc1", p.hc1},
              {"hc2", p.hc2},
              {"hc3", p.hc3},
              {"tau_alpha", p.tau_alpha},
              {"tau_sigma", p.tau_sigma},
              {"q_max", p.q_max},
              {"h_min", p.h_min},
              {"v_min", p.v_min},
              {"gamma_abs_max_deg", rad2deg(p.gamma_abs_max)},
              {"alpha_cmd_max_deg", rad2deg(p.alpha_cmd_max)},
              {"sigma_cmd_max_deg", rad2deg(p.sigma_cmd_max)},
              {"provenance", p.provenance}};
}

VehicleParams load_vehicle_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("vehicle", "cannot open file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    bad("vehicle", "parse error in '" + path + "': " + e.what());
  }
  return vehicle_from_json(j);
}

ExperimentConfig ExperimentConfig::from_json(const json& j,
                                             const std::string& base_dir) {
  reject_unknown(j, {"vehicle", "problem", "hlas", "network", "trainer"},
                 "config");
  ExperimentConfig cfg;

  const json& jv = require(j, "vehicle", "config");
  if (jv.is_string()) {
    std::string path = jv.get<std::string>();
    if (!path.empty() && path.front() != '/' && !base_dir.empty()) {
      path = base_dir + "/" + path;
    }
    cfg.vehicle = load_vehicle_file(path);
  } else if (jv.is_object()) {
    cfg.vehicle = vehicle_from_json(jv);
  } else {
    bad("config", "'vehicle' must be an object or a file path");
  }

  ProblemSpec& p = cfg.problem;
  const json jp = j.contains("problem") ? j.at("problem") : json::object();
  reject_unknown(jp,
                 {"kind", "variant", "dt", "max_action_steps", "c0", "target",
                  "scales", "tolerances", "ic_nominal", "ic_halfwidths",
                  "semicircle", "obstacles"},
                 "problem");
  p.kind = jp.contains("kind")
               ? parse_problem_kind(jp.at("kind").get<std::string>())
               : ProblemKind::latitude_max;
  p.variant = jp.contains("variant")
                  ? parse_variant(jp.at("variant").get<std::string>())
                  : Variant::hlas_control;
  fill_problem_defaults(p);
  p.dt = opt_num(jp, "dt", p.dt, "problem");
  p.max_action_steps =
      opt_int(jp, "max_action_steps", p.max_action_steps, "problem");
  p.c0 = opt_num(jp, "c0", p.c0, "problem");
  if (jp.contains("target")) {
    p.target = triple_from_json(jp.at("target"), p.kind, "problem.target");
  }
  if (jp.contains("scales")) {
    p.scales = triple_from_json(jp.at("scales"), p.kind, "problem.scales");
  }
  if (jp.contains("tolerances")) {
    p.tolerances =
        triple_from_json(jp.at("tolerances"), p.kind, "problem.tolerances");
  }
  if (jp.contains("ic_nominal")) {
    p.ic_nominal = state_from_json(jp.at("ic_nominal"), "problem.ic_nominal");
  }
  if (jp.contains("ic_halfwidths")) {
    p.ic_halfwidths =
        state_from_json(jp.at("ic_halfwidths"), "problem.ic_halfwidths")
            .as_array();
  }
  if (jp.contains("semicircle")) {
    const json& js = jp.at("semicircle");
    reject_unknown(
        js, {"radius_deg", "radius_halfwidth_deg", "heading_halfwidth_deg"},
        "problem.semicircle");
    p.semicircle.radius = deg2rad(
        opt_num(js, "radius_deg", rad2deg(p.semicircle.radius), "semicircle"));
    p.semicircle.radius_halfwidth = deg2rad(
        opt_num(js, "radius_halfwidth_deg",
                rad2deg(p.semicircle.radius_halfwidth), "semicircle"));
    p.semicircle.heading_halfwidth = deg2rad(
        opt_num(js, "heading_halfwidth_deg",
                rad2deg(p.semicircle.heading_halfwidth), "semicircle"));
  }
  if (jp.contains("obstacles")) {
    const json& jo = jp.at("obstacles");
    if (!jo.is_array()) bad("problem", "'obstacles' must be an array");
    for (const json& je : jo) {
      reject_unknown(je, {"theta_deg", "phi_deg", "a_theta_deg", "a_phi_deg"},
                     "problem.obstacles[]");
      Ellipse e;
      e.theta_c = deg2rad(require_finite(je, "theta_deg", "obstacle"));
      e.phi_c = deg2rad(require_finite(je, "phi_deg", "obstacle"));
      e.a_theta = deg2rad(require_finite(je, "a_theta_deg", "obstacle"));
      e.a_phi = deg2rad(require_finite(je, "a_phi_deg", "obstacle"));
      p.obstacles.push_back(e);
    }
  }

  HlasConfig& hc = cfg.hlas;
  const json jh = j.contains("hlas") ? j.at("hlas") : json::object();
  reject_unknown(jh,
                 {"degree", "n_channels", "tau_min", "tau_max", "z_min_deg",
                  "z_max_deg", "continuity"},
                 "hlas");
  hc.degree = opt_int(jh, "degree", hc.degree, "hlas");
  hc.n_channels = opt_int(jh, "n_channels", hc.n_channels, "hlas");
  hc.tau_min = opt_num(jh, "tau_min", hc.tau_min, "hlas");
  hc.tau_max = opt_num(jh, "tau_max", hc.tau_max, "hlas");
  hc.continuity = opt_bool(jh, "continuity", hc.continuity, "hlas");
  // Per-channel node bounds.  Degrees for control channels, deg/s for
  // desired-dynamics channels; the conversion factor is the same.
  auto read_bounds = [&](const char* key,
                         std::vector<double>& out) {
    if (!jh.contains(key)) return;
    const json& ja = jh.at(key);
    if (!ja.is_array()) bad("hlas", std::string(key) + " must be an array");
    out.clear();
    for (const json& vj : ja) {
      if (!vj.is_number() || !std::isfinite(vj.get<double>())) {
        bad("hlas", std::string(key) + " entries must be finite numbers");
      }
      out.push_back(deg2rad(vj.get<double>()));
    }
  };
  read_bounds("z_min_deg", hc.z_min);
  read_bounds("z_max_deg", hc.z_max);
  if (hc.z_min.empty() && hc.z_max.empty()) {
    // default to the control-input channels at the command limits
    hc.z_min = {-cfg.vehicle.alpha_cmd_max, -cfg.vehicle.sigma_cmd_max};
    hc.z_max = {cfg.vehicle.alpha_cmd_max, cfg.vehicle.sigma_cmd_max};
  }

  NetworkConfig& nc = cfg.network;
  const json jn = j.contains("network") ? j.at("network") : json::object();
  reject_unknown(jn, {"shared_layers", "head_hidden", "obs_scales"},
                 "network");
  if (jn.contains("shared_layers")) {
    nc.shared_layers = jn.at("shared_layers").get<std::vector<int>>();
  }
  nc.head_hidden = opt_int(jn, "head_hidden", nc.head_hidden, "network");
  if (jn.contains("obs_scales")) {
    nc.obs_scales = jn.at("obs_scales").get<std::vector<double>>();
  }

  TrainerConfig& tc = cfg.trainer;
  const json jt = j.contains("trainer") ? j.at("trainer") : json::object();
  reject_unknown(jt,
                 {"gamma", "lr", "clip_eps", "c1", "c2", "c3_init",
                  "epsilon_aw", "n_envs", "steps_per_env", "minibatch",
                  "n_epochs", "gae_lambda", "antiwindup_enabled",
                  "max_grad_norm"},
                 "trainer");
  tc.gamma = opt_num(jt, "gamma", tc.gamma, "trainer");
  tc.lr = opt_num(jt, "lr", tc.lr, "trainer");
  tc.clip_eps = opt_num(jt, "clip_eps", tc.clip_eps, "trainer");
  tc.c1 = opt_num(jt, "c1", tc.c1, "trainer");
  tc.c2 = opt_num(jt, "c2", tc.c2, "trainer");
  tc.c3_init = opt_num(jt, "c3_init", tc.c3_init, "trainer");
  tc.epsilon_aw = opt_num(jt, "epsilon_aw", tc.epsilon_aw, "trainer");
  tc.n_envs = opt_int(jt, "n_envs", tc.n_envs, "trainer");
  tc.steps_per_env = opt_int(jt, "steps_per_env", tc.steps_per_env, "trainer");
  tc.minibatch = opt_int(jt, "minibatch", tc.minibatch, "trainer");
  tc.n_epochs = opt_int(jt, "n_epochs", tc.n_epochs, "trainer");
  tc.gae_lambda = opt_num(jt, "gae_lambda", tc.gae_lambda, "trainer");
  tc.antiwindup_enabled =
      opt_bool(jt, "antiwindup_enabled", tc.antiwindup_enabled, "trainer");
  tc.max_grad_norm = opt_num(jt, "max_grad_norm", tc.max_grad_norm, "trainer");

  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("config", "cannot open file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    bad("config", "parse error in '" + path + "': " + e.what());
  }
  std::string base_dir = ".";
  const auto slash = path.find_last_of('/');
  if (slash != std::string::npos) base_dir = path.substr(0, slash);
  return from_json(j, base_dir);
}

json ExperimentConfig::to_json() const {
  json jp{{"kind", problem_kind_name(problem.kind)},
          {"variant", variant_name(problem.variant)},
          {"dt", problem.dt},
          {"max_action_steps", problem.max_action_steps},
          {"c0", problem.c0},
          {"target", triple_to_json(problem.target, problem.kind)},
          {"scales", triple_to_json(problem.scales, problem.kind)},
          {"tolerances", triple_to_json(problem.tolerances, problem.kind)},
          {"ic_nominal", state_to_json(problem.ic_nominal)},
          {"ic_halfwidths",
           state_to_json(VehicleState::from_array(problem.ic_halfwidths))}};
  if (problem.kind == ProblemKind::debris_avoidance) {
    jp["semicircle"] =
        json{{"radius_deg", rad2deg(problem.semicircle.radius)},
             {"radius_halfwidth_deg",
              rad2deg(problem.semicircle.radius_halfwidth)},
             {"heading_halfwidth_deg",
              rad2deg(problem.semicircle.heading_halfwidth)}};
    json jo = json::array();
    for (const Ellipse& e : problem.obstacles) {
      jo.push_back(json{{"theta_deg", rad2deg(e.theta_c)},
                        {"phi_deg", rad2deg(e.phi_c)},
                        {"a_theta_deg", rad2deg(e.a_theta)},
                        {"a_phi_deg", rad2deg(e.a_phi)}});
    }
    jp["obstacles"] = jo;
  }

  json jz_min = json::array(), jz_max = json::array();
  for (double z : hlas.z_min) jz_min.push_back(rad2deg(z));
  for (double z : hlas.z_max) jz_max.push_back(rad2deg(z));

  return json{
      {"vehicle", vehicle_to_json(vehicle)},
      {"problem", jp},
      {"hlas",
       {{"degree", hlas.degree},
        {"n_channels", hlas.n_channels},
        {"tau_min", hlas.tau_min},
        {"tau_max", hlas.tau_max},
        {"z_min_deg", jz_min},
        {"z_max_deg", jz_max},
        {"continuity", hlas.continuity}}},
      {"network",
       {{"shared_layers", network.shared_layers},
        {"head_hidden", network.head_hidden},
        {"obs_scales", network.obs_scales}}},
      {"trainer",
       {{"gamma", trainer.gamma},
        {"lr", trainer.lr},
        {"clip_eps", trainer.clip_eps},
        {"c1", trainer.c1},
        {"c2", trainer.c2},
        {"c3_init", trainer.c3_init},
        {"epsilon_aw", trainer.epsilon_aw},
        {"n_envs", trainer.n_envs},
        {"steps_per_env", trainer.steps_per_env},
        {"minibatch", trainer.minibatch},
        {"n_epochs", trainer.n_epochs},
        {"gae_lambda", trainer.gae_lambda},
        {"antiwindup_enabled", trainer.antiwindup_enabled},
        {"max_grad_norm", trainer.max_grad_norm}}}};
}

std::string ExperimentConfig::digest() const {
  return hex64(fnv1a64(to_json().dump()));
}

void apply_variant_preset(ExperimentConfig& cfg, Variant v) {
  cfg.problem.variant = v;
  TrainerConfig& t = cfg.trainer;
  HlasConfig& h = cfg.hlas;
  h.n_channels = 2;
  const double rate_lim = deg2rad(0.5);  // desired-dynamics node bound [rad/s]
  switch (v) {
    case Variant::hlas_control:
      h.degree = 1;
      h.tau_min = 2.0;
      h.tau_max = 30.0;
      h.z_min = {-cfg.vehicle.alpha_cmd_max, -cfg.vehicle.sigma_cmd_max};
      h.z_max = {cfg.vehicle.alpha_cmd_max, cfg.vehicle.sigma_cmd_max};
      t.c1 = 0.5;
      t.c2 = 0.0;
      t.antiwindup_enabled = true;
      t.steps_per_env = 4096;
      t.minibatch = 128;
      break;
    case Variant::hlas_dynamics:
      h.degree = 1;
      h.tau_min = 2.0;
      h.tau_max = 30.0;
      h.z_min = {-rate_lim, -rate_lim};
      h.z_max = {rate_lim, rate_lim};
      t.c1 = 0.5;
      t.c2 = 0.0;
      t.antiwindup_enabled = true;
      t.steps_per_env = 4096;
      t.minibatch = 128;
      break;
    case Variant::hlas_fixed_tau:
      h.degree = 1;
      h.tau_min = 4.0;
      h.tau_max = 4.0;
      h.z_min = {-rate_lim, -rate_lim};
      h.z_max = {rate_lim, rate_lim};
      t.c1 = 0.5;
      t.c2 = 0.001;
      t.antiwindup_enabled = true;
      t.steps_per_env = 4096;
      t.minibatch = 128;
      break;
    case Variant::baseline:
      h.degree = 0;
      h.tau_min = cfg.problem.dt;
      h.tau_max = cfg.problem.dt;
      h.z_min = {-cfg.vehicle.alpha_cmd_max, -cfg.vehicle.sigma_cmd_max};
      h.z_max = {cfg.vehicle.alpha_cmd_max, cfg.vehicle.sigma_cmd_max};
      t.c1 = 100.0;
      t.c2 = 0.001;
      t.antiwindup_enabled = false;
      t.steps_per_env = 8192;
      t.minibatch = 256;
      break;
  }
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace hlas
