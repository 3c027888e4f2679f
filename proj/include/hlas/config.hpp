#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hlas/segment.hpp"
#include "hlas/vehicle.hpp"
#include "json.hpp"

namespace hlas {

enum class ProblemKind { latitude_max, debris_avoidance };
enum class Variant { hlas_control, hlas_dynamics, hlas_fixed_tau, baseline };

const char* problem_kind_name(ProblemKind k);
const char* variant_name(Variant v);
ProblemKind parse_problem_kind(const std::string& s);
Variant parse_variant(const std::string& s);

// Axis-aligned ellipse in the longitude-latitude plane.  Boundary counts
// as a hit.
struct Ellipse {
  double theta_c = 0.0;  // center longitude [rad]
  double phi_c = 0.0;    // center latitude [rad]
  double a_theta = 0.0;  // semi-axis [rad]
  double a_phi = 0.0;    // semi-axis [rad]
};

// Initial-condition geometry for the debris problem: start on a semicircle
// around the target in the theta-phi plane, heading toward the target.
struct SemicircleIc {
  double radius = deg2rad(50.0);            // [rad]
  double radius_halfwidth = deg2rad(5.0);   // [rad]
  double heading_halfwidth = deg2rad(5.0);  // [rad]
};

struct ProblemSpec {
  ProblemKind kind = ProblemKind::latitude_max;
  Variant variant = Variant::hlas_control;
  double dt = 2.0;           // integrator step [s]
  int max_action_steps = 500;
  double c0 = 5.0;           // terminal reward weight

  // Terminal components: (h, v, gamma) for latitude-max,
  // (h, theta, phi) for debris-avoidance.  SI / radians.
  std::array<double, 3> target{};
  std::array<double, 3> scales{};
  std::array<double, 3> tolerances{};

  VehicleState ic_nominal;
  std::array<double, 8> ic_halfwidths{};  // uniform +/- limits, SI / radians

  SemicircleIc semicircle;        // debris-avoidance only
  std::vector<Ellipse> obstacles; // debris-avoidance only

  void validate() const;
};

struct NetworkConfig {
  std::vector<int> shared_layers{256, 256};
  int head_hidden = 128;
  // per-component observation normalization (obs = state / scale)
  std::vector<double> obs_scales{1e5, 1e4, 1.0, 1.0, 0.35, kPi, 0.8, 1.6};

  void validate() const;
};

struct TrainerConfig {
  double gamma = 0.9999;
  double lr = 5e-5;
  double clip_eps = 0.2;
  double c1 = 0.5;          // value coefficient
  double c2 = 0.0;          // entropy coefficient
  double c3_init = 1.0;     // anti-windup coefficient, then adapted
  double epsilon_aw = 0.1;  // anti-windup margin
  int n_envs = 6;
  int steps_per_env = 4096;
  int minibatch = 128;
  int n_epochs = 10;
  double gae_lambda = 0.95;
  bool antiwindup_enabled = true;
  double max_grad_norm = 0.5;

  double d_tar() const { return epsilon_aw * epsilon_aw; }
  void validate() const;
};

// One experiment = vehicle constants + problem + action space + network +
// trainer.  Everything the run depends on lives here; artifacts carry the
// digest of the canonical serialized form.
struct ExperimentConfig {
  VehicleParams vehicle;
  ProblemSpec problem;
  HlasConfig hlas;
  NetworkConfig network;
  TrainerConfig trainer;

  void validate() const;
  nlohmann::json to_json() const;  // canonical: vehicle inlined, sorted keys
  std::string digest() const;      // fnv1a-64 hex of the canonical dump

  // The "vehicle" section may be an inline object or a path string relative
  // to base_dir.
  static ExperimentConfig from_json(const nlohmann::json& j,
                                    const std::string& base_dir);
  static ExperimentConfig load(const std::string& path);
};

// Vehicle config document: every VehicleParams field (SI, limit angles in
// degrees with a _deg suffix) plus a free-text provenance line.  Loader
// rejects missing keys and non-finite values.
VehicleParams vehicle_from_json(const nlohmann::json& j);
nlohmann::json vehicle_to_json(const VehicleParams& p);
VehicleParams load_vehicle_file(const std::string& path);

// Hyperparameter presets for the published training variants.  Overwrites
// the variant-specific trainer and action-space fields; everything else in
// cfg is left alone.
void apply_variant_preset(ExperimentConfig& cfg, Variant v);

std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

}  // namespace hlas
