#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "hlas/config.hpp"
#include "hlas/env.hpp"
#include "hlas/runio.hpp"

using namespace hlas;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

fs::path temp_dir() {
  static int counter = 0;
  fs::path d = fs::temp_directory_path() /
               ("hlas_io_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
  fs::create_directories(d);
  return d;
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  return j;
}

}  // namespace

TEST_CASE("all shipped configs load and validate") {
  const char* names[] = {
      "problem1_hlas_control.json", "problem1_hlas_dynamics.json",
      "problem1_fixed_tau.json",    "problem1_baseline.json",
      "problem2_debris.json",
  };
  for (const char* n : names) {
    const ExperimentConfig cfg =
        ExperimentConfig::load(std::string(HLAS_SOURCE_DIR "/configs/") + n);
    CHECK(cfg.vehicle.Re > 6e6);
    CHECK(cfg.problem.dt == 2.0);
    CHECK(cfg.digest().size() == 16);
  }
}

TEST_CASE("variant rows carry their published hyperparameters") {
  const ExperimentConfig control = ExperimentConfig::load(
      HLAS_SOURCE_DIR "/configs/problem1_hlas_control.json");
  CHECK(control.problem.variant == Variant::hlas_control);
  CHECK(control.hlas.degree == 1);
  CHECK(control.hlas.tau_min == 2.0);
  CHECK(control.hlas.tau_max == 30.0);
  CHECK(control.trainer.c1 == 0.5);
  CHECK(control.trainer.c2 == 0.0);
  CHECK(control.trainer.gamma == 0.9999);
  CHECK(control.trainer.lr == 5e-5);
  CHECK(control.trainer.n_envs == 6);
  CHECK(control.trainer.steps_per_env == 4096);
  CHECK(control.trainer.minibatch == 128);
  CHECK(control.trainer.antiwindup_enabled);
  CHECK(control.trainer.epsilon_aw == 0.1);

  const ExperimentConfig dynamics = ExperimentConfig::load(
      HLAS_SOURCE_DIR "/configs/problem1_hlas_dynamics.json");
  CHECK(dynamics.problem.variant == Variant::hlas_dynamics);
  CHECK(dynamics.hlas.z_max.back() == doctest::Approx(deg2rad(0.5)));

  const ExperimentConfig fixed = ExperimentConfig::load(
      HLAS_SOURCE_DIR "/configs/problem1_fixed_tau.json");
  CHECK(fixed.problem.variant == Variant::hlas_fixed_tau);
  CHECK(fixed.hlas.tau_min == 4.0);
  CHECK(fixed.hlas.tau_max == 4.0);
  CHECK(fixed.trainer.c2 == 0.001);

  const ExperimentConfig base = ExperimentConfig::load(
      HLAS_SOURCE_DIR "/configs/problem1_baseline.json");
  CHECK(base.problem.variant == Variant::baseline);
  CHECK(base.hlas.degree == 0);
  CHECK(base.hlas.tau_min == 2.0);
  CHECK(base.hlas.tau_max == 2.0);
  CHECK(base.trainer.c1 == 100.0);
  CHECK_FALSE(base.trainer.antiwindup_enabled);
  CHECK(base.trainer.steps_per_env == 8192);
  CHECK(base.trainer.minibatch == 256);
}

TEST_CASE("preset application rewrites only the variant row") {
  ExperimentConfig cfg = ExperimentConfig::load(
      HLAS_SOURCE_DIR "/configs/problem1_hlas_control.json");
  const double c0_before = cfg.problem.c0;
  apply_variant_preset(cfg, Variant::baseline);
  CHECK(cfg.problem.variant == Variant::baseline);
  CHECK(cfg.hlas.degree == 0);
  CHECK(cfg.trainer.c1 == 100.0);
  CHECK(cfg.trainer.steps_per_env == 8192);
  CHECK(cfg.problem.c0 == c0_before);
  CHECK(cfg.vehicle.Re > 6e6);
  cfg.validate();
}

TEST_CASE("unknown or malformed keys are rejected") {
  nlohmann::json j =
      load_json(HLAS_SOURCE_DIR "/configs/problem1_hlas_control.json");
  const std::string base = HLAS_SOURCE_DIR "/configs";

  nlohmann::json bad = j;
  bad["problem"]["bogus_knob"] = 1;
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad, base),
                  std::invalid_argument);

  bad = j;
  bad["typo_section"] = nlohmann::json::object();
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad, base),
                  std::invalid_argument);

  bad = j;
  bad["trainer"]["lr"] = -1.0;
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad, base),
                  std::invalid_argument);

  bad = j;
  bad["problem"]["dt"] = 0.0;
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad, base),
                  std::invalid_argument);

  bad = j;
  bad["vehicle"] = "no_such_file.json";
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad, base),
                  std::invalid_argument);
}

TEST_CASE("vehicle file round-trips through its json form") {
  const VehicleParams p =
      load_vehicle_file(HLAS_SOURCE_DIR "/configs/vehicle_shuttle.json");
  CHECK(p.provenance.find("Betts") != std::string::npos);

  const nlohmann::json j = vehicle_to_json(p);
  const VehicleParams q = vehicle_from_json(j);
  CHECK(q.Re == p.Re);
  CHECK(q.m == p.m);
  CHECK(q.mu == p.mu);
  CHECK(q.hc3 == p.hc3);
  CHECK(q.sigma_cmd_max == p.sigma_cmd_max);
  CHECK(q.provenance == p.provenance);

  nlohmann::json missing = j;
  missing.erase("mu");
  CHECK_THROWS_AS(vehicle_from_json(missing), std::invalid_argument);

  nlohmann::json negative = j;
  negative["m"] = -1.0;
  CHECK_THROWS_AS(vehicle_from_json(negative), std::invalid_argument);
}

TEST_CASE("config digest tracks content, not formatting") {
  const std::string path =
      HLAS_SOURCE_DIR "/configs/problem1_hlas_control.json";
  const ExperimentConfig a = ExperimentConfig::load(path);
  const ExperimentConfig b = ExperimentConfig::load(path);
  CHECK(a.digest() == b.digest());

  // canonical form inlines the vehicle, so digest survives a dump/reload
  const ExperimentConfig c =
      ExperimentConfig::from_json(a.to_json(), "/nonexistent");
  CHECK(c.digest() == a.digest());

  ExperimentConfig d = a;
  d.problem.c0 = 5.000001;
  CHECK(d.digest() != a.digest());

  ExperimentConfig e = a;
  e.trainer.lr = 1e-4;
  CHECK(e.digest() != a.digest());
}

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
  CHECK(hex64(0xcbf29ce484222325ull) == "cbf29ce484222325");
  CHECK(hex64(0) == "0000000000000000");
  CHECK(hex64(15) == "000000000000000f");
}

TEST_CASE("num_str round-trips doubles exactly") {
  const double cases[] = {0.0,
                          1.0 / 3.0,
                          0.1,
                          -2.5e-308,
                          5e-324,
                          1.7976931348623157e308,
                          123456789.123456789,
                          -0.0};
  for (double v : cases) {
    const std::string s = num_str(v);
    const double back = std::strtod(s.c_str(), nullptr);
    CHECK(back == v);
    CHECK(std::signbit(back) == std::signbit(v));
  }
  CHECK(num_str(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(num_str(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(num_str(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("checkpoint: load restores every bit, save is byte-stable") {
  const fs::path dir = temp_dir();
  NetArch arch{3, {5, 4}, 6, 2};
  Rng rng(77);

  Checkpoint c;
  c.config_digest = "deadbeefdeadbeef";
  c.seed = 31337;
  c.best_avg_return = 17.25;
  c.policy = PolicyParams::make(arch, rng);
  // stir in irrational-looking values so shortest-form printing is exercised
  for (auto& blk : param_blocks(c.policy)) {
    for (long i = 0; i < blk.size; ++i) blk.data[i] += 1e-3 * rng.normal();
  }
  c.policy.log_std << -0.123456789, 1.5;
  c.trainer.iteration = 12;
  c.trainer.cumulative_env_steps = 98304;
  c.trainer.episodes_finished = 40;
  c.trainer.goal_episodes = 7;
  c.trainer.c3 = 0.25;
  c.trainer.return_window = {1.0, 2.5, std::exp(1.0)};
  const long n = c.policy.param_count();
  c.adam = AdamState::zeros(n);
  for (long i = 0; i < n; ++i) {
    c.adam.m[i] = rng.normal();
    c.adam.v[i] = std::fabs(rng.normal());
  }
  c.adam.t = 120;

  const fs::path p1 = dir / "ck.json";
  save_checkpoint(p1.string(), c);
  Checkpoint back = load_checkpoint(p1.string());

  CHECK(back.config_digest == c.config_digest);
  CHECK(back.seed == c.seed);
  CHECK(back.best_avg_return == c.best_avg_return);
  CHECK(back.policy.arch == arch);
  auto ba = param_blocks(back.policy);
  auto oa = param_blocks(c.policy);
  REQUIRE(ba.size() == oa.size());
  for (std::size_t k = 0; k < ba.size(); ++k) {
    REQUIRE(ba[k].size == oa[k].size);
    for (long i = 0; i < ba[k].size; ++i) {
      CHECK(ba[k].data[i] == oa[k].data[i]);
    }
  }
  CHECK(back.trainer.iteration == 12);
  CHECK(back.trainer.return_window == c.trainer.return_window);
  CHECK((back.adam.m - c.adam.m).norm() == 0.0);
  CHECK((back.adam.v - c.adam.v).norm() == 0.0);
  CHECK(back.adam.t == 120);

  const fs::path p2 = dir / "ck2.json";
  save_checkpoint(p2.string(), back);
  CHECK(slurp(p1) == slurp(p2));

  // NaN best return is representable (fresh run, no finished average yet)
  c.best_avg_return = std::numeric_limits<double>::quiet_NaN();
  const fs::path p3 = dir / "ck3.json";
  save_checkpoint(p3.string(), c);
  CHECK(std::isnan(load_checkpoint(p3.string()).best_avg_return));

  fs::remove_all(dir);
}

TEST_CASE("checkpoint loader rejects foreign or mangled files") {
  const fs::path dir = temp_dir();
  const fs::path ok = dir / "ok.json";
  NetArch arch{2, {3}, 2, 1};
  Rng rng(5);
  Checkpoint c;
  c.policy = PolicyParams::make(arch, rng);
  c.adam = AdamState::zeros(c.policy.param_count());
  save_checkpoint(ok.string(), c);

  CHECK_THROWS_AS(load_checkpoint((dir / "missing.json").string()),
                  std::invalid_argument);

  const fs::path garbage = dir / "garbage.json";
  std::ofstream(garbage) << "{\"kind\": \"something_else\"}\n";
  CHECK_THROWS_AS(load_checkpoint(garbage.string()), std::invalid_argument);

  nlohmann::json j = load_json(ok.string());
  j["format_version"] = 999;
  const fs::path wrong = dir / "wrong_version.json";
  std::ofstream(wrong) << j.dump() << "\n";
  CHECK_THROWS_AS(load_checkpoint(wrong.string()), std::invalid_argument);

  j = load_json(ok.string());
  j["layers"][0]["W"][0] = "oops";
  const fs::path mangled = dir / "mangled.json";
  std::ofstream(mangled) << j.dump() << "\n";
  CHECK_THROWS(load_checkpoint(mangled.string()));

  fs::remove_all(dir);
}

TEST_CASE("training log format and append mode") {
  const fs::path dir = temp_dir();
  const fs::path logp = dir / "train_log.csv";

  IterationMetrics m;
  m.iteration = 1;
  m.cumulative_env_steps = 24576;
  m.avg_return = std::numeric_limits<double>::quiet_NaN();
  m.clip_fraction = 0.125;
  m.value_loss = 3.5;
  m.entropy = 7.0;
  m.d = 0.0;
  m.c3 = 1.0;
  m.wall_clock_seconds = 2.5;

  {
    TrainingLog log(logp.string(), "0123456789abcdef", 42, false);
    log.add(m);
    m.iteration = 2;
    m.cumulative_env_steps = 49152;
    m.avg_return = 4.75;
    log.add(m);
  }
  {
    TrainingLog log(logp.string(), "0123456789abcdef", 42, true);
    m.iteration = 3;
    log.add(m);
  }

  const auto ls = lines_of(slurp(logp));
  REQUIRE(ls.size() == 5);  // header, columns, three rows
  CHECK(ls[0] ==
        "# hlas_planner training log, config_digest=0123456789abcdef, "
        "seed=42");
  CHECK(ls[1].rfind("iteration,cumulative_env_steps,avg_return_100", 0) == 0);
  CHECK(ls[2].rfind("1,24576,nan,0.125,3.5,7.0,0.0,1.0,", 0) == 0);
  CHECK(ls[3].rfind("2,49152,4.75,", 0) == 0);
  CHECK(ls[4].rfind("3,49152,4.75,", 0) == 0);

  fs::remove_all(dir);
}

TEST_CASE("trajectory rows advance by dt and name the final cause") {
  const fs::path dir = temp_dir();
  const fs::path csv = dir / "episode_000.csv";

  ExperimentConfig cfg = ExperimentConfig::load(
      HLAS_SOURCE_DIR "/configs/problem1_hlas_control.json");
  cfg.problem.max_action_steps = 3;
  ReentryEnv env(cfg, 0.0);
  env.seed(9);
  {
    TrajectoryWriter w(csv.string(), cfg.digest(), 9);
    env.set_trace_sink(w.sink());
    env.reset();
    Eigen::VectorXd raw(cfg.hlas.action_dim());
    // shortest duration: 6 s of flight stays clear of the heating limit
    raw << -1.0, 0.2, 0.2, 0.1, 0.1;
    while (!env.done()) env.step(raw);
  }

  const auto ls = lines_of(slurp(csv));
  REQUIRE(ls.size() > 4);
  CHECK(ls[0].rfind("# hlas_planner trajectory, config_digest=", 0) == 0);
  CHECK(ls[1] ==
        "t,h,v,theta,phi,gamma,psi,alpha,sigma,alpha_cmd,sigma_cmd,q,"
        "reward,action_step_index,termination_cause");

  // split keeping trailing empty cells, which std::getline would drop
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = s.find(',', start);
      if (comma == std::string::npos) {
        cells.push_back(s.substr(start));
        return cells;
      }
      cells.push_back(s.substr(start, comma - start));
      start = comma + 1;
    }
  };

  double prev_t = -1.0;
  for (std::size_t i = 2; i < ls.size(); ++i) {
    const auto cells = split(ls[i]);
    REQUIRE(cells.size() == 15);
    const double t = std::strtod(cells[0].c_str(), nullptr);
    if (i == 2) {
      CHECK(t == 0.0);
    } else {
      CHECK(t == doctest::Approx(prev_t + cfg.problem.dt).epsilon(1e-12));
    }
    prev_t = t;

    if (i + 1 < ls.size()) {
      CHECK(cells.back().empty());  // cause blank until the episode ends
    } else {
      CHECK(cells.back() == "timeout");
    }
  }

  fs::remove_all(dir);
}
