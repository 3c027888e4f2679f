#pragma once

#include <cstdint>
#include <string>

namespace hlas {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumeric = 2;
inline constexpr int kExitOracle = 3;

// Parsed command line, shared by all subcommands; unused fields keep their
// defaults.  ic_scale carries a "was it given" flag because eval and plan
// want different defaults (0.5 vs nominal).
struct RunOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string checkpoint_path;
  int n_episodes = 100;
  double ic_scale = 0.5;
  bool ic_scale_set = false;
  long budget_steps = 0;
  std::string problem_override;  // empty: keep the config's problem kind
  std::string variant_override;  // empty: keep the config's variant row
  std::string fault_inject;      // gradcheck only: corrupt this grad block
};

// Each returns a process exit code (0 success, 1 validation error,
// 2 numeric failure, 3 oracle failure) and reports errors on stderr.
int run_train(const RunOptions& o);
int run_eval(const RunOptions& o);
int run_plan(const RunOptions& o);
int run_gradcheck(const RunOptions& o);

}  // namespace hlas
