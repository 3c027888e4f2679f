#include "CLI11.hpp"
#include "hlas/cli_runs.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Trains, evaluates, and plans with deep-RL reentry policies acting "
      "through variable-duration polynomial sub-trajectories."};
  app.require_subcommand(1);

  hlas::RunOptions o;
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config_path, "experiment config JSON")
        ->required();
    cmd->add_option("--seed", o.seed, "master RNG seed (default 0)");
    cmd->add_option("--out", o.out_dir, "output directory (default .)");
    cmd->add_option("--problem", o.problem_override,
                    "override problem kind: latitude-max | debris-avoidance");
    cmd->add_option(
        "--variant", o.variant_override,
        "apply a published hyperparameter row: hlas-control | hlas-dynamics "
        "| hlas-fixed-tau | baseline");
  };

  CLI::App* train = app.add_subcommand("train", "train a policy");
  add_common(train);
  train->add_option("--budget-steps", o.budget_steps,
                    "stop once cumulative env steps reach this (0: just "
                    "write the initial checkpoint)");
  train->add_option("--checkpoint", o.checkpoint_path,
                    "resume from this checkpoint");

  CLI::App* eval = app.add_subcommand(
      "eval", "evaluate a checkpoint over randomized initial conditions");
  add_common(eval);
  eval->add_option("--checkpoint", o.checkpoint_path, "policy checkpoint")
      ->required();
  eval->add_option("--n-episodes", o.n_episodes,
                   "evaluation episodes (default 100)");
  eval->add_option("--ic-scale", o.ic_scale,
                   "initial-condition half-width multiplier (default 0.5)");

  CLI::App* plan = app.add_subcommand(
      "plan", "roll out one planned trajectory to CSV");
  add_common(plan);
  plan->add_option("--checkpoint", o.checkpoint_path, "policy checkpoint")
      ->required();
  plan->add_option("--ic-scale", o.ic_scale,
                   "sample the start state around the nominal instead of "
                   "planning from it exactly");

  CLI::App* grad = app.add_subcommand(
      "gradcheck", "finite-difference oracles for the analytic gradients");
  grad->add_option("--seed", o.seed, "oracle RNG seed (default 0)");
  grad->add_option("--fault-inject", o.fault_inject,
                   "corrupt this gradient block to exercise failure "
                   "reporting (test mode)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? hlas::kExitSuccess : hlas::kExitValidation;
  }

  o.ic_scale_set =
      eval->count("--ic-scale") > 0 || plan->count("--ic-scale") > 0;

  if (train->parsed()) return hlas::run_train(o);
  if (eval->parsed()) return hlas::run_eval(o);
  if (plan->parsed()) return hlas::run_plan(o);
  return hlas::run_gradcheck(o);
}
