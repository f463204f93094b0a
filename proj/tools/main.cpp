// weno-decmdp: solve | train | eval | verify

#include <cstdio>

#include "cli_common.hpp"
#include "decmdp/errors.hpp"
#include "decmdp/log.hpp"

using namespace decmdp;

namespace {

void add_problem_flags(CLI::App& app, cli::Invocation& inv) {
  cli::add_key(app, "--equation", "equation", inv, "euler, burgers or euler2d");
  cli::add_key(app, "--ic", "ic", inv, "initial condition; train accepts a comma list");
  cli::add_key(app, "--n,--cells", "cells", inv, "grid cells (per direction in 2D)");
  cli::add_key(app, "--dt", "dt", inv, "time step");
  cli::add_key(app, "--gamma", "gamma", inv, "ratio of specific heats");
  cli::add_key(app, "--boundary", "boundary", inv, "outflow or periodic");
  cli::add_key(app, "--eps", "weno.eps", inv, "WENO epsilon");
  cli::add_key(app, "--seed", "seed", inv, "random seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WENO flux reconstruction as a factored multi-agent problem"};
  app.require_subcommand(1);
  cli::Invocation inv;

  auto* solve = app.add_subcommand("solve", "classical WENO rollout with snapshots");
  cli::add_common_flags(*solve, inv);
  add_problem_flags(*solve, inv);
  cli::add_key(*solve, "--steps", "steps", inv, "number of steps");
  cli::add_key(*solve, "--t-final", "t_final", inv, "integrate to this time instead (last step shortened)");
  cli::add_key(*solve, "--integrator", "integrator", inv, "forward-euler or ssp-rk3");
  cli::add_key(*solve, "--snapshot-every", "snapshot_every", inv, "snapshot cadence in steps (0: first and last)");

  auto* train = app.add_subcommand("train", "train the shared policy");
  cli::add_common_flags(*train, inv);
  add_problem_flags(*train, inv);
  train->add_option("--preset", inv.preset, "desk (default) or paper");
  cli::add_key(*train, "--steps", "steps", inv, "steps per episode");
  cli::add_key(*train, "--reward", "reward", inv, "rl-weno, bc-weno, bc-analytical, or a comma list");
  cli::add_key(*train, "--seeds", "seeds", inv, "comma list of seeds, one run each");
  cli::add_key(*train, "--episodes", "episodes", inv, "episodes per run");
  cli::add_key(*train, "--lr", "lr", inv, "Adam learning rate");
  cli::add_key(*train, "--lr-final-factor", "lr_final_factor", inv, "linear learning-rate ramp to lr * factor");
  cli::add_key(*train, "--clip", "clip", inv, "gradient clip threshold (0 disables)");
  cli::add_key(*train, "--checkpoint-every", "checkpoint_every", inv, "checkpoint cadence in episodes");
  cli::add_key(*train, "--normalize", "normalize", inv, "policy input: shape, max-abs or off");
  cli::add_key(*train, "--alpha-gradient", "alpha_gradient", inv, "differentiate through the splitting speed");

  auto* eval = app.add_subcommand("eval", "compare a policy with WENO and the exact solution");
  cli::add_common_flags(*eval, inv);
  add_problem_flags(*eval, inv);
  cli::add_key(*eval, "--checkpoint", "checkpoint", inv, "policy checkpoint, or 'weno'");
  cli::add_key(*eval, "--ics", "eval.ics", inv, "comma list of initial conditions");
  cli::add_key(*eval, "--ns", "eval.ns", inv, "comma list of grid sizes");
  cli::add_key(*eval, "--t-final", "t_final", inv, "final time (default: eval.t_final.<ic>)");

  auto* ver = app.add_subcommand("verify", "run the property suite");
  cli::add_common_flags(*ver, inv);
  std::vector<std::string> only;
  std::string fault;
  ver->add_option("--only", only, "property groups to run (grad, tape, simplex, ...)");
  ver->add_option("--inject-fault", fault, "test fixture: candidate-sign flips a candidate coefficient");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kOk : cli::kConfigError;
  }
  inv.command = app.get_subcommands().front()->get_name();
  log::set_level(inv.quiet ? log::Level::quiet : inv.verbose ? log::Level::info : log::Level::warn);

  try {
    if (inv.command == "solve") return cli::cmd_solve(inv);
    if (inv.command == "train") return cli::cmd_train(inv);
    if (inv.command == "eval") return cli::cmd_eval(inv);
    return cli::cmd_verify(inv, only, fault);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return cli::kConfigError;
  } catch (const BlowUpError& e) {
    std::fprintf(stderr, "solver blow-up: %s\n", e.what());
    return cli::kBlowUp;
  } catch (const training::TrainingDiverged& e) {
    std::fprintf(stderr, "training diverged: %s\n", e.what());
    return cli::kBlowUp;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return cli::kBlowUp;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return cli::kFailure;
  }
}
