#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "rca/experiments.hpp"
#include "rca/scenario.hpp"

namespace {

struct CommonArgs {
  std::string scenario_path;
  std::string out_path;
  int seeds_override = -1;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--scenario", args.scenario_path, "scenario JSON file")->required();
  cmd->add_option("--out", args.out_path, "output CSV path")->required();
  cmd->add_option("--seeds", args.seeds_override, "override the scenario seed count");
  cmd->add_option("--threads", args.threads, "worker threads (never changes results)")
      ->check(CLI::PositiveNumber);
}

rca::Scenario load(const CommonArgs& args) {
  rca::Scenario sc = rca::load_scenario(args.scenario_path);
  if (args.seeds_override > 0) {
    sc.seeds = args.seeds_override;
    sc.validate();
  }
  return sc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RCA array simulator: mutual-coupling beamforming, placement "
               "optimization, channel estimation and trajectory planning"};
  app.require_subcommand(1);

  CommonArgs gainmap_args, compare_args, optimize_args, estimate_args, plan_args;
  int gainmap_coupler = -1;

  CLI::App* gainmap = app.add_subcommand("gainmap", "channel power gain over one coupler's region");
  add_common(gainmap, gainmap_args);
  gainmap->add_option("--coupler", gainmap_coupler, "coupler index (default from scenario)");

  CLI::App* compare = app.add_subcommand("compare", "rate vs transmit power for each scheme");
  add_common(compare, compare_args);

  CLI::App* optimize = app.add_subcommand("optimize", "coupler-position optimization trace");
  add_common(optimize, optimize_args);

  CLI::App* estimate = app.add_subcommand("estimate", "sparse channel reconstruction accuracy");
  add_common(estimate, estimate_args);

  CLI::App* plan = app.add_subcommand("plan", "collision-free coupler movement schedule");
  add_common(plan, plan_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return rca::kExitConfig;
  }

  try {
    if (gainmap->parsed()) {
      const rca::Scenario sc = load(gainmap_args);
      const int coupler = gainmap_coupler >= 0 ? gainmap_coupler : sc.gainmap.coupler_index;
      rca::cmd_gainmap(sc, coupler, gainmap_args.out_path);
    } else if (compare->parsed()) {
      rca::cmd_compare(load(compare_args), compare_args.out_path, compare_args.threads);
    } else if (optimize->parsed()) {
      rca::cmd_optimize(load(optimize_args), optimize_args.out_path);
    } else if (estimate->parsed()) {
      rca::cmd_estimate(load(estimate_args), estimate_args.out_path);
    } else if (plan->parsed()) {
      rca::cmd_plan(load(plan_args), plan_args.out_path);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return rca::exit_code_for_current_exception();
  }
  return rca::kExitSuccess;
}
