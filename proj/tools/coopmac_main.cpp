// coopmac: capacity regions for multiple-access channels with cooperating
// transmitters. Subcommands compute constraint sets, frontiers, discrete
// oracles and coding simulations from a JSON configuration.
//
// Exit codes: 0 ok, 2 config/schema violation, 3 capability limit,
// 4 numerical validation failure.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coopmac/commands.hpp"
#include "coopmac/errors.hpp"
#include "coopmac/reproduce.hpp"
#include "coopmac/version.hpp"

namespace {

void print_files(const std::vector<std::string>& files) {
  for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capacity regions for cooperative multiple-access channels"};
  app.set_version_flag("--version", std::string(coopmac::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string figure;
  std::string out_prefix = "reproduce";
  std::size_t mc_samples = 1000000;
  int rho_points = 21;

  auto add_config_options = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "JSON configuration file")->required();
    cmd->add_option("--set", overrides,
                    "override a config value, e.g. --set /engine/samples=100000");
  };

  CLI::App* region = app.add_subcommand("region", "common-message region for one policy");
  add_config_options(region);
  CLI::App* conf_region =
      app.add_subcommand("conf-region", "two-user conferencing region for one policy");
  add_config_options(conf_region);
  CLI::App* discrete =
      app.add_subcommand("discrete", "exact discrete region / brute-force frontier");
  add_config_options(discrete);
  CLI::App* frontier_cmd =
      app.add_subcommand("frontier", "weighted-sum frontier over a policy grid");
  add_config_options(frontier_cmd);
  CLI::App* equiv = app.add_subcommand("equiv-check", "parameterization equivalence suite");
  add_config_options(equiv);
  CLI::App* simulate = app.add_subcommand("simulate", "random-coding error simulation");
  add_config_options(simulate);

  CLI::App* reproduce = app.add_subcommand("reproduce", "figure reproduction data");
  reproduce->add_option("figure", figure, "fig3 | fig4 | fig5")->required();
  reproduce->add_option("--out", out_prefix, "output path prefix");
  reproduce->add_option("--mc-samples", mc_samples, "Monte Carlo sample count");
  reproduce->add_option("--rho-points", rho_points, "correlation grid resolution");

  CLI11_PARSE(app, argc, argv);

  try {
    if (reproduce->parsed()) {
      coopmac::ReproduceOptions opts;
      opts.out_prefix = out_prefix;
      opts.mc_samples = mc_samples;
      opts.rho_points = rho_points;
      const auto result = coopmac::run_reproduce(figure, opts);
      print_files(result.files);
      return 0;
    }

    const coopmac::RunConfig cfg = coopmac::load_config(config_path, overrides);
    if (region->parsed()) print_files(coopmac::run_region(cfg));
    else if (conf_region->parsed()) print_files(coopmac::run_conf_region(cfg));
    else if (discrete->parsed()) print_files(coopmac::run_discrete(cfg));
    else if (frontier_cmd->parsed()) print_files(coopmac::run_frontier(cfg));
    else if (equiv->parsed()) print_files(coopmac::run_equiv_check(cfg));
    else if (simulate->parsed()) print_files(coopmac::run_simulate(cfg));
    return 0;
  } catch (const coopmac::config_error& e) {
    std::fprintf(stderr, "config error at %s\n", e.what());
    return 2;
  } catch (const coopmac::capability_error& e) {
    std::fprintf(stderr, "capability error: %s\n", e.what());
    return 3;
  } catch (const coopmac::validation_error& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
