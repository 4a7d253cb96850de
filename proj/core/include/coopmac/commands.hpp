#pragma once

#include <string>
#include <vector>

#include "coopmac/config.hpp"

namespace coopmac {

/// Library-level bodies of the CLI subcommands. Each runner computes from a
/// parsed configuration, writes its output files (deterministic given the
/// config) and returns their paths.
std::vector<std::string> run_region(const RunConfig& cfg);
std::vector<std::string> run_conf_region(const RunConfig& cfg);
std::vector<std::string> run_discrete(const RunConfig& cfg);
std::vector<std::string> run_frontier(const RunConfig& cfg);
std::vector<std::string> run_equiv_check(const RunConfig& cfg);
std::vector<std::string> run_simulate(const RunConfig& cfg);

}  // namespace coopmac
