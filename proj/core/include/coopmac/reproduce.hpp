#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace coopmac {

struct ReproduceOptions {
  std::string out_prefix = "reproduce";  // files are <prefix>_<figure>_*.csv/json
  std::size_t mc_samples = 1000000;
  std::uint64_t mc_seed = 20108642;
  int quad_nodes = 64;
  int rho_points = 21;
  int directions = 100;  // boundary fan resolution
};

struct ReproduceResult {
  std::string figure;
  std::vector<std::string> files;
  std::string summary_text;  // contents of the summary JSON
};

/// One-command reproduction data for the no-CSIT Rayleigh examples:
///   fig3: common-message regions at fixed sum power over a power-ratio sweep
///   fig4: symmetric conferencing regions over a link-capacity sweep
///   fig5: one-directional conferencing regions over a C21 sweep
/// Scalar checkpoints are computed with both engines (Monte Carlo and
/// quadrature); checkpoints that miss their quoted target are flagged in the
/// summary together with both oracle values.
ReproduceResult run_reproduce(const std::string& figure, const ReproduceOptions& options = {});

}  // namespace coopmac
