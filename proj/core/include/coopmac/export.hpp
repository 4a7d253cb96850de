#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "coopmac/coding_sim.hpp"
#include "coopmac/expectation.hpp"
#include "coopmac/fading_region.hpp"
#include "coopmac/region.hpp"

namespace coopmac {

/// FNV-1a over the canonical config text; stable across runs by construction.
std::string fnv1a_hex(const std::string& text);

/// Carried at the top of every output file.
struct Provenance {
  std::string tool_version;
  std::string config_hash;
  std::string engine;
  std::vector<std::uint64_t> seeds;

  std::string csv_block() const;          // "# key=value" lines
  nlohmann::json json_block() const;
};

Provenance make_provenance(const std::string& resolved_config_text, const Engine& engine);
std::string engine_description(const Engine& engine);

/// 6 significant digits, the fixed float format of all CSV output.
std::string format_sig6(double v);

void write_text_file(const std::string& path, const std::string& body);

std::string bounds_to_csv(const RateConstraintSet& set, const Provenance& prov);
nlohmann::json bounds_to_json(const RateConstraintSet& set);
std::string vertices_to_csv(const std::vector<RatePoint>& verts, bool includes_common,
                            const Provenance& prov);
std::string frontier_to_csv(const std::vector<FrontierPoint>& points, const Provenance& prov);
std::string error_curve_to_csv(const std::vector<ErrorCurvePoint>& curve, const Provenance& prov);

/// JSON payload + provenance + embedded resolved config, dumped with a
/// trailing newline. Re-ingesting the embedded config reproduces the run.
std::string summary_to_json(const nlohmann::json& payload, const Provenance& prov,
                            const std::string& resolved_config_text);

}  // namespace coopmac
