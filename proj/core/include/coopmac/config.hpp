#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "coopmac/coding_sim.hpp"
#include "coopmac/discrete.hpp"
#include "coopmac/equivalence.hpp"
#include "coopmac/expectation.hpp"
#include "coopmac/fading_region.hpp"

namespace coopmac {

/// Parsed run configuration. Parsing is strict: unknown keys and malformed
/// values raise config_error carrying the JSON pointer of the offender.
/// Powers and noise variances may be given in dB (`power_db`,
/// `noise_var_db`); they are converted to linear scale here and nowhere else.
struct RunConfig {
  std::optional<FadingChannelSpec> channel;
  std::optional<CsitQuantizer> csit;
  std::optional<TransmitPolicy> policy;
  Engine engine = McEngine{};
  std::optional<ConferencingSpec> conferencing;
  std::vector<WeightVector> weights;
  PolicyGrid grid;

  std::optional<DiscreteChannelSpec> discrete_channel;
  std::optional<InputLaw> law;
  bool brute_force_enabled = false;
  BruteForceOptions brute_force;

  struct EquivCheck {
    int policies = 1000;
    int states_per_policy = 8;
    std::uint64_t seed = 7;
  } equiv;

  struct Simulate {
    std::vector<int> blocklengths = {8, 12, 16};
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    double epsilon = 0.05;
    double common_rate = 0.0;
    std::vector<double> private_rates;
  } simulate;

  struct Output {
    std::string path = "out";
    std::string format = "csv";  // csv | json
  } output;

  /// The resolved document (after overrides), serialized canonically.
  std::string resolved_text;
};

/// Parses and validates a configuration document.
RunConfig parse_config(const nlohmann::json& doc);

/// Loads a file, applies `pointer=json-value` overrides, then parses.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Applies one "/json/pointer=value" override to a document.
void apply_override(nlohmann::json& doc, const std::string& spec);

}  // namespace coopmac
