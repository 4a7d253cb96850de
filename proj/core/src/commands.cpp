#include "coopmac/commands.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "coopmac/errors.hpp"
#include "coopmac/export.hpp"

namespace coopmac {

using nlohmann::json;

namespace {

const FadingChannelSpec& need_channel(const RunConfig& cfg) {
  if (!cfg.channel) throw config_error("/channel", "this command requires a channel block");
  return *cfg.channel;
}

const DiscreteChannelSpec& need_discrete(const RunConfig& cfg) {
  if (!cfg.discrete_channel)
    throw config_error("/discrete/channel", "this command requires a discrete channel");
  return *cfg.discrete_channel;
}

// bounds + (p <= 3) vertices in the configured format
std::vector<std::string> export_region(const RunConfig& cfg, const RateConstraintSet& set) {
  const Provenance prov = make_provenance(cfg.resolved_text, cfg.engine);
  std::vector<std::string> files;
  if (cfg.output.format == "json") {
    json payload;
    payload["bounds"] = bounds_to_json(set);
    if (set.num_tx <= 3) {
      payload["vertices"] = json::array();
      for (const auto& v : vertices(set)) {
        json vj = json::array();
        if (set.includes_common_rate) vj.push_back(v.common_or_zero());
        for (double r : v.private_rates) vj.push_back(r);
        payload["vertices"].push_back(vj);
      }
    }
    const std::string path = cfg.output.path + "_region.json";
    write_text_file(path, summary_to_json(payload, prov, cfg.resolved_text));
    files.push_back(path);
    return files;
  }
  const std::string bounds_path = cfg.output.path + "_bounds.csv";
  write_text_file(bounds_path, bounds_to_csv(set, prov));
  files.push_back(bounds_path);
  if (set.num_tx <= 3) {
    const std::string vert_path = cfg.output.path + "_vertices.csv";
    write_text_file(vert_path, vertices_to_csv(vertices(set), set.includes_common_rate, prov));
    files.push_back(vert_path);
  }
  return files;
}

}  // namespace

std::vector<std::string> run_region(const RunConfig& cfg) {
  const auto& spec = need_channel(cfg);
  const RateConstraintSet set = region_cm(spec, *cfg.csit, *cfg.policy, cfg.engine);
  return export_region(cfg, set);
}

std::vector<std::string> run_conf_region(const RunConfig& cfg) {
  const auto& spec = need_channel(cfg);
  ConferencingSpec conf;  // absent block means zero-capacity links
  if (cfg.conferencing) conf = *cfg.conferencing;
  const RateConstraintSet set = region_conf(spec, *cfg.csit, *cfg.policy, conf, cfg.engine);
  return export_region(cfg, set);
}

std::vector<std::string> run_discrete(const RunConfig& cfg) {
  const auto& channel = need_discrete(cfg);
  const Provenance prov = make_provenance(cfg.resolved_text, cfg.engine);
  std::vector<std::string> files;

  if (cfg.brute_force_enabled) {
    const auto frontier_points = brute_force_region(channel, cfg.brute_force);
    std::ostringstream os;
    os << prov.csv_block();
    const int p = channel.num_tx();
    os << "R0";
    for (int k = 1; k <= p; ++k) os << ",R" << k;
    os << "\n";
    for (const auto& fp : frontier_points) {
      os << format_sig6(fp.rates.common_or_zero());
      for (double r : fp.rates.private_rates) os << "," << format_sig6(r);
      os << "\n";
    }
    const std::string path = cfg.output.path + "_frontier.csv";
    write_text_file(path, os.str());
    files.push_back(path);
    return files;
  }

  const InputLaw law = cfg.law ? *cfg.law : InputLaw::independent_uniform(channel);
  const RateConstraintSet set = cfg.conferencing
                                    ? willems_region(channel, law, *cfg.conferencing)
                                    : region_for_law(channel, law);
  return export_region(cfg, set);
}

std::vector<std::string> run_frontier(const RunConfig& cfg) {
  const auto& spec = need_channel(cfg);
  if (cfg.weights.empty())
    throw config_error("/weights", "frontier requires a weight list");
  const auto points = frontier(spec, *cfg.csit, cfg.weights, cfg.grid, cfg.engine,
                               cfg.conferencing ? &*cfg.conferencing : nullptr);
  const Provenance prov = make_provenance(cfg.resolved_text, cfg.engine);
  const std::string path = cfg.output.path + "_frontier.csv";
  write_text_file(path, frontier_to_csv(points, prov));
  return {path};
}

std::vector<std::string> run_equiv_check(const RunConfig& cfg) {
  const auto& spec = need_channel(cfg);
  const EquivSuiteResult res = run_equivalence_suite(spec, cfg.equiv.policies,
                                                     cfg.equiv.states_per_policy, cfg.equiv.seed);
  json payload;
  payload["policies_forward"] = res.policies_forward;
  payload["policies_backward"] = res.policies_backward;
  payload["states_per_policy"] = res.states_per_policy;
  payload["max_argument_error"] = res.max_argument_error;
  payload["argument_tolerance"] = 1e-12;
  payload["max_roundtrip_error"] = res.max_roundtrip_error;
  payload["roundtrip_tolerance"] = 1e-10;
  payload["feasibility_failures"] = res.feasibility_failures;
  payload["pass"] = res.pass;
  const Provenance prov = make_provenance(cfg.resolved_text, cfg.engine);
  const std::string path = cfg.output.path + "_equiv.json";
  write_text_file(path, summary_to_json(payload, prov, cfg.resolved_text));
  if (!res.pass) throw validation_error("equivalence suite failed; see " + path);
  return {path};
}

std::vector<std::string> run_simulate(const RunConfig& cfg) {
  const auto& channel = need_discrete(cfg);
  CodebookSpec spec;
  spec.channel = channel;
  spec.law = cfg.law ? *cfg.law : InputLaw::independent_uniform(channel);
  spec.epsilon = cfg.simulate.epsilon;
  spec.common_rate = cfg.simulate.common_rate;
  spec.private_rates = cfg.simulate.private_rates;
  if (spec.private_rates.empty())
    spec.private_rates.assign(static_cast<std::size_t>(channel.num_tx()), 0.0);
  const auto curve =
      error_curve(spec, cfg.simulate.blocklengths, cfg.simulate.trials, cfg.simulate.seed);
  const Provenance prov = make_provenance(cfg.resolved_text, cfg.engine);
  const std::string path = cfg.output.path + "_errors.csv";
  write_text_file(path, error_curve_to_csv(curve, prov));
  return {path};
}

}  // namespace coopmac
