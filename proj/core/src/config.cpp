#include "coopmac/config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "coopmac/errors.hpp"

namespace coopmac {

using nlohmann::json;

namespace {

void require_object(const json& v, const std::string& ptr) {
  if (!v.is_object()) throw config_error(ptr, "expected an object");
}

void reject_unknown_keys(const json& obj, const std::string& ptr,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) throw config_error(ptr + "/" + key, "unknown key");
  }
}

double get_number(const json& obj, const std::string& ptr, const std::string& key) {
  if (!obj.contains(key)) throw config_error(ptr + "/" + key, "missing required number");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw config_error(ptr + "/" + key, "expected a number");
  return v.get<double>();
}

double get_number_or(const json& obj, const std::string& ptr, const std::string& key,
                     double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw config_error(ptr + "/" + key, "expected a number");
  return v.get<double>();
}

std::int64_t get_integer(const json& obj, const std::string& ptr, const std::string& key) {
  if (!obj.contains(key)) throw config_error(ptr + "/" + key, "missing required integer");
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw config_error(ptr + "/" + key, "expected an integer");
  return v.get<std::int64_t>();
}

std::int64_t get_integer_or(const json& obj, const std::string& ptr, const std::string& key,
                            std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw config_error(ptr + "/" + key, "expected an integer");
  return v.get<std::int64_t>();
}

std::string get_string(const json& obj, const std::string& ptr, const std::string& key) {
  if (!obj.contains(key)) throw config_error(ptr + "/" + key, "missing required string");
  const auto& v = obj.at(key);
  if (!v.is_string()) throw config_error(ptr + "/" + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_number_array(const json& v, const std::string& ptr) {
  if (!v.is_array()) throw config_error(ptr, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw config_error(ptr + "/" + std::to_string(i), "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

// linear and dB spellings of the same field are mutually exclusive
std::vector<double> linear_or_db(const json& obj, const std::string& ptr, const std::string& key) {
  const std::string db_key = key + "_db";
  const bool has_lin = obj.contains(key);
  const bool has_db = obj.contains(db_key);
  if (has_lin == has_db)
    throw config_error(ptr, "exactly one of '" + key + "' and '" + db_key + "' is required");
  if (has_lin) return get_number_array(obj.at(key), ptr + "/" + key);
  auto vals = get_number_array(obj.at(db_key), ptr + "/" + db_key);
  for (double& v : vals) v = db_to_linear(v);
  return vals;
}

FadingChannelSpec parse_channel(const json& obj, const std::string& ptr) {
  require_object(obj, ptr);
  reject_unknown_keys(obj, ptr,
                      {"num_tx", "num_rx", "noise_var", "noise_var_db", "power", "power_db",
                       "fading"});
  FadingChannelSpec spec;
  spec.num_tx = static_cast<int>(get_integer(obj, ptr, "num_tx"));
  spec.num_rx = static_cast<int>(get_integer(obj, ptr, "num_rx"));
  spec.noise_var = linear_or_db(obj, ptr, "noise_var");
  spec.power_budget = linear_or_db(obj, ptr, "power");

  if (!obj.contains("fading")) throw config_error(ptr + "/fading", "missing fading block");
  const auto& fading = obj.at("fading");
  require_object(fading, ptr + "/fading");
  reject_unknown_keys(fading, ptr + "/fading", {"kind", "matrix"});
  const std::string kind = get_string(fading, ptr + "/fading", "kind");
  if (kind == "iid_rayleigh") {
    spec.fading = FadingDistribution::rayleigh();
    if (fading.contains("matrix"))
      throw config_error(ptr + "/fading/matrix", "matrix is only valid for deterministic fading");
  } else if (kind == "deterministic") {
    if (!fading.contains("matrix"))
      throw config_error(ptr + "/fading/matrix", "deterministic fading requires a matrix");
    const auto& rows = fading.at("matrix");
    if (!rows.is_array() || rows.empty())
      throw config_error(ptr + "/fading/matrix", "expected a nonempty array of rows");
    StateSample m(static_cast<int>(rows.size()), spec.num_tx);
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const auto row =
          get_number_array(rows[j], ptr + "/fading/matrix/" + std::to_string(j));
      if (static_cast<int>(row.size()) != spec.num_tx)
        throw config_error(ptr + "/fading/matrix/" + std::to_string(j),
                           "row length must equal num_tx");
      for (int k = 0; k < spec.num_tx; ++k) m(static_cast<int>(j), k) = row[static_cast<std::size_t>(k)];
    }
    spec.fading = FadingDistribution::deterministic(std::move(m));
  } else {
    throw config_error(ptr + "/fading/kind", "unknown fading kind '" + kind + "'");
  }

  try {
    spec.validate();
  } catch (const validation_error& e) {
    throw config_error(ptr, e.what());
  }
  return spec;
}

CsitQuantizer parse_csit(const json& obj, const std::string& ptr, const FadingChannelSpec& spec) {
  require_object(obj, ptr);
  reject_unknown_keys(obj, ptr, {"quantizers"});
  if (!obj.contains("quantizers"))
    throw config_error(ptr + "/quantizers", "missing quantizer list");
  const auto& list = obj.at("quantizers");
  if (!list.is_array() || static_cast<int>(list.size()) != spec.num_tx)
    throw config_error(ptr + "/quantizers", "need one quantizer per transmitter");
  CsitQuantizer q;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string qptr = ptr + "/quantizers/" + std::to_string(i);
    const auto& item = list[i];
    require_object(item, qptr);
    reject_unknown_keys(item, qptr, {"kind", "receiver", "transmitter", "cuts"});
    const std::string kind = get_string(item, qptr, "kind");
    if (kind == "no_csit") {
      q.maps.push_back({});
    } else if (kind == "threshold") {
      const int j = static_cast<int>(get_integer(item, qptr, "receiver")) - 1;
      const int k = static_cast<int>(get_integer(item, qptr, "transmitter")) - 1;
      if (j < 0 || j >= spec.num_rx) throw config_error(qptr + "/receiver", "out of range");
      if (k < 0 || k >= spec.num_tx) throw config_error(qptr + "/transmitter", "out of range");
      if (!item.contains("cuts")) throw config_error(qptr + "/cuts", "missing cut points");
      const auto cuts = get_number_array(item.at("cuts"), qptr + "/cuts");
      if (cuts.empty()) throw config_error(qptr + "/cuts", "need at least one cut point");
      q.maps.push_back(CsitQuantizer::threshold(j, k, cuts));
    } else {
      throw config_error(qptr + "/kind", "unknown quantizer kind '" + kind + "'");
    }
  }
  return q;
}

TransmitPolicy parse_policy(const json& obj, const std::string& ptr,
                            const FadingChannelSpec& spec, const CsitQuantizer& quantizer) {
  require_object(obj, ptr);
  reject_unknown_keys(obj, ptr, {"power_tables", "correlation_tables"});
  TransmitPolicy policy;
  policy.tx.resize(static_cast<std::size_t>(spec.num_tx));
  for (int i = 0; i < spec.num_tx; ++i) {
    policy.tx[static_cast<std::size_t>(i)].power_table.assign(
        static_cast<std::size_t>(quantizer.alphabet_size(i)),
        spec.power_budget[static_cast<std::size_t>(i)]);
    policy.tx[static_cast<std::size_t>(i)].correlation_table.assign(
        static_cast<std::size_t>(quantizer.alphabet_size(i)), 0.0);
  }
  auto fill = [&](const char* key, bool is_power) {
    if (!obj.contains(key)) return;
    const auto& tables = obj.at(key);
    const std::string tptr = ptr + "/" + key;
    if (!tables.is_array() || static_cast<int>(tables.size()) != spec.num_tx)
      throw config_error(tptr, "need one table per transmitter");
    for (std::size_t i = 0; i < tables.size(); ++i) {
      auto vals = get_number_array(tables[i], tptr + "/" + std::to_string(i));
      if (static_cast<int>(vals.size()) != quantizer.alphabet_size(static_cast<int>(i)))
        throw config_error(tptr + "/" + std::to_string(i),
                           "table length must match the CSIT alphabet size");
      if (is_power)
        policy.tx[i].power_table = std::move(vals);
      else
        policy.tx[i].correlation_table = std::move(vals);
    }
  };
  fill("power_tables", true);
  fill("correlation_tables", false);
  return policy;
}

Engine parse_engine(const json& obj, const std::string& ptr) {
  require_object(obj, ptr);
  reject_unknown_keys(obj, ptr, {"kind", "samples", "seed", "nodes"});
  const std::string kind = get_string(obj, ptr, "kind");
  if (kind == "mc") {
    McEngine mc;
    mc.samples = static_cast<std::size_t>(get_integer_or(obj, ptr, "samples", 200000));
    mc.seed = static_cast<std::uint64_t>(get_integer_or(obj, ptr, "seed", 1));
    if (obj.contains("nodes")) throw config_error(ptr + "/nodes", "nodes is a quad-engine key");
    return mc;
  }
  if (kind == "quad") {
    QuadEngine q;
    q.nodes = static_cast<int>(get_integer_or(obj, ptr, "nodes", 64));
    if (obj.contains("samples") || obj.contains("seed"))
      throw config_error(ptr, "samples/seed are mc-engine keys");
    return q;
  }
  throw config_error(ptr + "/kind", "unknown engine kind '" + kind + "'");
}

ConferencingSpec parse_conferencing(const json& obj, const std::string& ptr) {
  require_object(obj, ptr);
  reject_unknown_keys(obj, ptr, {"c12", "c21"});
  ConferencingSpec conf;
  conf.c12 = get_number_or(obj, ptr, "c12", 0.0);
  conf.c21 = get_number_or(obj, ptr, "c21", 0.0);
  try {
    conf.validate();
  } catch (const validation_error& e) {
    throw config_error(ptr, e.what());
  }
  return conf;
}

DiscreteChannelSpec parse_discrete_channel(const json& obj, const std::string& ptr) {
  require_object(obj, ptr);
  if (obj.contains("preset")) {
    reject_unknown_keys(obj, ptr, {"preset", "crossover"});
    const std::string preset = get_string(obj, ptr, "preset");
    if (preset == "binary_adder") return DiscreteChannelSpec::binary_adder();
    if (preset == "binary_symmetric")
      return DiscreteChannelSpec::binary_symmetric(get_number_or(obj, ptr, "crossover", 0.0));
    throw config_error(ptr + "/preset", "unknown preset '" + preset + "'");
  }
  reject_unknown_keys(obj, ptr, {"input_sizes", "output_sizes", "transition"});
  DiscreteChannelSpec c;
  for (double v : get_number_array(obj.contains("input_sizes") ? obj.at("input_sizes") : json::array(),
                                   ptr + "/input_sizes"))
    c.input_sizes.push_back(static_cast<int>(v));
  for (double v : get_number_array(obj.contains("output_sizes") ? obj.at("output_sizes") : json::array(),
                                   ptr + "/output_sizes"))
    c.output_sizes.push_back(static_cast<int>(v));
  if (!obj.contains("transition")) throw config_error(ptr + "/transition", "missing tensor");
  const auto& rows = obj.at("transition");
  if (!rows.is_array()) throw config_error(ptr + "/transition", "expected an array of rows");
  for (std::size_t r = 0; r < rows.size(); ++r)
    c.transition.push_back(get_number_array(rows[r], ptr + "/transition/" + std::to_string(r)));
  try {
    c.validate();
  } catch (const validation_error& e) {
    throw config_error(ptr, e.what());
  }
  return c;
}

InputLaw parse_law(const json& obj, const std::string& ptr, const DiscreteChannelSpec& channel) {
  require_object(obj, ptr);
  if (obj.contains("preset")) {
    reject_unknown_keys(obj, ptr, {"preset"});
    const std::string preset = get_string(obj, ptr, "preset");
    if (preset == "independent_uniform") return InputLaw::independent_uniform(channel);
    throw config_error(ptr + "/preset", "unknown preset '" + preset + "'");
  }
  reject_unknown_keys(obj, ptr, {"p_u", "conditional"});
  InputLaw law;
  if (!obj.contains("p_u")) throw config_error(ptr + "/p_u", "missing distribution");
  law.p_u = get_number_array(obj.at("p_u"), ptr + "/p_u");
  if (!obj.contains("conditional")) throw config_error(ptr + "/conditional", "missing tables");
  const auto& tables = obj.at("conditional");
  if (!tables.is_array()) throw config_error(ptr + "/conditional", "expected per-transmitter tables");
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const auto& rows = tables[i];
    const std::string tptr = ptr + "/conditional/" + std::to_string(i);
    if (!rows.is_array()) throw config_error(tptr, "expected an array of rows");
    std::vector<std::vector<double>> table;
    for (std::size_t u = 0; u < rows.size(); ++u)
      table.push_back(get_number_array(rows[u], tptr + "/" + std::to_string(u)));
    law.conditional.push_back(std::move(table));
  }
  try {
    law.validate(channel);
  } catch (const validation_error& e) {
    throw config_error(ptr, e.what());
  }
  return law;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw config_error("", "top-level config must be an object");
  reject_unknown_keys(doc, "",
                      {"channel", "csit", "policy", "engine", "conferencing", "weights", "grid",
                       "discrete", "equiv", "simulate", "output"});
  RunConfig cfg;

  if (doc.contains("channel")) cfg.channel = parse_channel(doc.at("channel"), "/channel");

  if (doc.contains("csit")) {
    if (!cfg.channel) throw config_error("/csit", "csit requires a channel block");
    cfg.csit = parse_csit(doc.at("csit"), "/csit", *cfg.channel);
  } else if (cfg.channel) {
    cfg.csit = CsitQuantizer::no_csit(cfg.channel->num_tx);
  }

  if (doc.contains("policy")) {
    if (!cfg.channel) throw config_error("/policy", "policy requires a channel block");
    cfg.policy = parse_policy(doc.at("policy"), "/policy", *cfg.channel, *cfg.csit);
  } else if (cfg.channel) {
    // default: full budget, uncorrelated
    json empty = json::object();
    cfg.policy = parse_policy(empty, "/policy", *cfg.channel, *cfg.csit);
  }

  if (doc.contains("engine")) cfg.engine = parse_engine(doc.at("engine"), "/engine");

  if (doc.contains("conferencing"))
    cfg.conferencing = parse_conferencing(doc.at("conferencing"), "/conferencing");

  if (doc.contains("weights")) {
    const auto& list = doc.at("weights");
    if (!list.is_array() || list.empty())
      throw config_error("/weights", "expected a nonempty array of weight vectors");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto vals = get_number_array(list[i], "/weights/" + std::to_string(i));
      if (vals.size() < 2)
        throw config_error("/weights/" + std::to_string(i),
                           "weight vectors are [mu0, mu1, ..., mup]");
      WeightVector w;
      w.common_weight = vals[0];
      w.private_weights.assign(vals.begin() + 1, vals.end());
      try {
        w.validate();
      } catch (const validation_error& e) {
        throw config_error("/weights/" + std::to_string(i), e.what());
      }
      cfg.weights.push_back(std::move(w));
    }
  }

  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    require_object(g, "/grid");
    reject_unknown_keys(g, "/grid", {"rho_points", "power_simplex_denominator"});
    cfg.grid.rho_points = static_cast<int>(get_integer_or(g, "/grid", "rho_points", 21));
    cfg.grid.power_simplex_denominator =
        static_cast<int>(get_integer_or(g, "/grid", "power_simplex_denominator", 0));
    if (cfg.grid.rho_points < 1) throw config_error("/grid/rho_points", "must be >= 1");
  }

  if (doc.contains("discrete")) {
    const auto& d = doc.at("discrete");
    require_object(d, "/discrete");
    reject_unknown_keys(d, "/discrete", {"channel", "law", "brute_force"});
    if (!d.contains("channel")) throw config_error("/discrete/channel", "missing channel");
    cfg.discrete_channel = parse_discrete_channel(d.at("channel"), "/discrete/channel");
    if (d.contains("law")) cfg.law = parse_law(d.at("law"), "/discrete/law", *cfg.discrete_channel);
    if (d.contains("brute_force")) {
      const auto& b = d.at("brute_force");
      require_object(b, "/discrete/brute_force");
      reject_unknown_keys(b, "/discrete/brute_force",
                          {"enabled", "grid_denominator", "u_size_cap", "law_budget"});
      cfg.brute_force_enabled = b.contains("enabled") && b.at("enabled").is_boolean() &&
                                b.at("enabled").get<bool>();
      if (b.contains("enabled") && !b.at("enabled").is_boolean())
        throw config_error("/discrete/brute_force/enabled", "expected a boolean");
      cfg.brute_force.grid_denominator =
          static_cast<int>(get_integer_or(b, "/discrete/brute_force", "grid_denominator", 8));
      cfg.brute_force.u_size_cap =
          static_cast<int>(get_integer_or(b, "/discrete/brute_force", "u_size_cap", 4));
      cfg.brute_force.law_budget = static_cast<std::uint64_t>(
          get_integer_or(b, "/discrete/brute_force", "law_budget", 2000000));
    }
  }

  if (doc.contains("equiv")) {
    const auto& e = doc.at("equiv");
    require_object(e, "/equiv");
    reject_unknown_keys(e, "/equiv", {"policies", "states_per_policy", "seed"});
    cfg.equiv.policies = static_cast<int>(get_integer_or(e, "/equiv", "policies", 1000));
    cfg.equiv.states_per_policy =
        static_cast<int>(get_integer_or(e, "/equiv", "states_per_policy", 8));
    cfg.equiv.seed = static_cast<std::uint64_t>(get_integer_or(e, "/equiv", "seed", 7));
  }

  if (doc.contains("simulate")) {
    const auto& s = doc.at("simulate");
    require_object(s, "/simulate");
    reject_unknown_keys(s, "/simulate",
                        {"blocklengths", "trials", "seed", "epsilon", "rates"});
    if (s.contains("blocklengths")) {
      cfg.simulate.blocklengths.clear();
      for (double v : get_number_array(s.at("blocklengths"), "/simulate/blocklengths"))
        cfg.simulate.blocklengths.push_back(static_cast<int>(v));
    }
    cfg.simulate.trials =
        static_cast<std::size_t>(get_integer_or(s, "/simulate", "trials", 1000));
    cfg.simulate.seed = static_cast<std::uint64_t>(get_integer_or(s, "/simulate", "seed", 1));
    cfg.simulate.epsilon = get_number_or(s, "/simulate", "epsilon", 0.05);
    if (s.contains("rates")) {
      const auto& r = s.at("rates");
      require_object(r, "/simulate/rates");
      reject_unknown_keys(r, "/simulate/rates", {"common", "private"});
      cfg.simulate.common_rate = get_number_or(r, "/simulate/rates", "common", 0.0);
      if (r.contains("private"))
        cfg.simulate.private_rates = get_number_array(r.at("private"), "/simulate/rates/private");
    }
  }

  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    require_object(o, "/output");
    reject_unknown_keys(o, "/output", {"path", "format"});
    if (o.contains("path")) cfg.output.path = get_string(o, "/output", "path");
    if (o.contains("format")) {
      cfg.output.format = get_string(o, "/output", "format");
      if (cfg.output.format != "csv" && cfg.output.format != "json")
        throw config_error("/output/format", "format must be 'csv' or 'json'");
    }
  }

  cfg.resolved_text = doc.dump(2);
  return cfg;
}

void apply_override(json& doc, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw config_error("", "override must look like /json/pointer=value");
  const std::string pointer = spec.substr(0, eq);
  const std::string value = spec.substr(eq + 1);
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;  // bare strings are allowed
  }
  try {
    doc[json::json_pointer(pointer)] = parsed;
  } catch (const json::exception& e) {
    throw config_error(pointer, std::string("bad override pointer: ") + e.what());
  }
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw config_error("", "cannot read config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw config_error("", std::string("invalid JSON: ") + e.what());
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return parse_config(doc);
}

}  // namespace coopmac
