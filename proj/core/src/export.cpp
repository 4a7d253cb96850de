#include "coopmac/export.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "coopmac/errors.hpp"
#include "coopmac/version.hpp"

namespace coopmac {

using nlohmann::json;

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string engine_description(const Engine& engine) {
  if (const auto* mc = std::get_if<McEngine>(&engine)) {
    std::ostringstream os;
    os << "mc(samples=" << mc->samples << ",seed=" << mc->seed << ")";
    return os.str();
  }
  const auto& q = std::get<QuadEngine>(engine);
  std::ostringstream os;
  os << "quad(nodes=" << q.nodes << ")";
  return os.str();
}

namespace {

void collect_seeds(const json& doc, std::vector<std::uint64_t>& seeds) {
  if (doc.is_object()) {
    for (const auto& [key, value] : doc.items()) {
      if (key == "seed" && value.is_number_integer())
        seeds.push_back(value.get<std::uint64_t>());
      collect_seeds(value, seeds);
    }
  } else if (doc.is_array()) {
    for (const auto& v : doc) collect_seeds(v, seeds);
  }
}

}  // namespace

Provenance make_provenance(const std::string& resolved_config_text, const Engine& engine) {
  Provenance p;
  p.tool_version = kVersion;
  p.config_hash = fnv1a_hex(resolved_config_text);
  p.engine = engine_description(engine);
  if (!resolved_config_text.empty()) {
    const json doc = json::parse(resolved_config_text, nullptr, false);
    if (!doc.is_discarded()) collect_seeds(doc, p.seeds);
  }
  return p;
}

std::string Provenance::csv_block() const {
  std::ostringstream os;
  os << "# tool_version=" << tool_version << "\n";
  os << "# config_hash=" << config_hash << "\n";
  os << "# engine=" << engine << "\n";
  os << "# seeds=";
  for (std::size_t i = 0; i < seeds.size(); ++i) os << (i ? ";" : "") << seeds[i];
  os << "\n";
  return os.str();
}

json Provenance::json_block() const {
  json j;
  j["tool_version"] = tool_version;
  j["config_hash"] = config_hash;
  j["engine"] = engine;
  j["seeds"] = seeds;
  return j;
}

std::string format_sig6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot write output file '" + path + "'");
  out << body;
  if (!out) throw validation_error("write failed for '" + path + "'");
}

std::string bounds_to_csv(const RateConstraintSet& set, const Provenance& prov) {
  std::ostringstream os;
  os << prov.csv_block();
  os << "receiver,constraint,subset,bound\n";
  for (std::size_t j = 0; j < set.receivers.size(); ++j) {
    const auto& rec = set.receivers[j];
    for (const auto& sb : rec.subset_bounds)
      os << (j + 1) << ",subset," << subset_to_string(sb.mask) << ","
         << format_sig6(sb.bound) << "\n";
    os << (j + 1) << ",total,," << format_sig6(rec.total_bound) << "\n";
  }
  return os.str();
}

json bounds_to_json(const RateConstraintSet& set) {
  json j;
  j["num_tx"] = set.num_tx;
  j["includes_common_rate"] = set.includes_common_rate;
  j["receivers"] = json::array();
  for (const auto& rec : set.receivers) {
    json r;
    r["subset_bounds"] = json::array();
    for (const auto& sb : rec.subset_bounds) {
      json b;
      b["subset"] = subset_to_string(sb.mask);
      b["bound"] = sb.bound;
      r["subset_bounds"].push_back(b);
    }
    r["total_bound"] = rec.total_bound;
    j["receivers"].push_back(r);
  }
  return j;
}

std::string vertices_to_csv(const std::vector<RatePoint>& verts, bool includes_common,
                            const Provenance& prov) {
  if (verts.empty()) throw validation_error("refusing to export an empty vertex list");
  std::ostringstream os;
  os << prov.csv_block();
  const std::size_t p = verts.front().private_rates.size();
  if (includes_common) os << "R0,";
  for (std::size_t k = 1; k <= p; ++k) os << "R" << k << (k < p ? "," : "\n");
  for (const auto& v : verts) {
    if (includes_common) os << format_sig6(v.common_or_zero()) << ",";
    for (std::size_t k = 0; k < p; ++k)
      os << format_sig6(v.private_rates[k]) << (k + 1 < p ? "," : "\n");
  }
  return os.str();
}

namespace {

std::string join_table(const std::vector<double>& vals) {
  std::ostringstream os;
  for (std::size_t i = 0; i < vals.size(); ++i) os << (i ? "|" : "") << format_sig6(vals[i]);
  return os.str();
}

}  // namespace

std::string frontier_to_csv(const std::vector<FrontierPoint>& points, const Provenance& prov) {
  if (points.empty()) throw validation_error("refusing to export an empty frontier");
  std::ostringstream os;
  os << prov.csv_block();
  const std::size_t p = points.front().weight.private_weights.size();
  os << "mu0";
  for (std::size_t k = 1; k <= p; ++k) os << ",mu" << k;
  os << ",value,R0";
  for (std::size_t k = 1; k <= p; ++k) os << ",R" << k;
  for (std::size_t k = 1; k <= p; ++k) os << ",phi" << k << ",rho" << k;
  os << "\n";
  for (const auto& fp : points) {
    os << format_sig6(fp.weight.common_weight);
    for (double w : fp.weight.private_weights) os << "," << format_sig6(w);
    os << "," << format_sig6(fp.value);
    os << "," << format_sig6(fp.rates.common_or_zero());
    for (double r : fp.rates.private_rates) os << "," << format_sig6(r);
    for (const auto& tx : fp.policy.tx)
      os << "," << join_table(tx.power_table) << "," << join_table(tx.correlation_table);
    os << "\n";
  }
  return os.str();
}

std::string error_curve_to_csv(const std::vector<ErrorCurvePoint>& curve, const Provenance& prov) {
  if (curve.empty()) throw validation_error("refusing to export an empty error curve");
  std::ostringstream os;
  os << prov.csv_block();
  const std::size_t p = curve.front().nominal_rates.size() - 1;
  os << "n";
  os << ",nominal_R0";
  for (std::size_t k = 1; k <= p; ++k) os << ",nominal_R" << k;
  os << ",realized_R0";
  for (std::size_t k = 1; k <= p; ++k) os << ",realized_R" << k;
  os << ",trials,errors,error_rate,ci_low,ci_high\n";
  for (const auto& pt : curve) {
    os << pt.blocklength;
    for (double r : pt.nominal_rates) os << "," << format_sig6(r);
    for (double r : pt.realized_rates) os << "," << format_sig6(r);
    os << "," << pt.trials << "," << pt.errors << "," << format_sig6(pt.error_rate) << ","
       << format_sig6(pt.ci_low) << "," << format_sig6(pt.ci_high) << "\n";
  }
  return os.str();
}

std::string summary_to_json(const json& payload, const Provenance& prov,
                            const std::string& resolved_config_text) {
  json out = payload;
  out["provenance"] = prov.json_block();
  if (!resolved_config_text.empty()) {
    const json cfg = json::parse(resolved_config_text, nullptr, false);
    if (!cfg.is_discarded()) out["provenance"]["config"] = cfg;
  }
  return out.dump(2) + "\n";
}

}  // namespace coopmac
