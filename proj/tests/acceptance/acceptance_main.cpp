// Acceptance suite: one pass/fail line per criterion, each run at the stated
// tolerance and wall-clock budget. Usage:
//   acceptance <path-to-coopmac-cli> <source-dir>
// The CLI path drives the determinism and golden-file checks; the source dir
// locates the shipped configs and committed goldens.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <nlohmann/json.hpp>

#include "coopmac/coding_sim.hpp"
#include "coopmac/discrete.hpp"
#include "coopmac/equivalence.hpp"
#include "coopmac/errors.hpp"
#include "coopmac/expectation.hpp"
#include "coopmac/fading_region.hpp"
#include "coopmac/reproduce.hpp"
#include "coopmac/rng.hpp"

using namespace coopmac;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void run_criterion(const std::string& name, double time_limit_s,
                   const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = body();
  } catch (const std::exception& e) {
    outcome.pass = false;
    outcome.detail = std::string("exception: ") + e.what();
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool pass = outcome.pass;
  std::string note = outcome.detail;
  if (time_limit_s > 0.0 && elapsed > time_limit_s) {
    pass = false;
    note += (note.empty() ? "" : "; ") + std::string("over time budget");
  }
  std::printf("[%s] %s (%.2fs)%s%s\n", pass ? "PASS" : "FAIL", name.c_str(), elapsed,
              note.empty() ? "" : " -- ", note.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

FadingChannelSpec rayleigh_two_user(double p1, double p2) {
  FadingChannelSpec spec;
  spec.num_tx = 2;
  spec.num_rx = 1;
  spec.noise_var = {1.0};
  spec.power_budget = {p1, p2};
  spec.fading = FadingDistribution::rayleigh();
  return spec;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return s;
}

std::string g_cli;
fs::path g_source_dir;

int run_cli(const std::string& args, const fs::path& cwd) {
  std::ostringstream cmd;
  cmd << "cd " << cwd << " && " << g_cli << " " << args << " > cli_stdout.log 2> cli_stderr.log";
  return std::system(cmd.str().c_str());
}

// ---------------------------------------------------------------- criteria

Outcome fig4_threshold() {
  const auto spec = rayleigh_two_user(100.0, 100.0);
  const double mc = max_common_rate(spec, McEngine{1000000, 20108642});
  const double quad = max_common_rate(spec, QuadEngine{64});
  std::ostringstream os;
  os << "mc=" << mc << " quad=" << quad << " |diff|=" << std::abs(mc - quad)
     << " target=4.04";
  Outcome out;
  out.detail = os.str();
  out.pass = std::abs(mc - quad) < 1e-2 && std::abs(quad - 4.04) <= 0.1;
  return out;
}

Outcome fig5_checkpoints(const fs::path& workdir) {
  const auto spec = rayleigh_two_user(200.0, 100.0);
  const McEngine mc_engine{1000000, 20108642};
  const QuadEngine quad_engine{64};

  const double comp_mc = compensation_capacity(0.5, spec, mc_engine);
  const double comp_quad = compensation_capacity(0.5, spec, quad_engine);
  const double sat_mc = max_common_rate(spec, mc_engine);
  const double sat_quad = max_common_rate(spec, quad_engine);

  const bool oracle_ok = std::abs(comp_mc - comp_quad) < 1e-2 && std::abs(sat_mc - sat_quad) < 1e-2;
  const bool comp_within = std::abs(comp_quad - 0.47) <= 0.1;
  const bool sat_within = std::abs(sat_quad - 3.81) <= 0.15;

  // misses are acceptable only when the reproduce summary flags them and
  // carries both oracle values
  bool flags_ok = true;
  if (!comp_within || !sat_within) {
    ReproduceOptions opts;
    opts.out_prefix = (workdir / "acc").string();
    const auto rep = run_reproduce("fig5", opts);
    const json summary = json::parse(rep.summary_text);
    auto check_flag = [&summary](const std::string& name, bool within) {
      for (const auto& cp : summary.at("checkpoints")) {
        if (cp.at("name") != name) continue;
        if (within) return true;
        return cp.at("flagged").get<bool>() && cp.contains("mc_value") &&
               cp.contains("quad_value");
      }
      return false;
    };
    flags_ok = check_flag("compensation_c21", comp_within) &&
               check_flag("saturation_threshold", sat_within);
  }

  std::ostringstream os;
  os << "comp quad=" << comp_quad << " (target 0.47" << (comp_within ? ", hit" : ", flagged")
     << ") sat quad=" << sat_quad << " (target 3.81" << (sat_within ? ", hit" : ", flagged")
     << ")";
  Outcome out;
  out.detail = os.str();
  out.pass = oracle_ok && flags_ok;
  return out;
}

Outcome rayleigh_moments() {
  FadingChannelSpec spec;
  spec.num_tx = 1;
  spec.num_rx = 1;
  spec.noise_var = {1.0};
  spec.power_budget = {1.0};
  spec.fading = FadingDistribution::rayleigh();
  double sum = 0.0, sum2 = 0.0;
  StateStream stream(spec, 424242);
  for (int i = 0; i < 1000000; ++i) {
    const double s = stream.next()(0, 0);
    sum += s;
    sum2 += s * s;
  }
  const double mean = sum / 1e6, mean2 = sum2 / 1e6;
  std::ostringstream os;
  os << "E[S]=" << mean << " E[S^2]=" << mean2;
  Outcome out;
  out.detail = os.str();
  out.pass = std::abs(mean - std::sqrt(M_PI) / 2.0) < 0.003 && std::abs(mean2 - 1.0) < 0.005;
  return out;
}

Outcome equivalence_suite() {
  const auto spec = rayleigh_two_user(100.0, 100.0);
  const auto res = run_equivalence_suite(spec, 1000, 8, 20108642);
  std::ostringstream os;
  os << "arg_err=" << res.max_argument_error << " roundtrip_err=" << res.max_roundtrip_error
     << " feas_failures=" << res.feasibility_failures << " (relative above unit scale)";
  Outcome out;
  out.detail = os.str();
  out.pass = res.pass;
  return out;
}

Outcome conferencing_reduction() {
  const auto spec = rayleigh_two_user(4.0, 2.0);
  const auto quant = CsitQuantizer::no_csit(2);
  Rng rng(777);
  std::size_t pairs = 0;
  for (int policy_idx = 0; policy_idx < 50; ++policy_idx) {
    const auto policy = TransmitPolicy::constant({4.0, 2.0}, {rng.uniform(), rng.uniform()});
    const ConferencingSpec conf{1.5 * rng.uniform(), 1.5 * rng.uniform()};
    const Engine engine = QuadEngine{32};
    const auto terms = two_user_bound_terms(spec, quant, policy, engine);
    const auto set = region_conf(spec, quant, policy, conf, engine);
    const double span = terms.coop + conf.c12 + conf.c21 + 0.3;
    for (int i = 0; i < 200; ++i) {
      const double r1 = span * rng.uniform();
      const double r2 = span * rng.uniform();
      RatePoint pt;
      pt.private_rates = {r1, r2};
      if (conferencing_reduction_check(r1, r2, conf, terms) != membership(pt, set).member) {
        Outcome out;
        out.pass = false;
        std::ostringstream os;
        os << "disagreement at (" << r1 << ", " << r2 << ") policy " << policy_idx;
        out.detail = os.str();
        return out;
      }
      ++pairs;
    }
  }
  Outcome out;
  out.pass = true;
  out.detail = std::to_string(pairs) + " rate pairs agreed";
  return out;
}

Outcome triangle_saturation() {
  const auto spec = rayleigh_two_user(100.0, 100.0);
  const auto quant = CsitQuantizer::no_csit(2);
  const Engine engine = QuadEngine{48};
  const double b = max_common_rate(spec, engine);

  std::vector<WeightVector> fan;
  for (int i = 0; i < 100; ++i) {
    const double theta = (M_PI / 2.0) * i / 99.0;
    WeightVector w;
    w.private_weights = {std::cos(theta), std::sin(theta)};
    for (double& v : w.private_weights)
      if (std::abs(v) < 1e-15) v = 0.0;  // axis directions, exactly
    fan.push_back(w);
  }
  const PolicyGrid grid{21, 0};

  ConferencingSpec saturated{b, b};
  const auto tri_points = frontier(spec, quant, fan, grid, engine, &saturated);
  double worst_tri = 0.0;
  for (std::size_t i = 0; i < fan.size(); ++i) {
    const double triangle =
        b * std::max(fan[i].private_weights[0], fan[i].private_weights[1]);
    worst_tri = std::max(worst_tri, std::abs(tri_points[i].value - triangle));
  }

  ConferencingSpec none{0.0, 0.0};
  const auto pent_points = frontier(spec, quant, fan, grid, engine, &none);
  const auto pentagon =
      region_conf(spec, quant, TransmitPolicy::constant({100.0, 100.0}, {0.0, 0.0}), none, engine);
  double worst_pent = 0.0;
  for (std::size_t i = 0; i < fan.size(); ++i) {
    const double ref = support_value(pentagon, fan[i]).value;
    worst_pent = std::max(worst_pent, std::abs(pent_points[i].value - ref));
  }

  std::ostringstream os;
  os << "max |frontier - triangle| = " << worst_tri << ", max |frontier - pentagon| = "
     << worst_pent;
  Outcome out;
  out.detail = os.str();
  out.pass = worst_tri < 1e-2 && worst_pent < 1e-2;
  return out;
}

Outcome discrete_oracle() {
  const auto channel = DiscreteChannelSpec::binary_adder();
  BruteForceOptions opts;
  opts.u_size_cap = 2;
  opts.check_structure = true;  // every emitted region must be submodular
  const auto frontier_pts = brute_force_region(channel, opts);
  double best_sum = 0.0;
  for (const auto& fp : frontier_pts)
    best_sum = std::max(best_sum, fp.rates.private_rates[0] + fp.rates.private_rates[1]);

  // the Slepian-Wolf shape: three subset bounds plus a total per receiver
  const auto set = region_for_law(channel, InputLaw::independent_uniform(channel));
  const bool sw_shape = set.includes_common_rate && set.receivers.size() == 1 &&
                        set.receivers[0].subset_bounds.size() == 3;
  // trivial U with independent inputs: the total collapses onto the sum bound
  const bool ulrey = std::abs(set.total_bound() - set.bound_for(0b11)) < 1e-12 &&
                     std::abs(set.bound_for(0b11) - 1.5) < 1e-12;

  std::ostringstream os;
  os << "sum rate " << best_sum << " over " << frontier_pts.size() << " frontier points";
  Outcome out;
  out.detail = os.str();
  out.pass = std::abs(best_sum - 1.5) <= 0.01 && sw_shape && ulrey;
  return out;
}

Outcome coding_separation() {
  CodebookSpec spec;
  spec.channel = DiscreteChannelSpec::binary_adder();
  spec.law = InputLaw::independent_uniform(spec.channel);
  spec.epsilon = 0.2;
  spec.seed = 1;

  spec.private_rates = {0.4, 0.4};
  const auto interior = error_curve(spec, {8, 12, 16}, 10000, 606);
  spec.private_rates = {0.9, 0.9};
  const auto exterior = error_curve(spec, {16}, 10000, 607);

  bool monotone = true;
  for (std::size_t i = 1; i < interior.size(); ++i) {
    const bool decreasing = interior[i].error_rate <= interior[i - 1].error_rate;
    const bool ci_overlap = interior[i].ci_low <= interior[i - 1].ci_high;
    if (!decreasing && !ci_overlap) monotone = false;
  }
  const double gap = exterior[0].error_rate - interior.back().error_rate;

  std::ostringstream os;
  os << "interior err {";
  for (const auto& pt : interior) os << " " << pt.error_rate;
  os << " } exterior err " << exterior[0].error_rate << " gap " << gap;
  Outcome out;
  out.detail = os.str();
  out.pass = gap >= 0.5 && monotone;
  return out;
}

Outcome signaling_statistics() {
  const auto spec = rayleigh_two_user(2.0, 1.0);
  CsitQuantizer quant;
  quant.maps.push_back(CsitQuantizer::threshold(0, 0, {1.0}));
  quant.maps.push_back({});
  TransmitPolicy policy;
  policy.tx.resize(2);
  policy.tx[0].power_table = {1.0, 2.0};
  policy.tx[0].correlation_table = {0.2, 0.8};
  policy.tx[1].power_table = {1.0};
  policy.tx[1].correlation_table = {0.5};

  // closed forms under P(S11 > 1) = exp(-1)
  const double tail = std::exp(-1.0);
  const double e_phi1 = 1.0 * (1.0 - tail) + 2.0 * tail;
  const double e_phi2 = 1.0;
  const double corr_formula =
      0.5 * (0.2 * (1.0 - tail) + 0.8 * std::sqrt(2.0) * tail) / std::sqrt(e_phi1 * e_phi2);

  const std::size_t n = 1000000;
  const auto samples = gaussian_signal_samples(policy, spec, quant, n, 31337);

  bool pass = corr_formula >= 0.0 && corr_formula <= 1.0;
  std::ostringstream os;
  for (int i = 0; i < 2; ++i) {
    double sum2 = 0.0, sum4 = 0.0;
    for (const auto& g : samples) {
      const double x2 = g.x[static_cast<std::size_t>(i)] * g.x[static_cast<std::size_t>(i)];
      sum2 += x2;
      sum4 += x2 * x2;
    }
    const double mean = sum2 / static_cast<double>(n);
    const double se = std::sqrt((sum4 / n - mean * mean) / static_cast<double>(n));
    const double expected = i == 0 ? e_phi1 : e_phi2;
    if (std::abs(mean - expected) >= 3.0 * se) pass = false;
    os << "E[X" << (i + 1) << "^2]=" << mean << " vs " << expected << "; ";
  }

  const std::size_t batch = 20000, nbatch = n / 20000;
  double rsum = 0.0, rsq = 0.0;
  for (std::size_t b = 0; b < nbatch; ++b) {
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t k = b * batch; k < (b + 1) * batch; ++k) {
      sxy += samples[k].x[0] * samples[k].x[1];
      sxx += samples[k].x[0] * samples[k].x[0];
      syy += samples[k].x[1] * samples[k].x[1];
    }
    const double r = sxy / std::sqrt(sxx * syy);
    rsum += r;
    rsq += r * r;
  }
  const double rmean = rsum / static_cast<double>(nbatch);
  const double rse =
      std::sqrt((rsq / static_cast<double>(nbatch) - rmean * rmean) / (static_cast<double>(nbatch) - 1.0));
  if (std::abs(rmean - corr_formula) >= 3.0 * rse) pass = false;
  os << "corr " << rmean << " vs " << corr_formula;

  Outcome out;
  out.pass = pass;
  out.detail = os.str();
  return out;
}

Outcome cli_determinism(const fs::path& workdir) {
  const std::vector<std::pair<std::string, std::vector<std::string>>> commands = {
      {"region " + (g_source_dir / "configs/rayleigh_region.json").string(),
       {"rayleigh_bounds.csv", "rayleigh_vertices.csv"}},
      {"conf-region " + (g_source_dir / "configs/awgn_pentagon.json").string(),
       {"pentagon_bounds.csv", "pentagon_vertices.csv"}},
      {"discrete " + (g_source_dir / "configs/discrete_adder.json").string(),
       {"adder_bounds.csv", "adder_vertices.csv"}},
      {"discrete " + (g_source_dir / "configs/discrete_bruteforce.json").string(),
       {"adder_bf_frontier.csv"}},
      {"frontier " + (g_source_dir / "configs/frontier_conferencing.json").string(),
       {"conf_frontier_frontier.csv"}},
      {"equiv-check " + (g_source_dir / "configs/equiv_check.json").string(),
       {"equiv_equiv.json"}},
      {"simulate " + (g_source_dir / "configs/simulate_adder.json").string(),
       {"adder_sim_errors.csv"}},
      {"reproduce fig4 --mc-samples 20000 --rho-points 5 --out rep",
       {"rep_fig4_boundary.csv", "rep_fig4_summary.json"}},
  };

  for (const auto& [args, files] : commands) {
    const fs::path run1 = workdir / "run1";
    const fs::path run2 = workdir / "run2";
    fs::create_directories(run1);
    fs::create_directories(run2);
    if (run_cli(args, run1) != 0 || run_cli(args, run2) != 0) {
      Outcome out;
      out.pass = false;
      out.detail = "command failed: " + args;
      return out;
    }
    for (const auto& f : files) {
      const std::string a = slurp(run1 / f);
      const std::string b = slurp(run2 / f);
      if (a.empty() || a != b) {
        Outcome out;
        out.pass = false;
        out.detail = "output differs or missing: " + f + " (" + args + ")";
        return out;
      }
    }
    fs::remove_all(run1);
    fs::remove_all(run2);
  }
  Outcome out;
  out.pass = true;
  out.detail = std::to_string(commands.size()) + " commands byte-identical across reruns";
  return out;
}

Outcome golden_reproduce(const fs::path& workdir) {
  const fs::path golden_dir = g_source_dir / "tests" / "golden";
  const std::vector<std::string> figures = {"fig3", "fig4", "fig5"};
  std::size_t checked = 0;
  for (const auto& fig : figures) {
    const fs::path rundir = workdir / ("golden_" + fig);
    fs::create_directories(rundir);
    if (run_cli("reproduce " + fig + " --out reproduce", rundir) != 0) {
      Outcome out;
      out.pass = false;
      out.detail = "reproduce " + fig + " failed";
      return out;
    }
    for (const auto& suffix : {"_boundary.csv", "_summary.json"}) {
      const std::string name = "reproduce_" + fig + suffix;
      const std::string fresh = slurp(rundir / name);
      const std::string committed = slurp(golden_dir / name);
      if (committed.empty()) {
        Outcome out;
        out.pass = false;
        out.detail = "missing golden file " + name;
        return out;
      }
      if (fresh != committed) {
        Outcome out;
        out.pass = false;
        out.detail = "golden mismatch for " + name;
        return out;
      }
      ++checked;
    }
    fs::remove_all(rundir);
  }
  Outcome out;
  out.pass = true;
  out.detail = std::to_string(checked) + " golden files matched byte-for-byte";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance <coopmac-cli> <source-dir>\n");
    return 2;
  }
  g_cli = fs::absolute(argv[1]).string();
  g_source_dir = fs::absolute(argv[2]);

  const fs::path workdir =
      fs::temp_directory_path() / ("coopmac_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(workdir);

  run_criterion("1 fig4 saturation threshold (dual oracle, 4.04 +/- 0.1)", 10.0,
                [] { return fig4_threshold(); });
  run_criterion("2 fig5 checkpoints (0.47 / 3.81, flagged misses)", 10.0,
                [&] { return fig5_checkpoints(workdir); });
  run_criterion("3 rayleigh moments at 1e6 samples", 2.0, [] { return rayleigh_moments(); });
  run_criterion("4 parameterization equivalence suite (2x1000 policies)", 5.0,
                [] { return equivalence_suite(); });
  run_criterion("5 conferencing reduction vs membership (1e4 pairs)", 5.0,
                [] { return conferencing_reduction(); });
  run_criterion("6 triangle saturation and zero-link pentagon (100 directions)", 0.0,
                [] { return triangle_saturation(); });
  run_criterion("7 discrete brute-force oracle (adder sum rate 1.5 +/- 0.01)", 30.0,
                [] { return discrete_oracle(); });
  run_criterion("8 coding simulator separation (interior vs exterior)", 60.0,
                [] { return coding_separation(); });
  run_criterion("9 signaling statistics (1e6 samples, 3 sigma)", 5.0,
                [] { return signaling_statistics(); });
  run_criterion("10 cli determinism (byte-identical reruns)", 0.0,
                [&] { return cli_determinism(workdir); });
  run_criterion("golden reproduce outputs", 0.0, [&] { return golden_reproduce(workdir); });

  std::error_code ec;
  fs::remove_all(workdir, ec);

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
