#include "coopmac/fading_region.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "coopmac/errors.hpp"
#include "coopmac/rng.hpp"

namespace coopmac {

double TransmitPolicy::Component::power_at(const StateSample& state, int symbol) const {
  if (power_fn) {
    const double v = power_fn(state);
    if (!(v >= 0.0)) throw validation_error("power callback returned a negative value");
    return v;
  }
  return power_table[static_cast<std::size_t>(symbol)];
}

double TransmitPolicy::Component::correlation_at(const StateSample& state, int symbol) const {
  double v;
  if (correlation_fn) {
    v = correlation_fn(state);
    if (v < -1e-12 || v > 1.0 + 1e-12)
      throw validation_error("correlation callback returned a value outside [0, 1]");
  } else {
    v = correlation_table[static_cast<std::size_t>(symbol)];
  }
  return std::clamp(v, 0.0, 1.0);
}

TransmitPolicy TransmitPolicy::constant(std::vector<double> power,
                                        std::vector<double> correlation) {
  TransmitPolicy p;
  p.tx.resize(power.size());
  for (std::size_t i = 0; i < power.size(); ++i) {
    p.tx[i].power_table = {power[i]};
    p.tx[i].correlation_table = {correlation[i]};
  }
  return p;
}

void ConferencingSpec::validate() const {
  if (!(c12 >= 0.0) || !(c21 >= 0.0) || !std::isfinite(c12) || !std::isfinite(c21))
    throw validation_error("conferencing capacities must be finite and nonnegative");
}

namespace {

void check_policy_shapes(const TransmitPolicy& policy, const FadingChannelSpec& spec,
                         const CsitQuantizer& quantizer) {
  if (quantizer.num_tx() != spec.num_tx)
    throw validation_error("quantizer arity does not match num_tx");
  if (static_cast<int>(policy.tx.size()) != spec.num_tx)
    throw validation_error("policy arity does not match num_tx");
  for (int i = 0; i < spec.num_tx; ++i) {
    const auto& c = policy.tx[static_cast<std::size_t>(i)];
    const std::size_t m = static_cast<std::size_t>(quantizer.alphabet_size(i));
    if (!c.power_fn) {
      if (c.power_table.size() != m)
        throw validation_error("power table size mismatch for transmitter " + std::to_string(i + 1));
      for (double v : c.power_table)
        if (!(v >= 0.0) || !std::isfinite(v))
          throw validation_error("power table entries must be finite and nonnegative");
    }
    if (!c.correlation_fn) {
      if (c.correlation_table.size() != m)
        throw validation_error("correlation table size mismatch for transmitter " +
                               std::to_string(i + 1));
      for (double v : c.correlation_table)
        if (v < 0.0 || v > 1.0)
          throw validation_error("correlation table entries must lie in [0, 1]");
    }
  }
}

}  // namespace

void validate_policy(const TransmitPolicy& policy, const FadingChannelSpec& spec,
                     const CsitQuantizer& quantizer, const Engine& engine) {
  spec.validate();
  check_policy_shapes(policy, spec, quantizer);
  const std::size_t p = static_cast<std::size_t>(spec.num_tx);
  auto integrand = [&](const StateSample& s, std::span<double> out) {
    const auto symbols = apply_csit(quantizer, s);
    for (std::size_t i = 0; i < p; ++i)
      out[i] = policy.tx[i].power_at(s, symbols[i]);
  };
  const auto est = expect_multi(engine, integrand, p, spec);
  for (std::size_t i = 0; i < p; ++i) {
    const double budget = spec.power_budget[i];
    double allowance = 1e-6 * std::max(budget, 1.0);
    allowance += 3.0 * est[i].std_error;  // MC noise; zero for quadrature
    if (est[i].value > budget + allowance)
      throw validation_error("policy violates the power budget of transmitter " +
                             std::to_string(i + 1) + ": E[phi] = " + std::to_string(est[i].value) +
                             " > " + std::to_string(budget));
  }
}

namespace {

// Shared integrand of Theorem-style bounds: for each receiver, the capacity
// arguments of every subset bound followed by the total bound.
class BoundIntegrand {
 public:
  BoundIntegrand(const FadingChannelSpec& spec, const CsitQuantizer& quantizer,
                 const TransmitPolicy& policy)
      : spec_(spec), quantizer_(quantizer), policy_(policy),
        p_(spec.num_tx), q_(spec.num_rx),
        full_((SubsetMask{1} << p_) - 1),
        subset_sum_(static_cast<std::size_t>(full_) + 1, 0.0),
        d_(static_cast<std::size_t>(p_)), phi_(static_cast<std::size_t>(p_)),
        rho_(static_cast<std::size_t>(p_)) {}

  std::size_t dim() const { return static_cast<std::size_t>(q_) * (full_ + 1); }

  void operator()(const StateSample& s, std::span<double> out) const {
    apply_csit_into(quantizer_, s, symbols_);
    for (int k = 0; k < p_; ++k) {
      const auto& c = policy_.tx[static_cast<std::size_t>(k)];
      phi_[static_cast<std::size_t>(k)] = c.power_at(s, symbols_[static_cast<std::size_t>(k)]);
      rho_[static_cast<std::size_t>(k)] =
          c.correlation_at(s, symbols_[static_cast<std::size_t>(k)]);
    }
    for (int j = 0; j < q_; ++j) {
      double carrier = 0.0;  // sum_k S_jk rho_k sqrt(phi_k)
      for (int k = 0; k < p_; ++k) {
        const double sjk = s(j, k);
        const double phi = phi_[static_cast<std::size_t>(k)];
        const double rho = rho_[static_cast<std::size_t>(k)];
        d_[static_cast<std::size_t>(k)] = sjk * sjk * phi * (1.0 - rho * rho);
        carrier += sjk * rho * std::sqrt(phi);
      }
      for (SubsetMask m = 1; m <= full_; ++m) {
        const int low = std::countr_zero(m);
        subset_sum_[m] = subset_sum_[m & (m - 1)] + d_[static_cast<std::size_t>(low)];
      }
      const double inv_noise = 1.0 / spec_.noise_var[static_cast<std::size_t>(j)];
      const std::size_t base = static_cast<std::size_t>(j) * (full_ + 1);
      for (SubsetMask m = 1; m <= full_; ++m)
        out[base + m - 1] = capacity_fn(subset_sum_[m] * inv_noise);
      out[base + full_] = capacity_fn((subset_sum_[full_] + carrier * carrier) * inv_noise);
    }
  }

 private:
  const FadingChannelSpec& spec_;
  const CsitQuantizer& quantizer_;
  const TransmitPolicy& policy_;
  int p_, q_;
  SubsetMask full_;
  mutable std::vector<double> subset_sum_, d_, phi_, rho_;
  mutable std::vector<int> symbols_;
};

}  // namespace

RateConstraintSet region_cm(const FadingChannelSpec& spec, const CsitQuantizer& quantizer,
                            const TransmitPolicy& policy, const Engine& engine) {
  if (spec.num_tx > 8)
    throw capability_error("region_cm limited to p <= 8 (2^p - 1 subset bounds per receiver)");
  validate_policy(policy, spec, quantizer, engine);

  BoundIntegrand f(spec, quantizer, policy);
  const auto est = expect_multi(
      engine, [&f](const StateSample& s, std::span<double> out) { f(s, out); }, f.dim(), spec);

  const SubsetMask full = (SubsetMask{1} << spec.num_tx) - 1;
  RateConstraintSet set;
  set.num_tx = spec.num_tx;
  set.includes_common_rate = true;
  set.receivers.resize(static_cast<std::size_t>(spec.num_rx));
  for (int j = 0; j < spec.num_rx; ++j) {
    auto& rec = set.receivers[static_cast<std::size_t>(j)];
    const std::size_t base = static_cast<std::size_t>(j) * (full + 1);
    for (SubsetMask m = 1; m <= full; ++m)
      rec.subset_bounds.push_back({m, est[base + m - 1].value});
    rec.total_bound = est[base + full].value;
  }
  set.validate();
  return set;
}

TwoUserBoundTerms two_user_bound_terms(const FadingChannelSpec& spec,
                                       const CsitQuantizer& quantizer,
                                       const TransmitPolicy& policy, const Engine& engine) {
  if (spec.num_tx != 2 || spec.num_rx != 1)
    throw capability_error("two-user bounds require p = 2, q = 1");
  const RateConstraintSet set = region_cm(spec, quantizer, policy, engine);
  TwoUserBoundTerms t;
  t.r1 = set.bound_for(0b01);
  t.r2 = set.bound_for(0b10);
  t.sum = set.bound_for(0b11);
  t.coop = set.total_bound();
  return t;
}

RateConstraintSet region_conf(const FadingChannelSpec& spec, const CsitQuantizer& quantizer,
                              const TransmitPolicy& policy, const ConferencingSpec& conf,
                              const Engine& engine) {
  conf.validate();
  const TwoUserBoundTerms t = two_user_bound_terms(spec, quantizer, policy, engine);
  RateConstraintSet set;
  set.num_tx = 2;
  set.includes_common_rate = false;
  set.receivers.resize(1);
  auto& rec = set.receivers[0];
  rec.subset_bounds.push_back({0b01, t.r1 + conf.c12});
  rec.subset_bounds.push_back({0b10, t.r2 + conf.c21});
  rec.subset_bounds.push_back({0b11, t.sum + conf.c12 + conf.c21});
  rec.total_bound = t.coop;  // the second, uncredited sum constraint
  set.validate();
  return set;
}

bool conferencing_reduction_check(double rate1, double rate2, const ConferencingSpec& conf,
                                  const TwoUserBoundTerms& terms) {
  conf.validate();
  const double r12 = std::min(rate1, conf.c12);
  const double r21 = std::min(rate2, conf.c21);
  return rate1 - r12 <= terms.r1 + kRateTol && rate2 - r21 <= terms.r2 + kRateTol &&
         rate1 + rate2 - r12 - r21 <= terms.sum + kRateTol &&
         rate1 + rate2 <= terms.coop + kRateTol;
}

RateConstraintSet region_no_csit(const FadingChannelSpec& spec, double rho1, double rho2,
                                 const Engine& engine, const ConferencingSpec* conf) {
  if (spec.num_tx != 2 || spec.num_rx != 1)
    throw capability_error("region_no_csit requires p = 2, q = 1");
  if (rho1 < 0.0 || rho1 > 1.0 || rho2 < 0.0 || rho2 > 1.0)
    throw validation_error("correlation values must lie in [0, 1]");
  const auto quantizer = CsitQuantizer::no_csit(2);
  const auto policy =
      TransmitPolicy::constant({spec.power_budget[0], spec.power_budget[1]}, {rho1, rho2});
  if (conf) return region_conf(spec, quantizer, policy, *conf, engine);
  return region_cm(spec, quantizer, policy, engine);
}

double max_common_rate(const FadingChannelSpec& spec, const Engine& engine) {
  if (spec.num_tx != 2 || spec.num_rx != 1)
    throw capability_error("max_common_rate requires p = 2, q = 1");
  spec.validate();
  const double p1 = spec.power_budget[0];
  const double p2 = spec.power_budget[1];
  const double cross = 2.0 * std::sqrt(p1 * p2);
  const double inv_noise = 1.0 / spec.noise_var[0];
  auto f = [&](const StateSample& s) {
    const double s1 = s(0, 0), s2 = s(0, 1);
    return capacity_fn((s1 * s1 * p1 + s2 * s2 * p2 + s1 * s2 * cross) * inv_noise);
  };
  return expect(engine, f, spec).value;
}

double compensation_capacity(double alpha, const FadingChannelSpec& spec, const Engine& engine) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw validation_error("alpha must lie in (0, 1)");
  if (spec.num_tx != 2 || spec.num_rx != 1)
    throw capability_error("compensation_capacity requires p = 2, q = 1");
  spec.validate();
  const double p1 = spec.power_budget[0];
  const double p2 = spec.power_budget[1];
  const double noise = spec.noise_var[0];
  auto f = [&](const StateSample& s) {
    const double s1 = s(0, 0), s2 = s(0, 1);
    return capacity_fn(s1 * s1 * alpha * p1 / (noise + s2 * s2 * alpha * p2));
  };
  return expect(engine, f, spec).value;
}

double correlation_coefficient(const TransmitPolicy& policy, int i, int j,
                               const FadingChannelSpec& spec, const CsitQuantizer& quantizer,
                               const Engine& engine) {
  if (i == j) throw validation_error("correlation_coefficient requires i != j");
  if (i < 0 || j < 0 || i >= spec.num_tx || j >= spec.num_tx)
    throw validation_error("transmitter index out of range");
  spec.validate();
  check_policy_shapes(policy, spec, quantizer);

  auto integrand = [&](const StateSample& s, std::span<double> out) {
    const auto symbols = apply_csit(quantizer, s);
    const auto& ci = policy.tx[static_cast<std::size_t>(i)];
    const auto& cj = policy.tx[static_cast<std::size_t>(j)];
    const double phi_i = ci.power_at(s, symbols[static_cast<std::size_t>(i)]);
    const double phi_j = cj.power_at(s, symbols[static_cast<std::size_t>(j)]);
    const double rho_i = ci.correlation_at(s, symbols[static_cast<std::size_t>(i)]);
    const double rho_j = cj.correlation_at(s, symbols[static_cast<std::size_t>(j)]);
    out[0] = std::sqrt(phi_i * phi_j) * rho_i * rho_j;
    out[1] = phi_i;
    out[2] = phi_j;
  };
  const auto est = expect_multi(engine, integrand, 3, spec);
  if (!(est[1].value > 0.0) || !(est[2].value > 0.0))
    throw validation_error("correlation coefficient undefined: zero average power");
  return est[0].value / std::sqrt(est[1].value * est[2].value);
}

std::vector<GaussianSignalSample> gaussian_signal_samples(const TransmitPolicy& policy,
                                                          const FadingChannelSpec& spec,
                                                          const CsitQuantizer& quantizer,
                                                          std::size_t count, std::uint64_t seed) {
  if (count < 2) throw validation_error("gaussian_signal_samples: count must be >= 2");
  spec.validate();
  check_policy_shapes(policy, spec, quantizer);
  const std::size_t p = static_cast<std::size_t>(spec.num_tx);

  std::vector<GaussianSignalSample> out;
  out.reserve(count);
  StateStream stream(spec, seed);
  for (std::size_t k = 0; k < count; ++k) {
    GaussianSignalSample g;
    g.state = stream.next();
    Rng& rng = stream.chunk_rng();
    g.symbols = apply_csit(quantizer, g.state);
    g.u = rng.normal();
    g.v.resize(p);
    g.x.resize(p);
    for (std::size_t i = 0; i < p; ++i) g.v[i] = rng.normal();
    for (std::size_t i = 0; i < p; ++i) {
      const auto& c = policy.tx[i];
      const double phi = c.power_at(g.state, g.symbols[i]);
      const double rho = c.correlation_at(g.state, g.symbols[i]);
      g.x[i] = std::sqrt(phi) * (rho * g.u + std::sqrt(1.0 - rho * rho) * g.v[i]);
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<FrontierPoint> frontier(const FadingChannelSpec& spec,
                                    const CsitQuantizer& quantizer,
                                    const std::vector<WeightVector>& weights,
                                    const PolicyGrid& grid, const Engine& engine,
                                    const ConferencingSpec* conf) {
  spec.validate();
  if (weights.empty()) throw validation_error("frontier requires at least one weight");
  if (grid.rho_points < 1) throw validation_error("frontier requires a nonempty rho grid");
  for (const auto& w : weights) w.validate();
  const int p = spec.num_tx;

  // power tables: either fixed full budget, or a simplex-scaled family per
  // transmitter with E[phi] = P by construction
  std::vector<std::vector<std::vector<double>>> power_choices(static_cast<std::size_t>(p));
  if (grid.power_simplex_denominator <= 0) {
    for (int i = 0; i < p; ++i) {
      const int m = quantizer.alphabet_size(i);
      power_choices[static_cast<std::size_t>(i)] = {std::vector<double>(
          static_cast<std::size_t>(m), spec.power_budget[static_cast<std::size_t>(i)])};
    }
  } else {
    // estimate symbol probabilities once, shared across the whole grid
    std::vector<std::vector<double>> symbol_prob(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i)
      symbol_prob[static_cast<std::size_t>(i)].assign(
          static_cast<std::size_t>(quantizer.alphabet_size(i)), 0.0);
    std::size_t dim = 0;
    std::vector<std::size_t> offset(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
      offset[static_cast<std::size_t>(i)] = dim;
      dim += static_cast<std::size_t>(quantizer.alphabet_size(i));
    }
    auto indicator = [&](const StateSample& s, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
      const auto symbols = apply_csit(quantizer, s);
      for (int i = 0; i < p; ++i)
        out[offset[static_cast<std::size_t>(i)] + static_cast<std::size_t>(symbols[static_cast<std::size_t>(i)])] = 1.0;
    };
    const auto est = expect_multi(engine, indicator, dim, spec);
    for (int i = 0; i < p; ++i)
      for (int e = 0; e < quantizer.alphabet_size(i); ++e)
        symbol_prob[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)] =
            est[offset[static_cast<std::size_t>(i)] + static_cast<std::size_t>(e)].value;

    const int denom = grid.power_simplex_denominator;
    for (int i = 0; i < p; ++i) {
      const int m = quantizer.alphabet_size(i);
      const auto& prob = symbol_prob[static_cast<std::size_t>(i)];
      std::vector<int> comp(static_cast<std::size_t>(m), 0);
      std::function<void(int, int)> gen = [&](int cell, int left) {
        if (cell == m - 1) {
          comp[static_cast<std::size_t>(cell)] = left;
          std::vector<double> table(static_cast<std::size_t>(m), 0.0);
          bool ok = true;
          for (int e = 0; e < m; ++e) {
            const double lambda =
                static_cast<double>(comp[static_cast<std::size_t>(e)]) / denom;
            if (lambda == 0.0) continue;
            if (prob[static_cast<std::size_t>(e)] <= 0.0) { ok = false; break; }
            table[static_cast<std::size_t>(e)] =
                lambda * spec.power_budget[static_cast<std::size_t>(i)] /
                prob[static_cast<std::size_t>(e)];
          }
          if (ok) power_choices[static_cast<std::size_t>(i)].push_back(std::move(table));
          return;
        }
        for (int c = 0; c <= left; ++c) {
          comp[static_cast<std::size_t>(cell)] = c;
          gen(cell + 1, left - c);
        }
      };
      gen(0, denom);
      if (power_choices[static_cast<std::size_t>(i)].empty())
        throw validation_error("power grid for transmitter " + std::to_string(i + 1) +
                               " is empty (unreachable CSIT symbols)");
    }
  }

  // rho tables: one value per (transmitter, symbol) from the uniform grid
  std::vector<double> rho_values(static_cast<std::size_t>(grid.rho_points));
  for (int r = 0; r < grid.rho_points; ++r)
    rho_values[static_cast<std::size_t>(r)] =
        grid.rho_points == 1 ? 0.0 : static_cast<double>(r) / (grid.rho_points - 1);

  std::vector<int> rho_cells(static_cast<std::size_t>(p));
  std::size_t total_rho_cells = 0;
  for (int i = 0; i < p; ++i) {
    rho_cells[static_cast<std::size_t>(i)] = quantizer.alphabet_size(i);
    total_rho_cells += static_cast<std::size_t>(quantizer.alphabet_size(i));
  }

  double grid_size = 1.0;
  for (int i = 0; i < p; ++i)
    grid_size *= static_cast<double>(power_choices[static_cast<std::size_t>(i)].size());
  grid_size *= std::pow(static_cast<double>(grid.rho_points), static_cast<double>(total_rho_cells));
  if (grid_size > 2e5)
    throw capability_error("policy grid has " + std::to_string(grid_size) +
                           " cells; reduce rho_points or the power grid");

  std::vector<FrontierPoint> best(weights.size());
  for (std::size_t w = 0; w < weights.size(); ++w) {
    best[w].weight = weights[w];
    best[w].value = -1.0;
  }

  // odometer over (power choice per tx) x (rho value per (tx, symbol))
  std::vector<std::size_t> power_idx(static_cast<std::size_t>(p), 0);
  std::vector<int> rho_idx(total_rho_cells, 0);
  for (;;) {
    TransmitPolicy policy;
    policy.tx.resize(static_cast<std::size_t>(p));
    std::size_t cell = 0;
    for (int i = 0; i < p; ++i) {
      auto& c = policy.tx[static_cast<std::size_t>(i)];
      c.power_table = power_choices[static_cast<std::size_t>(i)][power_idx[static_cast<std::size_t>(i)]];
      c.correlation_table.resize(static_cast<std::size_t>(rho_cells[static_cast<std::size_t>(i)]));
      for (int e = 0; e < rho_cells[static_cast<std::size_t>(i)]; ++e)
        c.correlation_table[static_cast<std::size_t>(e)] =
            rho_values[static_cast<std::size_t>(rho_idx[cell++])];
    }

    const RateConstraintSet set = conf ? region_conf(spec, quantizer, policy, *conf, engine)
                                       : region_cm(spec, quantizer, policy, engine);
    for (std::size_t w = 0; w < weights.size(); ++w) {
      const SupportResult s = support_value(set, weights[w]);
      if (s.value > best[w].value) {
        best[w].value = s.value;
        best[w].rates = s.argmax;
        best[w].policy = policy;
      }
    }

    // advance odometer: rho digits first, then power digits
    std::size_t d = 0;
    for (; d < total_rho_cells; ++d) {
      if (++rho_idx[d] < grid.rho_points) break;
      rho_idx[d] = 0;
    }
    if (d < total_rho_cells) continue;
    std::size_t pd = 0;
    for (; pd < static_cast<std::size_t>(p); ++pd) {
      if (++power_idx[pd] < power_choices[pd].size()) break;
      power_idx[pd] = 0;
    }
    if (pd == static_cast<std::size_t>(p)) break;
  }
  return best;
}

}  // namespace coopmac
