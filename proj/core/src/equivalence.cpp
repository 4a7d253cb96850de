#include "coopmac/equivalence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "coopmac/errors.hpp"
#include "coopmac/rng.hpp"

namespace coopmac {

LiuUlukusValues LiuUlukusPolicy::at(const StateSample& state) const {
  const double s1 = state(0, 0), s2 = state(0, 1);
  const double h1 = s1 * s1, h2 = s2 * s2;
  LiuUlukusValues v;
  v.p0 = p0(h1, h2);
  v.p1 = p1(h1, h2);
  v.p2 = p2(h1, h2);
  v.rho = rho(h1, h2);
  if (!(v.p0 >= 0.0) || !(v.p1 >= 0.0) || !(v.p2 >= 0.0))
    throw validation_error("received powers must be nonnegative");
  if (v.rho < 0.0 || v.rho > 1.0)
    throw validation_error("rho must lie in [0, 1]");
  return v;
}

LiuUlukusValues to_liu_ulukus(const TwoUserPolicyValues& policy, const StateSample& state) {
  const double s1 = state(0, 0), s2 = state(0, 1);
  const double c1 = s1 * policy.rho1 * std::sqrt(policy.phi1);
  const double c2 = s2 * policy.rho2 * std::sqrt(policy.phi2);
  LiuUlukusValues v;
  v.p0 = (c1 + c2) * (c1 + c2);
  v.p1 = s1 * s1 * policy.phi1 * (1.0 - policy.rho1 * policy.rho1);
  v.p2 = s2 * s2 * policy.phi2 * (1.0 - policy.rho2 * policy.rho2);
  // degenerate carrier: any rho gives the same region, take 0
  v.rho = (c1 + c2) > 0.0 ? c1 / (c1 + c2) : 0.0;
  return v;
}

TwoUserPolicyValues from_liu_ulukus(const LiuUlukusValues& lu, const StateSample& state) {
  const double s1 = state(0, 0), s2 = state(0, 1);
  const double n1 = lu.p1 + lu.rho * lu.rho * lu.p0;
  const double n2 = lu.p2 + (1.0 - lu.rho) * (1.0 - lu.rho) * lu.p0;
  if (s1 == 0.0 && n1 > 0.0)
    throw validation_error("singular state: S1 = 0 with positive received power");
  if (s2 == 0.0 && n2 > 0.0)
    throw validation_error("singular state: S2 = 0 with positive received power");
  TwoUserPolicyValues out;
  out.phi1 = s1 > 0.0 ? n1 / (s1 * s1) : 0.0;
  out.phi2 = s2 > 0.0 ? n2 / (s2 * s2) : 0.0;
  out.rho1 = n1 > 0.0 ? lu.rho * std::sqrt(lu.p0) / std::sqrt(n1) : 0.0;
  out.rho2 = n2 > 0.0 ? (1.0 - lu.rho) * std::sqrt(lu.p0) / std::sqrt(n2) : 0.0;
  return out;
}

namespace {

TwoUserPolicyValues policy_values_at(const TransmitPolicy& policy, const StateSample& state) {
  TwoUserPolicyValues v;
  // perfect CSIT: symbol index is irrelevant for callback components and must
  // be 0 for single-cell tables
  v.phi1 = policy.tx[0].power_at(state, 0);
  v.phi2 = policy.tx[1].power_at(state, 0);
  v.rho1 = policy.tx[0].correlation_at(state, 0);
  v.rho2 = policy.tx[1].correlation_at(state, 0);
  return v;
}

StateSample two_user_state(double h1, double h2) {
  StateSample s(1, 2);
  s(0, 0) = std::sqrt(h1);
  s(0, 1) = std::sqrt(h2);
  return s;
}

}  // namespace

LiuUlukusPolicy to_liu_ulukus_policy(const TransmitPolicy& policy) {
  auto values = [policy](double h1, double h2) {
    const StateSample s = two_user_state(h1, h2);
    return to_liu_ulukus(policy_values_at(policy, s), s);
  };
  LiuUlukusPolicy lu;
  lu.p0 = [values](double h1, double h2) { return values(h1, h2).p0; };
  lu.p1 = [values](double h1, double h2) { return values(h1, h2).p1; };
  lu.p2 = [values](double h1, double h2) { return values(h1, h2).p2; };
  lu.rho = [values](double h1, double h2) { return values(h1, h2).rho; };
  return lu;
}

TransmitPolicy from_liu_ulukus_policy(const LiuUlukusPolicy& lu) {
  auto values = [lu](const StateSample& s) { return from_liu_ulukus(lu.at(s), s); };
  TransmitPolicy policy;
  policy.tx.resize(2);
  policy.tx[0].power_fn = [values](const StateSample& s) { return values(s).phi1; };
  policy.tx[0].correlation_fn = [values](const StateSample& s) { return values(s).rho1; };
  policy.tx[1].power_fn = [values](const StateSample& s) { return values(s).phi2; };
  policy.tx[1].correlation_fn = [values](const StateSample& s) { return values(s).rho2; };
  return policy;
}

void check_liu_ulukus_feasible(const LiuUlukusPolicy& lu, const FadingChannelSpec& spec,
                               const Engine& engine) {
  if (spec.num_tx != 2 || spec.num_rx != 1)
    throw capability_error("Liu-Ulukus policies are two-user, single-receiver");
  spec.validate();
  auto integrand = [&lu](const StateSample& s, std::span<double> out) {
    const LiuUlukusValues v = lu.at(s);
    const double s1 = s(0, 0), s2 = s(0, 1);
    const double n1 = v.p1 + v.rho * v.rho * v.p0;
    const double n2 = v.p2 + (1.0 - v.rho) * (1.0 - v.rho) * v.p0;
    if ((s1 == 0.0 && n1 > 0.0) || (s2 == 0.0 && n2 > 0.0))
      throw validation_error("singular state in feasibility integrand");
    out[0] = s1 > 0.0 ? n1 / (s1 * s1) : 0.0;
    out[1] = s2 > 0.0 ? n2 / (s2 * s2) : 0.0;
  };
  const auto est = expect_multi(engine, integrand, 2, spec);
  for (int i = 0; i < 2; ++i) {
    const double budget = spec.power_budget[static_cast<std::size_t>(i)];
    const double allowance = 1e-6 * std::max(budget, 1.0) + 3.0 * est[static_cast<std::size_t>(i)].std_error;
    if (est[static_cast<std::size_t>(i)].value > budget + allowance)
      throw validation_error("received-power policy violates the budget of transmitter " +
                             std::to_string(i + 1));
  }
}

namespace {

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// the four capacity arguments of the direct parameterization at one state
std::array<double, 4> direct_arguments(const TwoUserPolicyValues& v, const StateSample& s) {
  const double s1 = s(0, 0), s2 = s(0, 1);
  const double d1 = s1 * s1 * v.phi1 * (1.0 - v.rho1 * v.rho1);
  const double d2 = s2 * s2 * v.phi2 * (1.0 - v.rho2 * v.rho2);
  const double coop = s1 * s1 * v.phi1 + s2 * s2 * v.phi2 +
                      2.0 * s1 * s2 * v.rho1 * v.rho2 * std::sqrt(v.phi1 * v.phi2);
  return {d1, d2, d1 + d2, coop};
}

std::array<double, 4> received_arguments(const LiuUlukusValues& v) {
  return {v.p1, v.p2, v.p1 + v.p2, v.p0 + v.p1 + v.p2};
}

}  // namespace

EquivSuiteResult run_equivalence_suite(const FadingChannelSpec& spec, int policies,
                                       int states_per_policy, std::uint64_t seed) {
  if (spec.num_tx != 2 || spec.num_rx != 1)
    throw capability_error("equivalence suite requires p = 2, q = 1");
  spec.validate();
  const Engine quad = QuadEngine{16};
  const double p1_budget = spec.power_budget[0];
  const double p2_budget = spec.power_budget[1];

  EquivSuiteResult result;
  result.policies_forward = policies;
  result.policies_backward = policies;
  result.states_per_policy = states_per_policy;

  auto random_states = [&spec](Rng& rng, int count) {
    std::vector<StateSample> states;
    states.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) states.push_back(sample_state_one(spec, rng));
    return states;
  };

  // forward: random perfect-CSIT (phi, rho) policies
  for (int k = 0; k < policies; ++k) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    double a[2][4], b[2][3];
    for (auto& row : a)
      for (double& v : row) v = 0.1 + 0.9 * rng.uniform();
    for (auto& row : b)
      for (double& v : row) v = -1.5 + 3.0 * rng.uniform();

    auto phi_raw = [&a](int i, const StateSample& s) {
      const double h1 = s(0, 0) * s(0, 0), h2 = s(0, 1) * s(0, 1);
      return a[i][0] + a[i][1] * h1 + a[i][2] * h2 + a[i][3] * s(0, 0) * s(0, 1);
    };
    // scale each phi so E[phi_i] = P_i under the same quadrature used by the
    // feasibility check
    double scale[2];
    for (int i = 0; i < 2; ++i) {
      const double mean =
          expect(quad, [&](const StateSample& s) { return phi_raw(i, s); }, spec).value;
      scale[i] = (i == 0 ? p1_budget : p2_budget) / mean;
    }
    TransmitPolicy policy;
    policy.tx.resize(2);
    for (int i = 0; i < 2; ++i) {
      policy.tx[static_cast<std::size_t>(i)].power_fn =
          [&phi_raw, i, s = scale[i]](const StateSample& st) { return s * phi_raw(i, st); };
      policy.tx[static_cast<std::size_t>(i)].correlation_fn = [&b, i](const StateSample& st) {
        const double t = b[i][0] + b[i][1] * (st(0, 0) - 1.0) + b[i][2] * (st(0, 1) - 1.0);
        return 1.0 / (1.0 + std::exp(-t));
      };

      // (references a, b, phi_raw stay valid: policy is used within this iteration)
    }

    const LiuUlukusPolicy lu = to_liu_ulukus_policy(policy);
    try {
      check_liu_ulukus_feasible(lu, spec, quad);  // feasibility transport, forward
    } catch (const validation_error&) {
      ++result.feasibility_failures;
    }

    for (const auto& state : random_states(rng, states_per_policy)) {
      const TwoUserPolicyValues pv = policy_values_at(policy, state);
      const LiuUlukusValues lv = to_liu_ulukus(pv, state);
      const auto da = direct_arguments(pv, state);
      const auto ra = received_arguments(lv);
      for (int t = 0; t < 4; ++t)
        result.max_argument_error =
            std::max(result.max_argument_error, relative_error(da[static_cast<std::size_t>(t)], ra[static_cast<std::size_t>(t)]));
      // round trip through the received-power form
      const TwoUserPolicyValues back = from_liu_ulukus(lv, state);
      const LiuUlukusValues again = to_liu_ulukus(back, state);
      result.max_roundtrip_error = std::max(
          {result.max_roundtrip_error, relative_error(lv.p0, again.p0),
           relative_error(lv.p1, again.p1), relative_error(lv.p2, again.p2),
           lv.p0 > 1e-9 ? relative_error(lv.rho, again.rho) : 0.0});
    }
  }

  // backward: random feasible received-power policies
  for (int k = 0; k < policies; ++k) {
    Rng rng(derive_seed(seed, 0x8000000000000000ULL | static_cast<std::uint64_t>(k)));
    double c[3][3], d[3];
    for (auto& row : c)
      for (double& v : row) v = 0.05 + 0.45 * rng.uniform();
    for (double& v : d) v = -1.5 + 3.0 * rng.uniform();

    auto q_at = [&c](int j, double h1, double h2) {
      return c[j][0] + c[j][1] * h1 + c[j][2] * h2;
    };
    auto rho_at = [&d](double h1, double h2) {
      return 1.0 / (1.0 + std::exp(-(d[0] + d[1] * (h1 - 1.0) + d[2] * (h2 - 1.0))));
    };

    // feasibility scale: both Eq-style budget integrals under the shared rule
    auto f1 = [&](const StateSample& s) {
      const double h1 = s(0, 0) * s(0, 0), h2 = s(0, 1) * s(0, 1);
      const double rho = rho_at(h1, h2);
      return q_at(1, h1, h2) + rho * rho * h2 * q_at(0, h1, h2);
    };
    auto f2 = [&](const StateSample& s) {
      const double h1 = s(0, 0) * s(0, 0), h2 = s(0, 1) * s(0, 1);
      const double rho = rho_at(h1, h2);
      return q_at(2, h1, h2) + (1.0 - rho) * (1.0 - rho) * h1 * q_at(0, h1, h2);
    };
    const double m1 = expect(quad, f1, spec).value;
    const double m2 = expect(quad, f2, spec).value;
    const double t = std::min(p1_budget / m1, p2_budget / m2);

    LiuUlukusPolicy lu;
    lu.p0 = [&q_at, t](double h1, double h2) { return t * h1 * h2 * q_at(0, h1, h2); };
    lu.p1 = [&q_at, t](double h1, double h2) { return t * h1 * q_at(1, h1, h2); };
    lu.p2 = [&q_at, t](double h1, double h2) { return t * h2 * q_at(2, h1, h2); };
    lu.rho = [&rho_at](double h1, double h2) { return rho_at(h1, h2); };

    const TransmitPolicy policy = from_liu_ulukus_policy(lu);
    try {
      validate_policy(policy, spec, CsitQuantizer::no_csit(2), quad);  // backward transport
    } catch (const validation_error&) {
      ++result.feasibility_failures;
    }

    for (const auto& state : random_states(rng, states_per_policy)) {
      const LiuUlukusValues lv = lu.at(state);
      const TwoUserPolicyValues pv = from_liu_ulukus(lv, state);
      const auto da = direct_arguments(pv, state);
      const auto ra = received_arguments(lv);
      for (int idx = 0; idx < 4; ++idx)
        result.max_argument_error =
            std::max(result.max_argument_error, relative_error(da[static_cast<std::size_t>(idx)], ra[static_cast<std::size_t>(idx)]));
      const LiuUlukusValues back = to_liu_ulukus(pv, state);
      result.max_roundtrip_error = std::max(
          {result.max_roundtrip_error, relative_error(lv.p0, back.p0),
           relative_error(lv.p1, back.p1), relative_error(lv.p2, back.p2),
           lv.p0 > 1e-9 ? relative_error(lv.rho, back.rho) : 0.0});
    }
  }

  result.pass = result.max_argument_error <= 1e-12 && result.max_roundtrip_error <= 1e-10 &&
                result.feasibility_failures == 0;
  return result;
}

RateConstraintSet region_eq45(const LiuUlukusPolicy& lu, const FadingChannelSpec& spec,
                              const Engine& engine) {
  if (spec.num_tx != 2 || spec.num_rx != 1)
    throw capability_error("region_eq45 requires p = 2, q = 1");
  check_liu_ulukus_feasible(lu, spec, engine);
  // powers are received SNRs for unit noise; rescale other noise levels
  const double inv_noise = 1.0 / spec.noise_var[0];
  auto integrand = [&lu, inv_noise](const StateSample& s, std::span<double> out) {
    const LiuUlukusValues v = lu.at(s);
    out[0] = capacity_fn(v.p1 * inv_noise);
    out[1] = capacity_fn(v.p2 * inv_noise);
    out[2] = capacity_fn((v.p1 + v.p2) * inv_noise);
    out[3] = capacity_fn((v.p0 + v.p1 + v.p2) * inv_noise);
  };
  const auto est = expect_multi(engine, integrand, 4, spec);

  RateConstraintSet set;
  set.num_tx = 2;
  set.includes_common_rate = true;
  set.receivers.resize(1);
  auto& rec = set.receivers[0];
  rec.subset_bounds.push_back({0b01, est[0].value});
  rec.subset_bounds.push_back({0b10, est[1].value});
  rec.subset_bounds.push_back({0b11, est[2].value});
  rec.total_bound = est[3].value;
  set.validate();
  return set;
}

}  // namespace coopmac
