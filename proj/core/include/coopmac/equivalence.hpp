#pragma once

#include <functional>

#include "coopmac/expectation.hpp"
#include "coopmac/fading_region.hpp"
#include "coopmac/region.hpp"

namespace coopmac {

/// Two-user perfect-CSIT policy evaluated at one state.
struct TwoUserPolicyValues {
  double phi1 = 0.0, phi2 = 0.0;
  double rho1 = 0.0, rho2 = 0.0;
};

/// The (p0, p1, p2, rho) received-power parameterization at one state.
struct LiuUlukusValues {
  double p0 = 0.0, p1 = 0.0, p2 = 0.0;
  double rho = 0.0;
};

/// Received-power policy: functions of the squared-fading pair H = (S1^2, S2^2).
struct LiuUlukusPolicy {
  std::function<double(double, double)> p0, p1, p2;
  std::function<double(double, double)> rho;

  LiuUlukusValues at(const StateSample& state) const;
};

/// Forward transform:
///   p0 = (S1 rho1 sqrt(phi1) + S2 rho2 sqrt(phi2))^2
///   p_i = S_i^2 phi_i (1 - rho_i^2)
///   rho = S1 rho1 sqrt(phi1) / (S1 rho1 sqrt(phi1) + S2 rho2 sqrt(phi2))
/// with rho = 0 when the denominator vanishes.
LiuUlukusValues to_liu_ulukus(const TwoUserPolicyValues& policy, const StateSample& state);

/// Inverse transform:
///   phi_1 = p1 / S1^2 + rho^2 p0 / S1^2          (and symmetrically phi_2)
///   rho_1 = rho sqrt(p0) / sqrt(p1 + rho^2 p0)   (0 when the radicand vanishes)
/// Throws validation_error when S_i = 0 but the corresponding powers are not.
TwoUserPolicyValues from_liu_ulukus(const LiuUlukusValues& lu, const StateSample& state);

/// Policy-level wrappers (perfect-CSIT callbacks on both sides).
LiuUlukusPolicy to_liu_ulukus_policy(const TransmitPolicy& policy);
TransmitPolicy from_liu_ulukus_policy(const LiuUlukusPolicy& lu);

/// E[p_i/S_i^2 + (...)^2 p0/S_i^2] <= P_i, both constraints, within 1e-6
/// relative (plus MC noise allowance). Throws validation_error when violated.
void check_liu_ulukus_feasible(const LiuUlukusPolicy& lu, const FadingChannelSpec& spec,
                               const Engine& engine);

/// The received-power form of the two-user perfect-CSIT region (sigma^2
/// normalized to 1; other noise levels are rescaled into the powers):
///   R1 <= E[C(p1)], R2 <= E[C(p2)],
///   R1 + R2 <= E[C(p1 + p2)], R0 + R1 + R2 <= E[C(p0 + p1 + p2)].
RateConstraintSet region_eq45(const LiuUlukusPolicy& lu, const FadingChannelSpec& spec,
                              const Engine& engine);

/// Randomized both-directions check of the parameterization equivalence:
/// random feasible policies on each side, transformed and verified per state
/// for argument identity, feasibility transport and round-trip
/// reconstruction. Tolerances are relative above unit scale.
struct EquivSuiteResult {
  int policies_forward = 0;   // (phi, rho) -> (p, rho) direction
  int policies_backward = 0;  // (p, rho) -> (phi, rho) direction
  int states_per_policy = 0;
  double max_argument_error = 0.0;   // vs 1e-12
  double max_roundtrip_error = 0.0;  // vs 1e-10
  int feasibility_failures = 0;
  bool pass = false;
};

EquivSuiteResult run_equivalence_suite(const FadingChannelSpec& spec, int policies,
                                       int states_per_policy, std::uint64_t seed);

}  // namespace coopmac
