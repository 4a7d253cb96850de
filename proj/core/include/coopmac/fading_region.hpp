#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "coopmac/channel.hpp"
#include "coopmac/expectation.hpp"
#include "coopmac/region.hpp"

namespace coopmac {

/// Per-transmitter power allocation phi_i and common-carrier correlation
/// rho_i. Either tables indexed by the transmitter's CSIT symbol, or
/// per-state callbacks (the perfect-CSIT route; the callback sees the whole
/// state sample).
struct TransmitPolicy {
  struct Component {
    std::vector<double> power_table;        // size m_i, or empty when power_fn set
    std::vector<double> correlation_table;  // size m_i, or empty when correlation_fn set
    std::function<double(const StateSample&)> power_fn;
    std::function<double(const StateSample&)> correlation_fn;

    double power_at(const StateSample& state, int symbol) const;
    double correlation_at(const StateSample& state, int symbol) const;
  };
  std::vector<Component> tx;

  static TransmitPolicy constant(std::vector<double> power, std::vector<double> correlation);
};

/// Checks 0 <= rho <= 1 on tables and E[phi_i] <= P_i (1 + 1e-6) under the
/// spec's fading and quantizer. MC estimates get a 3-sigma allowance on top.
void validate_policy(const TransmitPolicy& policy, const FadingChannelSpec& spec,
                     const CsitQuantizer& quantizer, const Engine& engine);

/// Conferencing link capacities, bits per channel use.
struct ConferencingSpec {
  double c12 = 0.0;
  double c21 = 0.0;
  void validate() const;
};

/// Common-message region for one policy: per receiver j and subset Lambda,
///   a = E[ C( sum_{k in L} S_jk^2 phi_k (1 - rho_k^2) / sigma_j^2 ) ]
///   b = E[ C( (sum_k S_jk rho_k sqrt(phi_k))^2 + sum_k S_jk^2 phi_k (1 - rho_k^2) ) / sigma_j^2 ]
/// with E_k = xi_k(S) per sample; all bounds of one set share one state stream.
RateConstraintSet region_cm(const FadingChannelSpec& spec, const CsitQuantizer& quantizer,
                            const TransmitPolicy& policy, const Engine& engine);

/// The four expectation terms of the two-user (p = 2, q = 1) region with no
/// conferencing credit applied; building block for the conferencing region
/// and the reduction check.
struct TwoUserBoundTerms {
  double r1 = 0.0;    // E[C(S1^2 phi1 (1 - rho1^2) / s^2)]
  double r2 = 0.0;
  double sum = 0.0;   // E[C((d1 + d2) / s^2)]
  double coop = 0.0;  // fully-correlated total term
};

TwoUserBoundTerms two_user_bound_terms(const FadingChannelSpec& spec,
                                       const CsitQuantizer& quantizer,
                                       const TransmitPolicy& policy, const Engine& engine);

/// Conferencing region (p = 2, q = 1): R1 <= r1 + C12, R2 <= r2 + C21,
/// R1 + R2 <= sum + C12 + C21 and R1 + R2 <= coop, the last stored as the
/// (uncredited) total bound.
RateConstraintSet region_conf(const FadingChannelSpec& spec, const CsitQuantizer& quantizer,
                              const TransmitPolicy& policy, const ConferencingSpec& conf,
                              const Engine& engine);

/// Corner test for the rate-splitting reduction: with R12 = min(R1, C12) and
/// R21 = min(R2, C21), the four split-rate inequalities hold iff (R1, R2) is
/// in the conferencing region.
bool conferencing_reduction_check(double rate1, double rate2, const ConferencingSpec& conf,
                                  const TwoUserBoundTerms& terms);

/// No-CSIT specialization: single-cell quantizer, phi_i = P_i, constant
/// rho_i. With `conf` absent the common-message region is built; with it the
/// conferencing region.
RateConstraintSet region_no_csit(const FadingChannelSpec& spec, double rho1, double rho2,
                                 const Engine& engine,
                                 const ConferencingSpec* conf = nullptr);

/// E[C((S1^2 P1 + S2^2 P2 + 2 S1 S2 sqrt(P1 P2)) / sigma^2)]: the cut-off of
/// the common rate, and the conferencing saturation threshold.
double max_common_rate(const FadingChannelSpec& spec, const Engine& engine);

/// E[C(S1^2 alpha P1 / (sigma^2 + S2^2 alpha P2))], the displayed
/// link-capacity formula for a transmitter limited to P2 = alpha P1.
double compensation_capacity(double alpha, const FadingChannelSpec& spec, const Engine& engine);

/// E[sqrt(phi_i phi_j) rho_i rho_j] / sqrt(E[phi_i] E[phi_j]) for i != j.
double correlation_coefficient(const TransmitPolicy& policy, int i, int j,
                               const FadingChannelSpec& spec, const CsitQuantizer& quantizer,
                               const Engine& engine);

/// One draw of the Gaussian signaling construction:
/// X_i = sqrt(phi_i) (rho_i U + sqrt(1 - rho_i^2) V_i).
struct GaussianSignalSample {
  StateSample state;
  std::vector<int> symbols;
  double u = 0.0;
  std::vector<double> v;
  std::vector<double> x;
};

std::vector<GaussianSignalSample> gaussian_signal_samples(const TransmitPolicy& policy,
                                                          const FadingChannelSpec& spec,
                                                          const CsitQuantizer& quantizer,
                                                          std::size_t count, std::uint64_t seed);

/// Weighted-sum search over a finite policy grid.
struct PolicyGrid {
  int rho_points = 21;              // uniform grid on [0, 1] per transmitter
  int power_simplex_denominator = 0;  // 0: phi fixed at full budget
};

struct FrontierPoint {
  WeightVector weight;
  RatePoint rates;
  TransmitPolicy policy;
  double value = 0.0;
};

/// For each weight, the best support value over all grid policies. The
/// optional conferencing spec switches the per-policy region builder.
std::vector<FrontierPoint> frontier(const FadingChannelSpec& spec,
                                    const CsitQuantizer& quantizer,
                                    const std::vector<WeightVector>& weights,
                                    const PolicyGrid& grid, const Engine& engine,
                                    const ConferencingSpec* conf = nullptr);

}  // namespace coopmac
