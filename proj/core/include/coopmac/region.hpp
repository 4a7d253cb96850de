#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace coopmac {

inline constexpr double kRateTol = 1e-9;  // absolute comparison tolerance, bits

/// A rate tuple (R0, R1, ..., Rp). R0 is absent for regions without a common
/// message.
struct RatePoint {
  std::optional<double> common_rate;
  std::vector<double> private_rates;

  double common_or_zero() const { return common_rate.value_or(0.0); }
};

/// Weights (mu_0, mu_1, ..., mu_p) of the weighted-sum objective. mu_0 is
/// ignored for regions without a common-rate dimension.
struct WeightVector {
  double common_weight = 0.0;
  std::vector<double> private_weights;

  void validate() const;  // not all zero, all >= 0
};

/// Subsets of {1..p} as bitmasks: bit (k-1) set means transmitter k in Lambda.
using SubsetMask = std::uint32_t;

std::string subset_to_string(SubsetMask mask);

/// The rate polytope produced by one policy/law choice: for each receiver,
/// per-subset upper bounds sum_{k in Lambda} R_k <= a and a total bound
/// [R0 +] sum_k R_k <= b. Conferencing sets carry the Eq-style credits folded
/// into the subset bounds and keep the un-credited sum bound as the total;
/// duplicate masks are allowed and every entry is checked.
struct RateConstraintSet {
  struct SubsetBound {
    SubsetMask mask = 0;  // nonempty
    double bound = 0.0;
  };
  struct Receiver {
    std::vector<SubsetBound> subset_bounds;
    double total_bound = 0.0;
  };

  int num_tx = 0;
  bool includes_common_rate = false;
  std::vector<Receiver> receivers;

  /// Effective bound for one mask: min over receivers and duplicates.
  double bound_for(SubsetMask mask) const;
  double total_bound() const;  // min over receivers

  /// Structural invariants: bounds finite and >= 0, monotone in the subset,
  /// and (for common-message sets) a_full <= b. Throws validation_error.
  void validate() const;
};

struct ConstraintViolation {
  int receiver = 0;
  bool is_total = false;
  SubsetMask mask = 0;
  double bound = 0.0;
  double lhs = 0.0;
  std::string describe() const;
};

struct MembershipResult {
  bool member = true;
  std::optional<ConstraintViolation> first_violation;
  explicit operator bool() const { return member; }
};

/// Point-in-polytope test with tolerance kRateTol; reports the first violated
/// constraint (receiver-major, subset entries before the total).
MembershipResult membership(const RatePoint& point, const RateConstraintSet& constraints);

/// Single-receiver-equivalent set: per-mask and total bounds minimized over
/// receivers. Membership against the result equals membership against the
/// input.
RateConstraintSet effective_bounds(const RateConstraintSet& constraints);

/// All extreme points, deduplicated within kRateTol and sorted
/// lexicographically. Exact geometry is limited to p <= 3.
std::vector<RatePoint> vertices(const RateConstraintSet& constraints);

struct SupportResult {
  double value = 0.0;
  RatePoint argmax;
};

/// max over the polytope of mu_0 R0 + sum mu_k R_k (vertex scan, p <= 3).
SupportResult support_value(const RateConstraintSet& constraints, const WeightVector& w);

struct SubmodularityResult {
  bool submodular = true;
  int receiver = 0;
  SubsetMask lhs_a = 0, lhs_b = 0;  // witness pair on failure
  double defect = 0.0;
};

/// Checks a(A) + a(B) >= a(A|B) + a(A&B) for all pairs, per receiver, with
/// a(empty) = 0; p <= 4.
SubmodularityResult check_submodular(const RateConstraintSet& constraints);

}  // namespace coopmac
