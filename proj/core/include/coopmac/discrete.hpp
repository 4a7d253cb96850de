#pragma once

#include <cstdint>
#include <vector>

#include "coopmac/fading_region.hpp"
#include "coopmac/region.hpp"

namespace coopmac {

/// Finite-alphabet memoryless channel with p inputs and q outputs.
/// `transition[x][y]` is P(y_1..y_q | x_1..x_p) with x and y mixed-radix
/// joint indices (transmitter/receiver 1 is the fastest-varying digit).
struct DiscreteChannelSpec {
  std::vector<int> input_sizes;   // |X_i|, size p
  std::vector<int> output_sizes;  // |Y_j|, size q
  std::vector<std::vector<double>> transition;

  int num_tx() const { return static_cast<int>(input_sizes.size()); }
  int num_rx() const { return static_cast<int>(output_sizes.size()); }
  std::size_t joint_input_size() const;
  std::size_t joint_output_size() const;
  void validate() const;  // slices sum to 1 within 1e-12

  /// Y = X1 + X2 over {0,1}^2 -> {0,1,2}, the standard test channel.
  static DiscreteChannelSpec binary_adder();
  /// p = q = 1 binary symmetric channel.
  static DiscreteChannelSpec binary_symmetric(double crossover);
};

/// Superposition input law P_U(u) * prod_i P_{X_i|U}(x_i|u).
struct InputLaw {
  std::vector<double> p_u;
  // conditional[i][u][x]
  std::vector<std::vector<std::vector<double>>> conditional;

  int u_size() const { return static_cast<int>(p_u.size()); }
  void validate(const DiscreteChannelSpec& channel) const;

  static InputLaw independent_uniform(const DiscreteChannelSpec& channel);
};

/// Exact rate region of one law: a_{j,L} = I({X_k}_L; Y_j | {X_k}_{L^c}, U),
/// b_j = I(X_1..X_p; Y_j); everything in bits by direct summation.
RateConstraintSet region_for_law(const DiscreteChannelSpec& channel, const InputLaw& law);

struct BruteForceOptions {
  int grid_denominator = 8;  // simplex step 1/8
  int u_size_cap = 4;        // also clipped by the auxiliary cardinality bound
  std::uint64_t law_budget = 2000000;  // enumeration guard
  // verify submodularity of every region built during the sweep
  bool check_structure = false;
};

struct BruteForcePoint {
  RatePoint rates;
  InputLaw law;  // the law achieving this extreme point
};

/// Enumerates laws on the probability grid (plus exact uniform rows), collects
/// all region vertices and returns the non-dominated rate tuples. An inner
/// approximation that converges as the grid refines.
std::vector<BruteForcePoint> brute_force_region(const DiscreteChannelSpec& channel,
                                                const BruteForceOptions& options = {});

/// Conferencing region of one law (p = 2, q = 1):
///   R1 <= I(X1; Y | X2, U) + C12, R2 <= I(X2; Y | X1, U) + C21,
///   R1 + R2 <= I(X1, X2; Y | U) + C12 + C21, R1 + R2 <= I(X1, X2; Y).
RateConstraintSet willems_region(const DiscreteChannelSpec& channel, const InputLaw& law,
                                 const ConferencingSpec& conf);

}  // namespace coopmac
