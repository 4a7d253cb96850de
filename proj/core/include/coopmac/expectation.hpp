#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "coopmac/channel.hpp"

namespace coopmac {

/// Monte Carlo over the spec's fading law.
struct McEngine {
  std::size_t samples = 200000;
  std::uint64_t seed = 1;
};

/// Tensor-product Gauss-Laguerre over u = s^2 per state entry.
/// Only valid for i.i.d. Rayleigh fading and q*p <= 3.
struct QuadEngine {
  int nodes = 64;
};

using Engine = std::variant<McEngine, QuadEngine>;

struct ExpectationEstimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 for quadrature
};

/// The capacity function: 0.5 * log2(1 + x). Rates are in bits.
double capacity_fn(double x);

using StateFn = std::function<double(const StateSample&)>;
/// Multi-output integrand: fills `out` (size fixed per call site) from one state.
using StateMultiFn = std::function<void(const StateSample&, std::span<double>)>;

ExpectationEstimate mc_expect(const StateFn& f, const FadingChannelSpec& spec,
                              std::size_t samples, std::uint64_t seed);

std::vector<ExpectationEstimate> mc_expect_multi(const StateMultiFn& f, std::size_t dim,
                                                 const FadingChannelSpec& spec,
                                                 std::size_t samples, std::uint64_t seed);

ExpectationEstimate quad_expect(const StateFn& f, const FadingChannelSpec& spec, int nodes);

std::vector<ExpectationEstimate> quad_expect_multi(const StateMultiFn& f, std::size_t dim,
                                                   const FadingChannelSpec& spec, int nodes);

/// Engine dispatch. All outputs of one call share a single state stream.
std::vector<ExpectationEstimate> expect_multi(const Engine& engine, const StateMultiFn& f,
                                              std::size_t dim, const FadingChannelSpec& spec);

ExpectationEstimate expect(const Engine& engine, const StateFn& f, const FadingChannelSpec& spec);

/// Gauss-Laguerre nodes/weights for integral_0^inf e^{-u} g(u) du.
void gauss_laguerre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace coopmac
