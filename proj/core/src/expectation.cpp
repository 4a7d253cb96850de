#include "coopmac/expectation.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "coopmac/errors.hpp"
#include "coopmac/rng.hpp"

namespace coopmac {

double capacity_fn(double x) {
  if (x <= -1.0) throw validation_error("capacity_fn: argument must exceed -1");
  return 0.5 * std::log2(1.0 + x);
}

std::vector<ExpectationEstimate> mc_expect_multi(const StateMultiFn& f, std::size_t dim,
                                                 const FadingChannelSpec& spec,
                                                 std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw validation_error("mc_expect: need at least 2 samples");
  spec.validate();

  // States come from the chunked stream; accumulation is per chunk, chunks
  // folded in index order, so a parallel version that keeps the same
  // chunking reproduces these sums bit for bit.
  std::vector<KahanSum> sum(dim), sumsq(dim);
  std::vector<double> vals(dim);
  std::span<double> out(vals);
  StateStream stream(spec, seed);

  for (std::size_t chunk_begin = 0; chunk_begin < samples; chunk_begin += kSampleChunk) {
    const std::size_t chunk_end = std::min(samples, chunk_begin + kSampleChunk);
    std::vector<KahanSum> csum(dim), csumsq(dim);
    for (std::size_t k = chunk_begin; k < chunk_end; ++k) {
      const StateSample s = stream.next();
      f(s, out);
      for (std::size_t d = 0; d < dim; ++d) {
        const double v = vals[d];
        if (!std::isfinite(v))
          throw validation_error("mc_expect: integrand returned non-finite value at sample " +
                                 std::to_string(k));
        csum[d].add(v);
        csumsq[d].add(v * v);
      }
    }
    for (std::size_t d = 0; d < dim; ++d) {
      sum[d].add(csum[d].value());
      sumsq[d].add(csumsq[d].value());
    }
  }

  const double n = static_cast<double>(samples);
  std::vector<ExpectationEstimate> est(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const double mean = sum[d].value() / n;
    double var = (sumsq[d].value() - n * mean * mean) / (n - 1.0);
    if (var < 0.0) var = 0.0;  // roundoff on constant integrands
    est[d] = {mean, std::sqrt(var / n)};
  }
  return est;
}

ExpectationEstimate mc_expect(const StateFn& f, const FadingChannelSpec& spec,
                              std::size_t samples, std::uint64_t seed) {
  auto g = [&f](const StateSample& s, std::span<double> out) { out[0] = f(s); };
  return mc_expect_multi(g, 1, spec, samples, seed)[0];
}

void gauss_laguerre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw validation_error("gauss_laguerre: need at least one node");
  // node tables are reused heavily by policy-grid sweeps
  static std::mutex cache_mutex;
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (auto it = cache.find(n); it != cache.end()) {
      nodes = it->second.first;
      weights = it->second.second;
      return;
    }
  }
  using Table = std::unique_ptr<gsl_integration_fixed_workspace,
                                decltype(&gsl_integration_fixed_free)>;
  Table w(gsl_integration_fixed_alloc(gsl_integration_fixed_laguerre,
                                      static_cast<std::size_t>(n), 0.0, 1.0, 0.0, 0.0),
          gsl_integration_fixed_free);
  if (!w) throw validation_error("gauss_laguerre: node computation failed");
  const double* x = gsl_integration_fixed_nodes(w.get());
  const double* wt = gsl_integration_fixed_weights(w.get());
  nodes.assign(x, x + n);
  weights.assign(wt, wt + n);
  std::lock_guard<std::mutex> lock(cache_mutex);
  cache.emplace(n, std::make_pair(nodes, weights));
}

std::vector<ExpectationEstimate> quad_expect_multi(const StateMultiFn& f, std::size_t dim,
                                                   const FadingChannelSpec& spec, int nodes) {
  spec.validate();
  if (spec.fading.kind != FadingDistribution::Kind::iid_rayleigh)
    throw capability_error("quad_expect supports only i.i.d. Rayleigh fading");
  const int ndim = spec.num_rx * spec.num_tx;
  if (ndim > 3)
    throw capability_error("quad_expect limited to q*p <= 3 state entries (got " +
                           std::to_string(ndim) + ")");

  std::vector<double> u, w;
  gauss_laguerre(nodes, u, w);
  std::vector<double> s(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) s[i] = std::sqrt(u[i]);

  std::vector<KahanSum> acc(dim);
  std::vector<double> vals(dim);
  std::span<double> out(vals);
  StateSample state(spec.num_rx, spec.num_tx);

  std::vector<int> idx(static_cast<std::size_t>(ndim), 0);
  for (;;) {
    double weight = 1.0;
    for (int d = 0; d < ndim; ++d) {
      state.entries[static_cast<std::size_t>(d)] = s[static_cast<std::size_t>(idx[d])];
      weight *= w[static_cast<std::size_t>(idx[d])];
    }
    f(state, out);
    for (std::size_t d = 0; d < dim; ++d) {
      if (!std::isfinite(vals[d]))
        throw validation_error("quad_expect: integrand returned non-finite value");
      acc[d].add(weight * vals[d]);
    }
    // advance the multi-index
    int d = 0;
    while (d < ndim) {
      if (++idx[static_cast<std::size_t>(d)] < nodes) break;
      idx[static_cast<std::size_t>(d)] = 0;
      ++d;
    }
    if (d == ndim) break;
  }

  std::vector<ExpectationEstimate> est(dim);
  for (std::size_t d = 0; d < dim; ++d) est[d] = {acc[d].value(), 0.0};
  return est;
}

ExpectationEstimate quad_expect(const StateFn& f, const FadingChannelSpec& spec, int nodes) {
  auto g = [&f](const StateSample& s, std::span<double> out) { out[0] = f(s); };
  return quad_expect_multi(g, 1, spec, nodes)[0];
}

std::vector<ExpectationEstimate> expect_multi(const Engine& engine, const StateMultiFn& f,
                                              std::size_t dim, const FadingChannelSpec& spec) {
  if (const auto* mc = std::get_if<McEngine>(&engine))
    return mc_expect_multi(f, dim, spec, mc->samples, mc->seed);
  const auto& q = std::get<QuadEngine>(engine);
  return quad_expect_multi(f, dim, spec, q.nodes);
}

ExpectationEstimate expect(const Engine& engine, const StateFn& f,
                           const FadingChannelSpec& spec) {
  auto g = [&f](const StateSample& s, std::span<double> out) { out[0] = f(s); };
  return expect_multi(engine, g, 1, spec)[0];
}

}  // namespace coopmac
