#include "coopmac/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coopmac/errors.hpp"

namespace coopmac {

void FadingChannelSpec::validate() const {
  if (num_tx < 1) throw validation_error("num_tx must be >= 1");
  if (num_rx < 1) throw validation_error("num_rx must be >= 1");
  if (static_cast<int>(noise_var.size()) != num_rx)
    throw validation_error("noise_var must have one entry per receiver");
  if (static_cast<int>(power_budget.size()) != num_tx)
    throw validation_error("power_budget must have one entry per transmitter");
  for (double v : noise_var)
    if (!(v > 0.0)) throw validation_error("noise variances must be positive");
  for (double p : power_budget)
    if (!(p >= 0.0)) throw validation_error("power budgets must be nonnegative");
  if (fading.kind == FadingDistribution::Kind::deterministic) {
    if (fading.matrix.rows != num_rx || fading.matrix.cols != num_tx)
      throw validation_error("deterministic fading matrix shape mismatch");
    for (double s : fading.matrix.entries)
      if (!(s >= 0.0)) throw validation_error("fading entries must be nonnegative");
  }
  if (fading.kind == FadingDistribution::Kind::custom && !fading.sampler)
    throw validation_error("custom fading requires a sampler");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double rayleigh_density(double s) {
  if (s < 0.0) throw validation_error("rayleigh_density: s must be nonnegative");
  return 2.0 * s * std::exp(-s * s);
}

StateSample sample_state_one(const FadingChannelSpec& spec, Rng& rng) {
  switch (spec.fading.kind) {
    case FadingDistribution::Kind::deterministic:
      return spec.fading.matrix;
    case FadingDistribution::Kind::iid_rayleigh: {
      StateSample s(spec.num_rx, spec.num_tx);
      for (double& e : s.entries) {
        // inverse CDF of 2 s exp(-s^2): s = sqrt(-ln u), u in (0, 1]
        e = std::sqrt(-std::log(rng.uniform_pos()));
      }
      return s;
    }
    case FadingDistribution::Kind::custom: {
      StateSample s = spec.fading.sampler(rng);
      if (s.rows != spec.num_rx || s.cols != spec.num_tx)
        throw validation_error("custom sampler returned wrong shape");
      for (double e : s.entries)
        if (!(e >= 0.0)) throw validation_error("custom sampler returned negative entry");
      return s;
    }
  }
  throw validation_error("unknown fading kind");
}

StateSample StateStream::next() {
  if (index_ % kSampleChunk == 0) rng_ = Rng(derive_seed(seed_, index_ / kSampleChunk));
  ++index_;
  return sample_state_one(*spec_, rng_);
}

std::vector<StateSample> sample_state(const FadingChannelSpec& spec, std::uint64_t seed,
                                      std::size_t count) {
  if (count < 1) throw validation_error("sample_state: count must be >= 1");
  spec.validate();
  std::vector<StateSample> out;
  out.reserve(count);
  StateStream stream(spec, seed);
  for (std::size_t k = 0; k < count; ++k) out.push_back(stream.next());
  return out;
}

CsitQuantizer CsitQuantizer::no_csit(int p) {
  CsitQuantizer q;
  q.maps.resize(static_cast<std::size_t>(p));
  return q;
}

CsitQuantizer::Map CsitQuantizer::threshold(int j, int k, std::vector<double> cuts) {
  std::sort(cuts.begin(), cuts.end());
  Map m;
  m.alphabet_size = static_cast<int>(cuts.size()) + 1;
  m.fn = [j, k, cuts = std::move(cuts)](const StateSample& s) {
    const double v = s(j, k);
    return static_cast<int>(std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
  };
  return m;
}

CsitQuantizer::Map CsitQuantizer::custom(int alphabet_size,
                                         std::function<int(const StateSample&)> fn) {
  Map m;
  m.alphabet_size = alphabet_size;
  m.fn = std::move(fn);
  return m;
}

void apply_csit_into(const CsitQuantizer& quantizer, const StateSample& state,
                     std::vector<int>& out) {
  out.assign(quantizer.maps.size(), 0);
  for (std::size_t i = 0; i < quantizer.maps.size(); ++i) {
    const auto& m = quantizer.maps[i];
    if (!m.fn) continue;  // no-CSIT map
    const int e = m.fn(state);
    if (e < 0 || e >= m.alphabet_size)
      throw validation_error("CSIT map for transmitter " + std::to_string(i) +
                             " returned symbol outside [0, m)");
    out[i] = e;
  }
}

std::vector<int> apply_csit(const CsitQuantizer& quantizer, const StateSample& state) {
  std::vector<int> symbols;
  apply_csit_into(quantizer, state, symbols);
  return symbols;
}

}  // namespace coopmac
