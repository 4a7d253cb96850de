#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "coopmac/rng.hpp"

namespace coopmac {

/// One realization of the q x p fading state matrix S. Entry (j, k) is the
/// gain from transmitter k at receiver j; all entries are nonnegative.
struct StateSample {
  int rows = 0;  // q
  int cols = 0;  // p
  std::vector<double> entries;  // row-major

  StateSample() = default;
  StateSample(int q, int p) : rows(q), cols(p), entries(static_cast<std::size_t>(q) * p, 0.0) {}

  double operator()(int j, int k) const { return entries[static_cast<std::size_t>(j) * cols + k]; }
  double& operator()(int j, int k) { return entries[static_cast<std::size_t>(j) * cols + k]; }
};

/// First-order law of the fading matrix.
struct FadingDistribution {
  enum class Kind { deterministic, iid_rayleigh, custom };

  Kind kind = Kind::iid_rayleigh;
  StateSample matrix;  // deterministic only
  // custom only: draws one state; must produce the right shape, entries >= 0
  std::function<StateSample(Rng&)> sampler;
  // custom, optional: per-entry marginal density (used nowhere internally,
  // kept for callers that post-process samples)
  std::function<double(double)> marginal_density;

  static FadingDistribution deterministic(StateSample m) {
    FadingDistribution d;
    d.kind = Kind::deterministic;
    d.matrix = std::move(m);
    return d;
  }
  static FadingDistribution rayleigh() {
    FadingDistribution d;
    d.kind = Kind::iid_rayleigh;
    return d;
  }
  static FadingDistribution custom(std::function<StateSample(Rng&)> s,
                                   std::function<double(double)> density = nullptr) {
    FadingDistribution d;
    d.kind = Kind::custom;
    d.sampler = std::move(s);
    d.marginal_density = std::move(density);
    return d;
  }
};

/// Static description of a Gaussian fading channel: dimensions, per-receiver
/// noise variances, per-transmitter average power budgets (all linear scale)
/// and the fading law.
struct FadingChannelSpec {
  int num_tx = 0;                   // p
  int num_rx = 0;                   // q
  std::vector<double> noise_var;    // size q, > 0
  std::vector<double> power_budget;  // size p, >= 0
  FadingDistribution fading;

  void validate() const;  // throws validation_error
};

/// Per-transmitter deterministic CSIT maps xi_i : state -> symbol in [0, m_i).
struct CsitQuantizer {
  struct Map {
    int alphabet_size = 1;
    // empty fn == no-CSIT (constant 0)
    std::function<int(const StateSample&)> fn;
  };
  std::vector<Map> maps;  // one per transmitter

  int num_tx() const { return static_cast<int>(maps.size()); }
  int alphabet_size(int i) const { return maps[static_cast<std::size_t>(i)].alphabet_size; }

  /// m_i = 1 for every transmitter (the "no CSIT" scheme).
  static CsitQuantizer no_csit(int p);
  /// Partition of entry (j, k) of the state by ascending cut points:
  /// symbol = #cuts below the entry value.
  static Map threshold(int j, int k, std::vector<double> cuts);
  static Map custom(int alphabet_size, std::function<int(const StateSample&)> fn);
};

double db_to_linear(double db);

/// 2 s exp(-s^2) for s >= 0; throws validation_error on negative input.
double rayleigh_density(double s);

/// Sample index ranges are split into fixed chunks, each with its own
/// derived generator stream; parallel producers that keep this chunking
/// reproduce the sequential sequence bit for bit.
inline constexpr std::size_t kSampleChunk = 65536;

/// Sequential i.i.d. state source with the chunked-stream layout.
class StateStream {
 public:
  StateStream(const FadingChannelSpec& spec, std::uint64_t seed)
      : spec_(&spec), seed_(seed), rng_(0) {}
  StateSample next();
  /// Generator for auxiliary draws tied to the current chunk (signal noise,
  /// message picks); shares the state stream so one seed drives a sample.
  Rng& chunk_rng() { return rng_; }

 private:
  const FadingChannelSpec* spec_;
  std::uint64_t seed_;
  std::size_t index_ = 0;
  Rng rng_;
};

/// Draws `count` i.i.d. states. Deterministic given (spec, seed); a shorter
/// run is a prefix of a longer one.
std::vector<StateSample> sample_state(const FadingChannelSpec& spec, std::uint64_t seed,
                                      std::size_t count);

/// Draws one state from an already positioned generator.
StateSample sample_state_one(const FadingChannelSpec& spec, Rng& rng);

/// Component i is xi_i(state).
std::vector<int> apply_csit(const CsitQuantizer& quantizer, const StateSample& state);

/// Allocation-free variant for hot loops; resizes `out` to num_tx.
void apply_csit_into(const CsitQuantizer& quantizer, const StateSample& state,
                     std::vector<int>& out);

}  // namespace coopmac
