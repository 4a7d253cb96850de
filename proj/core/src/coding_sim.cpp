#include "coopmac/coding_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coopmac/errors.hpp"
#include "coopmac/rng.hpp"

namespace coopmac {

namespace {

std::size_t message_count(int n, double rate) {
  if (rate < 0.0) throw validation_error("rates must be nonnegative");
  const double m = std::exp2(static_cast<double>(n) * rate);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(m - 1e-9)));
}

int draw_from_row(const std::vector<double>& row, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    acc += row[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(row.size()) - 1;  // guard against roundoff at u ~ 1
}

std::size_t draw_index(std::size_t count, Rng& rng) {
  const std::size_t idx = static_cast<std::size_t>(rng.uniform() * static_cast<double>(count));
  return std::min(idx, count - 1);
}

struct CellWindow {
  int lo = 0;
  int hi = 0;
};

CellWindow window_for(double prob, double eps, int n, int collapsed_nonzero) {
  if (collapsed_nonzero == 0) return {0, 0};  // zero-probability cells must be absent
  const double half = eps * collapsed_nonzero;
  int lo = static_cast<int>(std::ceil(static_cast<double>(n) * (prob - half) - 1e-9));
  int hi = static_cast<int>(std::floor(static_cast<double>(n) * (prob + half) + 1e-9));
  lo = std::max(lo, 0);
  hi = std::min(hi, n);
  return {lo, hi};
}

// Typicality tables for one receiver: exact joint-cell windows plus the
// looser implied windows used to prefilter clouds and satellites.
struct ReceiverContext {
  int n = 0;
  int p = 0;
  int nu = 0;
  int ny = 0;
  std::vector<int> input_sizes;
  std::vector<double> cell_prob;        // [(u, x..], y) flattened
  std::vector<CellWindow> cell_window;  // exact windows
  std::vector<std::uint8_t> cell_zero;
  // cloud prefilter over (u, y)
  std::vector<CellWindow> uy_window;
  std::vector<std::uint8_t> uy_zero;
  // per transmitter prefilter over (x_i, u, y)
  std::vector<std::vector<CellWindow>> pair_window;
  std::vector<std::vector<std::uint8_t>> pair_zero;

  std::size_t cell_count() const { return cell_prob.size(); }
};

ReceiverContext make_context(const Codebook& cb, int receiver) {
  const auto& channel = cb.spec.channel;
  const auto& law = cb.spec.law;
  ReceiverContext ctx;
  ctx.n = cb.spec.blocklength;
  ctx.p = channel.num_tx();
  ctx.nu = law.u_size();
  ctx.ny = channel.output_sizes[static_cast<std::size_t>(receiver)];
  ctx.input_sizes = channel.input_sizes;

  const std::size_t nx = channel.joint_input_size();
  const std::size_t nyj = channel.joint_output_size();

  // marginal channel for this receiver
  std::vector<std::vector<double>> pj(nx, std::vector<double>(static_cast<std::size_t>(ctx.ny), 0.0));
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < nyj; ++y) {
      std::size_t rest = y;
      int yj = 0;
      for (int j = 0; j <= receiver; ++j) {
        yj = static_cast<int>(rest % static_cast<std::size_t>(channel.output_sizes[static_cast<std::size_t>(j)]));
        rest /= static_cast<std::size_t>(channel.output_sizes[static_cast<std::size_t>(j)]);
      }
      pj[x][static_cast<std::size_t>(yj)] += channel.transition[x][y];
    }

  const std::size_t cells = static_cast<std::size_t>(ctx.nu) * nx * static_cast<std::size_t>(ctx.ny);
  ctx.cell_prob.assign(cells, 0.0);
  for (int u = 0; u < ctx.nu; ++u)
    for (std::size_t x = 0; x < nx; ++x) {
      double pux = law.p_u[static_cast<std::size_t>(u)];
      std::size_t rest = x;
      for (int i = 0; i < ctx.p; ++i) {
        const int xi = static_cast<int>(rest % static_cast<std::size_t>(ctx.input_sizes[static_cast<std::size_t>(i)]));
        rest /= static_cast<std::size_t>(ctx.input_sizes[static_cast<std::size_t>(i)]);
        pux *= law.conditional[static_cast<std::size_t>(i)][static_cast<std::size_t>(u)][static_cast<std::size_t>(xi)];
      }
      for (int y = 0; y < ctx.ny; ++y)
        ctx.cell_prob[(static_cast<std::size_t>(u) * nx + x) * static_cast<std::size_t>(ctx.ny) +
                      static_cast<std::size_t>(y)] = pux * pj[x][static_cast<std::size_t>(y)];
    }

  ctx.cell_window.resize(cells);
  ctx.cell_zero.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    const bool zero = ctx.cell_prob[c] == 0.0;
    ctx.cell_zero[c] = zero ? 1 : 0;
    ctx.cell_window[c] = window_for(ctx.cell_prob[c], cb.spec.epsilon, ctx.n, zero ? 0 : 1);
  }

  // cloud prefilter: collapse over all transmitters
  const std::size_t uy_cells = static_cast<std::size_t>(ctx.nu) * static_cast<std::size_t>(ctx.ny);
  std::vector<double> uy_prob(uy_cells, 0.0);
  std::vector<int> uy_nonzero(uy_cells, 0);
  for (int u = 0; u < ctx.nu; ++u)
    for (std::size_t x = 0; x < nx; ++x)
      for (int y = 0; y < ctx.ny; ++y) {
        const std::size_t c = (static_cast<std::size_t>(u) * nx + x) * static_cast<std::size_t>(ctx.ny) +
                              static_cast<std::size_t>(y);
        const std::size_t uy = static_cast<std::size_t>(u) * static_cast<std::size_t>(ctx.ny) +
                               static_cast<std::size_t>(y);
        uy_prob[uy] += ctx.cell_prob[c];
        if (ctx.cell_prob[c] > 0.0) ++uy_nonzero[uy];
      }
  ctx.uy_window.resize(uy_cells);
  ctx.uy_zero.resize(uy_cells);
  for (std::size_t c = 0; c < uy_cells; ++c) {
    ctx.uy_zero[c] = uy_nonzero[c] == 0 ? 1 : 0;
    ctx.uy_window[c] = window_for(uy_prob[c], cb.spec.epsilon, ctx.n, uy_nonzero[c]);
  }

  // per-transmitter prefilter: collapse over the other transmitters
  ctx.pair_window.resize(static_cast<std::size_t>(ctx.p));
  ctx.pair_zero.resize(static_cast<std::size_t>(ctx.p));
  for (int i = 0; i < ctx.p; ++i) {
    const int mi = ctx.input_sizes[static_cast<std::size_t>(i)];
    const std::size_t pair_cells = static_cast<std::size_t>(mi) * static_cast<std::size_t>(ctx.nu) *
                                   static_cast<std::size_t>(ctx.ny);
    std::vector<double> prob(pair_cells, 0.0);
    std::vector<int> nonzero(pair_cells, 0);
    for (int u = 0; u < ctx.nu; ++u)
      for (std::size_t x = 0; x < nx; ++x) {
        std::size_t rest = x;
        int xi = 0;
        for (int k = 0; k <= i; ++k) {
          xi = static_cast<int>(rest % static_cast<std::size_t>(ctx.input_sizes[static_cast<std::size_t>(k)]));
          rest /= static_cast<std::size_t>(ctx.input_sizes[static_cast<std::size_t>(k)]);
        }
        for (int y = 0; y < ctx.ny; ++y) {
          const std::size_t c = (static_cast<std::size_t>(u) * nx + x) * static_cast<std::size_t>(ctx.ny) +
                                static_cast<std::size_t>(y);
          const std::size_t pc = (static_cast<std::size_t>(xi) * static_cast<std::size_t>(ctx.nu) +
                                  static_cast<std::size_t>(u)) * static_cast<std::size_t>(ctx.ny) +
                                 static_cast<std::size_t>(y);
          prob[pc] += ctx.cell_prob[c];
          if (ctx.cell_prob[c] > 0.0) ++nonzero[pc];
        }
      }
    ctx.pair_window[static_cast<std::size_t>(i)].resize(pair_cells);
    ctx.pair_zero[static_cast<std::size_t>(i)].resize(pair_cells);
    for (std::size_t c = 0; c < pair_cells; ++c) {
      ctx.pair_zero[static_cast<std::size_t>(i)][c] = nonzero[c] == 0 ? 1 : 0;
      ctx.pair_window[static_cast<std::size_t>(i)][c] = window_for(prob[c], cb.spec.epsilon, ctx.n, nonzero[c]);
    }
  }
  return ctx;
}

// checks counts of `keys` against pair windows; keys[t] in [0, cells)
bool counts_in_windows(const std::vector<int>& keys, const std::vector<CellWindow>& windows,
                       std::vector<int>& scratch) {
  std::fill(scratch.begin(), scratch.end(), 0);
  for (int k : keys) ++scratch[static_cast<std::size_t>(k)];
  for (std::size_t c = 0; c < windows.size(); ++c)
    if (scratch[c] < windows[c].lo || scratch[c] > windows[c].hi) return false;
  return true;
}

}  // namespace

void CodebookSpec::validate() const {
  if (blocklength < 1) throw validation_error("blocklength must be >= 1");
  if (!(epsilon > 0.0)) throw validation_error("typicality slack must be positive");
  channel.validate();
  law.validate(channel);
  if (static_cast<int>(private_rates.size()) != channel.num_tx())
    throw validation_error("need one private rate per transmitter");
  if (common_rate < 0.0) throw validation_error("rates must be nonnegative");
}

double Codebook::realized_common_rate() const {
  return std::log2(static_cast<double>(common_messages)) / spec.blocklength;
}

std::vector<double> Codebook::realized_private_rates() const {
  std::vector<double> out;
  out.reserve(private_messages.size());
  for (std::size_t m : private_messages)
    out.push_back(std::log2(static_cast<double>(m)) / spec.blocklength);
  return out;
}

Codebook build_codebook(const CodebookSpec& spec) {
  spec.validate();
  const int n = spec.blocklength;
  const int p = spec.channel.num_tx();

  Codebook cb;
  cb.spec = spec;
  cb.common_messages = message_count(n, spec.common_rate);
  cb.private_messages.resize(static_cast<std::size_t>(p));
  std::size_t symbols = cb.common_messages * static_cast<std::size_t>(n);
  for (int i = 0; i < p; ++i) {
    cb.private_messages[static_cast<std::size_t>(i)] =
        message_count(n, spec.private_rates[static_cast<std::size_t>(i)]);
    symbols += cb.common_messages * cb.private_messages[static_cast<std::size_t>(i)] *
               static_cast<std::size_t>(n);
  }
  if (symbols > spec.memory_budget_symbols)
    throw validation_error("codebook of " + std::to_string(symbols) +
                           " symbols exceeds the memory budget of " +
                           std::to_string(spec.memory_budget_symbols));

  Rng rng(derive_seed(spec.seed, 0));
  cb.cloud.resize(cb.common_messages * static_cast<std::size_t>(n));
  for (std::size_t w0 = 0; w0 < cb.common_messages; ++w0)
    for (int t = 0; t < n; ++t)
      cb.cloud[w0 * static_cast<std::size_t>(n) + static_cast<std::size_t>(t)] =
          static_cast<std::uint8_t>(draw_from_row(spec.law.p_u, rng));

  cb.satellites.resize(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    auto& sat = cb.satellites[static_cast<std::size_t>(i)];
    const std::size_t mi = cb.private_messages[static_cast<std::size_t>(i)];
    sat.resize(cb.common_messages * mi * static_cast<std::size_t>(n));
    for (std::size_t w0 = 0; w0 < cb.common_messages; ++w0)
      for (std::size_t wi = 0; wi < mi; ++wi)
        for (int t = 0; t < n; ++t) {
          const int u = cb.cloud[w0 * static_cast<std::size_t>(n) + static_cast<std::size_t>(t)];
          sat[(w0 * mi + wi) * static_cast<std::size_t>(n) + static_cast<std::size_t>(t)] =
              static_cast<std::uint8_t>(draw_from_row(
                  spec.law.conditional[static_cast<std::size_t>(i)][static_cast<std::size_t>(u)], rng));
        }
  }
  return cb;
}

DecodeResult transmit_and_decode(const Codebook& cb, const MessageTuple& messages,
                                 std::uint64_t seed) {
  const int n = cb.spec.blocklength;
  const int p = cb.spec.channel.num_tx();
  const int q = cb.spec.channel.num_rx();
  if (messages.common >= cb.common_messages ||
      static_cast<int>(messages.privates.size()) != p)
    throw validation_error("message tuple out of range");
  for (int i = 0; i < p; ++i)
    if (messages.privates[static_cast<std::size_t>(i)] >=
        cb.private_messages[static_cast<std::size_t>(i)])
      throw validation_error("message tuple out of range");

  // channel pass
  std::vector<std::size_t> joint_x(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    std::size_t x = 0, stride = 1;
    for (int i = 0; i < p; ++i) {
      const std::size_t mi = cb.private_messages[static_cast<std::size_t>(i)];
      const std::uint8_t xi =
          cb.satellites[static_cast<std::size_t>(i)]
                       [(messages.common * mi + messages.privates[static_cast<std::size_t>(i)]) *
                            static_cast<std::size_t>(n) + static_cast<std::size_t>(t)];
      x += stride * xi;
      stride *= static_cast<std::size_t>(cb.spec.channel.input_sizes[static_cast<std::size_t>(i)]);
    }
    joint_x[static_cast<std::size_t>(t)] = x;
  }
  Rng rng(derive_seed(seed, 1));
  std::vector<std::vector<int>> y(static_cast<std::size_t>(q), std::vector<int>(static_cast<std::size_t>(n)));
  for (int t = 0; t < n; ++t) {
    const int joint_y = draw_from_row(cb.spec.channel.transition[joint_x[static_cast<std::size_t>(t)]], rng);
    std::size_t rest = static_cast<std::size_t>(joint_y);
    for (int j = 0; j < q; ++j) {
      y[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)] =
          static_cast<int>(rest % static_cast<std::size_t>(cb.spec.channel.output_sizes[static_cast<std::size_t>(j)]));
      rest /= static_cast<std::size_t>(cb.spec.channel.output_sizes[static_cast<std::size_t>(j)]);
    }
  }

  DecodeResult result;
  result.per_receiver.resize(static_cast<std::size_t>(q));

  for (int j = 0; j < q; ++j) {
    const ReceiverContext ctx = make_context(cb, j);
    const auto& yj = y[static_cast<std::size_t>(j)];

    int found = 0;
    MessageTuple decoded;

    std::vector<int> uy_keys(static_cast<std::size_t>(n));
    std::vector<int> pair_keys(static_cast<std::size_t>(n));
    std::vector<int> scratch_uy(ctx.uy_window.size());
    std::vector<int> scratch_pair;
    std::vector<int> cell_counts(ctx.cell_count());
    std::vector<std::vector<std::size_t>> survivors(static_cast<std::size_t>(p));

    for (std::size_t w0 = 0; w0 < cb.common_messages && found < 2; ++w0) {
      const std::uint8_t* u_seq = &cb.cloud[w0 * static_cast<std::size_t>(n)];

      // cloud prefilter
      bool cloud_ok = true;
      for (int t = 0; t < n && cloud_ok; ++t) {
        const int key = u_seq[t] * ctx.ny + yj[static_cast<std::size_t>(t)];
        if (ctx.uy_zero[static_cast<std::size_t>(key)]) cloud_ok = false;
        uy_keys[static_cast<std::size_t>(t)] = key;
      }
      if (!cloud_ok || !counts_in_windows(uy_keys, ctx.uy_window, scratch_uy)) continue;

      // per-transmitter survivors under the implied pair windows
      bool any_empty = false;
      for (int i = 0; i < p && !any_empty; ++i) {
        auto& surv = survivors[static_cast<std::size_t>(i)];
        surv.clear();
        const std::size_t mi = cb.private_messages[static_cast<std::size_t>(i)];
        const auto& zero = ctx.pair_zero[static_cast<std::size_t>(i)];
        const auto& windows = ctx.pair_window[static_cast<std::size_t>(i)];
        scratch_pair.assign(windows.size(), 0);
        for (std::size_t wi = 0; wi < mi; ++wi) {
          const std::uint8_t* x_seq =
              &cb.satellites[static_cast<std::size_t>(i)][(w0 * mi + wi) * static_cast<std::size_t>(n)];
          bool ok = true;
          for (int t = 0; t < n; ++t) {
            const int key = (x_seq[t] * ctx.nu + u_seq[t]) * ctx.ny + yj[static_cast<std::size_t>(t)];
            if (zero[static_cast<std::size_t>(key)]) { ok = false; break; }
            pair_keys[static_cast<std::size_t>(t)] = key;
          }
          if (ok && counts_in_windows(pair_keys, windows, scratch_pair)) surv.push_back(wi);
        }
        if (surv.empty()) any_empty = true;
      }
      if (any_empty) continue;

      // exact joint check over the survivor product
      std::vector<std::size_t> pick(static_cast<std::size_t>(p), 0);
      for (;;) {
        std::fill(cell_counts.begin(), cell_counts.end(), 0);
        bool ok = true;
        for (int t = 0; t < n && ok; ++t) {
          std::size_t x = 0, stride = 1;
          for (int i = 0; i < p; ++i) {
            const std::size_t mi = cb.private_messages[static_cast<std::size_t>(i)];
            const std::size_t wi = survivors[static_cast<std::size_t>(i)][pick[static_cast<std::size_t>(i)]];
            x += stride * cb.satellites[static_cast<std::size_t>(i)]
                                       [(w0 * mi + wi) * static_cast<std::size_t>(n) + static_cast<std::size_t>(t)];
            stride *= static_cast<std::size_t>(ctx.input_sizes[static_cast<std::size_t>(i)]);
          }
          const std::size_t cell =
              (static_cast<std::size_t>(u_seq[t]) * stride + x) * static_cast<std::size_t>(ctx.ny) +
              static_cast<std::size_t>(yj[static_cast<std::size_t>(t)]);
          if (ctx.cell_zero[cell]) ok = false;
          ++cell_counts[cell];
        }
        if (ok) {
          for (std::size_t c = 0; c < cell_counts.size() && ok; ++c)
            if (cell_counts[c] < ctx.cell_window[c].lo || cell_counts[c] > ctx.cell_window[c].hi)
              ok = false;
        }
        if (ok) {
          ++found;
          if (found == 1) {
            decoded.common = w0;
            decoded.privates.resize(static_cast<std::size_t>(p));
            for (int i = 0; i < p; ++i)
              decoded.privates[static_cast<std::size_t>(i)] =
                  survivors[static_cast<std::size_t>(i)][pick[static_cast<std::size_t>(i)]];
          } else {
            break;  // several typical tuples: decoding failure
          }
        }
        int d = 0;
        while (d < p) {
          if (++pick[static_cast<std::size_t>(d)] < survivors[static_cast<std::size_t>(d)].size()) break;
          pick[static_cast<std::size_t>(d)] = 0;
          ++d;
        }
        if (d == p) break;
      }
    }

    if (found == 1) result.per_receiver[static_cast<std::size_t>(j)] = decoded;
  }
  return result;
}

std::vector<ErrorCurvePoint> error_curve(const CodebookSpec& spec_template,
                                         const std::vector<int>& blocklengths,
                                         std::size_t trials, std::uint64_t seed) {
  if (trials < 100) throw validation_error("error_curve needs at least 100 trials");
  constexpr double z = 1.959963984540054;  // Wilson 95%

  std::vector<ErrorCurvePoint> curve;
  for (int n : blocklengths) {
    CodebookSpec spec = spec_template;
    spec.blocklength = n;
    spec.seed = derive_seed(seed, 0x10000u + static_cast<std::uint64_t>(n));
    const Codebook cb = build_codebook(spec);
    const int p = spec.channel.num_tx();

    std::size_t errors = 0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
      const std::uint64_t trial_seed =
          derive_seed(seed, (static_cast<std::uint64_t>(n) << 40) | trial);
      Rng msg_rng(derive_seed(trial_seed, 2));
      MessageTuple sent;
      sent.common = draw_index(cb.common_messages, msg_rng);
      sent.privates.resize(static_cast<std::size_t>(p));
      for (int i = 0; i < p; ++i)
        sent.privates[static_cast<std::size_t>(i)] =
            draw_index(cb.private_messages[static_cast<std::size_t>(i)], msg_rng);

      const DecodeResult res = transmit_and_decode(cb, sent, trial_seed);
      bool any_wrong = false;
      for (const auto& dec : res.per_receiver)
        if (!dec || !(*dec == sent)) any_wrong = true;
      if (any_wrong) ++errors;
    }

    ErrorCurvePoint pt;
    pt.blocklength = n;
    pt.nominal_rates.push_back(spec.common_rate);
    for (double r : spec.private_rates) pt.nominal_rates.push_back(r);
    pt.realized_rates.push_back(cb.realized_common_rate());
    for (double r : cb.realized_private_rates()) pt.realized_rates.push_back(r);
    pt.trials = trials;
    pt.errors = errors;
    const double nn = static_cast<double>(trials);
    const double phat = static_cast<double>(errors) / nn;
    pt.error_rate = phat;
    const double denom = 1.0 + z * z / nn;
    const double center = (phat + z * z / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z * z / (4.0 * nn * nn)) / denom;
    pt.ci_low = std::max(0.0, center - half);
    pt.ci_high = std::min(1.0, center + half);
    curve.push_back(std::move(pt));
  }
  return curve;
}

}  // namespace coopmac
