#include "coopmac/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "coopmac/errors.hpp"

namespace coopmac {

namespace {

constexpr double kProbTol = 1e-12;

double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

// H(Y | A) from a joint table indexed [a][y]; 0 log 0 = 0 throughout.
double conditional_entropy(const std::vector<std::vector<double>>& joint) {
  double h = 0.0;
  for (const auto& row : joint) {
    const double pa = std::accumulate(row.begin(), row.end(), 0.0);
    if (pa <= 0.0) continue;
    for (double pay : row)
      if (pay > 0.0) h -= pay * std::log2(pay / pa);
  }
  return h;
}

}  // namespace

std::size_t DiscreteChannelSpec::joint_input_size() const {
  std::size_t n = 1;
  for (int s : input_sizes) n *= static_cast<std::size_t>(s);
  return n;
}

std::size_t DiscreteChannelSpec::joint_output_size() const {
  std::size_t n = 1;
  for (int s : output_sizes) n *= static_cast<std::size_t>(s);
  return n;
}

void DiscreteChannelSpec::validate() const {
  if (input_sizes.empty() || output_sizes.empty())
    throw validation_error("channel needs at least one input and one output");
  for (int s : input_sizes)
    if (s < 1) throw validation_error("input alphabet sizes must be >= 1");
  for (int s : output_sizes)
    if (s < 1) throw validation_error("output alphabet sizes must be >= 1");
  if (transition.size() != joint_input_size())
    throw validation_error("transition tensor must have one row per joint input");
  for (const auto& row : transition) {
    if (row.size() != joint_output_size())
      throw validation_error("transition row has wrong joint-output size");
    double sum = 0.0;
    for (double v : row) {
      if (v < 0.0) throw validation_error("transition probabilities must be nonnegative");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kProbTol)
      throw validation_error("conditional slice does not sum to 1 (got " + std::to_string(sum) +
                             ")");
  }
}

DiscreteChannelSpec DiscreteChannelSpec::binary_adder() {
  DiscreteChannelSpec c;
  c.input_sizes = {2, 2};
  c.output_sizes = {3};
  c.transition = {{1, 0, 0}, {0, 1, 0}, {0, 1, 0}, {0, 0, 1}};
  return c;
}

DiscreteChannelSpec DiscreteChannelSpec::binary_symmetric(double crossover) {
  DiscreteChannelSpec c;
  c.input_sizes = {2};
  c.output_sizes = {2};
  c.transition = {{1.0 - crossover, crossover}, {crossover, 1.0 - crossover}};
  return c;
}

void InputLaw::validate(const DiscreteChannelSpec& channel) const {
  const int p = channel.num_tx();
  if (p_u.empty()) throw validation_error("P_U must be nonempty");
  double su = 0.0;
  for (double v : p_u) {
    if (v < 0.0) throw validation_error("P_U entries must be nonnegative");
    su += v;
  }
  if (std::abs(su - 1.0) > 1e-9) throw validation_error("P_U must sum to 1");
  if (static_cast<int>(conditional.size()) != p)
    throw validation_error("law needs one conditional table per transmitter");
  for (int i = 0; i < p; ++i) {
    const auto& table = conditional[static_cast<std::size_t>(i)];
    if (static_cast<int>(table.size()) != u_size())
      throw validation_error("conditional table rows must match |U|");
    for (const auto& row : table) {
      if (static_cast<int>(row.size()) != channel.input_sizes[static_cast<std::size_t>(i)])
        throw validation_error("conditional row size mismatch");
      double s = 0.0;
      for (double v : row) {
        if (v < 0.0) throw validation_error("conditional entries must be nonnegative");
        s += v;
      }
      if (std::abs(s - 1.0) > 1e-9) throw validation_error("conditional rows must sum to 1");
    }
  }
  // auxiliary cardinality bound
  const std::size_t bound =
      channel.joint_input_size() + static_cast<std::size_t>(channel.num_rx()) * (std::size_t{1} << p) - 1;
  if (static_cast<std::size_t>(u_size()) > bound)
    throw validation_error("|U| exceeds the auxiliary cardinality bound " + std::to_string(bound));
}

InputLaw InputLaw::independent_uniform(const DiscreteChannelSpec& channel) {
  InputLaw law;
  law.p_u = {1.0};
  law.conditional.resize(static_cast<std::size_t>(channel.num_tx()));
  for (int i = 0; i < channel.num_tx(); ++i) {
    const int m = channel.input_sizes[static_cast<std::size_t>(i)];
    law.conditional[static_cast<std::size_t>(i)] = {
        std::vector<double>(static_cast<std::size_t>(m), 1.0 / m)};
  }
  return law;
}

namespace {

// Enumeration helpers over joint input indices (transmitter 1 fastest digit).
std::vector<int> digits_of(std::size_t joint, const std::vector<int>& sizes) {
  std::vector<int> d(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    d[i] = static_cast<int>(joint % static_cast<std::size_t>(sizes[i]));
    joint /= static_cast<std::size_t>(sizes[i]);
  }
  return d;
}

}  // namespace

RateConstraintSet region_for_law(const DiscreteChannelSpec& channel, const InputLaw& law) {
  channel.validate();
  law.validate(channel);
  const int p = channel.num_tx();
  const int q = channel.num_rx();
  if (p > 8) throw capability_error("region_for_law limited to p <= 8");
  const std::size_t nx = channel.joint_input_size();
  const std::size_t ny = channel.joint_output_size();
  const int nu = law.u_size();
  const SubsetMask full = (SubsetMask{1} << p) - 1;

  // p(u, x) over joint inputs
  std::vector<std::vector<double>> pux(static_cast<std::size_t>(nu),
                                       std::vector<double>(nx, 0.0));
  for (int u = 0; u < nu; ++u)
    for (std::size_t x = 0; x < nx; ++x) {
      const auto xs = digits_of(x, channel.input_sizes);
      double v = law.p_u[static_cast<std::size_t>(u)];
      for (int i = 0; i < p; ++i)
        v *= law.conditional[static_cast<std::size_t>(i)][static_cast<std::size_t>(u)]
                            [static_cast<std::size_t>(xs[static_cast<std::size_t>(i)])];
      pux[static_cast<std::size_t>(u)][x] = v;
    }

  RateConstraintSet set;
  set.num_tx = p;
  set.includes_common_rate = true;
  set.receivers.resize(static_cast<std::size_t>(q));

  for (int j = 0; j < q; ++j) {
    const int my = channel.output_sizes[static_cast<std::size_t>(j)];
    // marginal channel p_j(y_j | x)
    std::vector<std::vector<double>> pj(nx, std::vector<double>(static_cast<std::size_t>(my), 0.0));
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) {
        const auto ys = digits_of(y, channel.output_sizes);
        pj[x][static_cast<std::size_t>(ys[static_cast<std::size_t>(j)])] +=
            channel.transition[x][y];
      }

    // H(Y_j | X): channel noise entropy under the input marginal
    double h_y_given_x = 0.0;
    std::vector<double> py(static_cast<std::size_t>(my), 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
      double px = 0.0;
      for (int u = 0; u < nu; ++u) px += pux[static_cast<std::size_t>(u)][x];
      if (px <= 0.0) continue;
      for (int y = 0; y < my; ++y) {
        const double v = pj[x][static_cast<std::size_t>(y)];
        py[static_cast<std::size_t>(y)] += px * v;
        h_y_given_x -= px * xlog2x(v);
      }
    }
    double h_y = 0.0;
    for (double v : py) h_y -= xlog2x(v);

    auto& rec = set.receivers[static_cast<std::size_t>(j)];
    for (SubsetMask mask = 1; mask <= full; ++mask) {
      // joint p(u, x_{complement}, y_j); complement index packs the digits of
      // transmitters outside the subset
      std::size_t ncomp = 1;
      for (int i = 0; i < p; ++i)
        if (!(mask & (SubsetMask{1} << i)))
          ncomp *= static_cast<std::size_t>(channel.input_sizes[static_cast<std::size_t>(i)]);
      std::vector<std::vector<double>> joint(static_cast<std::size_t>(nu) * ncomp,
                                             std::vector<double>(static_cast<std::size_t>(my), 0.0));
      for (int u = 0; u < nu; ++u)
        for (std::size_t x = 0; x < nx; ++x) {
          const double puxv = pux[static_cast<std::size_t>(u)][x];
          if (puxv <= 0.0) continue;
          const auto xs = digits_of(x, channel.input_sizes);
          std::size_t comp = 0, stride = 1;
          for (int i = 0; i < p; ++i) {
            if (mask & (SubsetMask{1} << i)) continue;
            comp += stride * static_cast<std::size_t>(xs[static_cast<std::size_t>(i)]);
            stride *= static_cast<std::size_t>(channel.input_sizes[static_cast<std::size_t>(i)]);
          }
          auto& row = joint[static_cast<std::size_t>(u) * ncomp + comp];
          for (int y = 0; y < my; ++y)
            row[static_cast<std::size_t>(y)] += puxv * pj[x][static_cast<std::size_t>(y)];
        }
      const double bound = conditional_entropy(joint) - h_y_given_x;
      rec.subset_bounds.push_back({mask, std::max(0.0, bound)});
    }
    rec.total_bound = std::max(0.0, h_y - h_y_given_x);
  }
  set.validate();
  return set;
}

namespace {

// probability vectors with entries m/denominator, plus the exact uniform
std::vector<std::vector<double>> simplex_grid(int cells, int denominator) {
  std::vector<std::vector<double>> out;
  std::vector<int> comp(static_cast<std::size_t>(cells), 0);
  std::function<void(int, int)> gen = [&](int cell, int left) {
    if (cell == cells - 1) {
      comp[static_cast<std::size_t>(cell)] = left;
      std::vector<double> v(static_cast<std::size_t>(cells));
      for (int i = 0; i < cells; ++i)
        v[static_cast<std::size_t>(i)] =
            static_cast<double>(comp[static_cast<std::size_t>(i)]) / denominator;
      out.push_back(std::move(v));
      return;
    }
    for (int c = 0; c <= left; ++c) {
      comp[static_cast<std::size_t>(cell)] = c;
      gen(cell + 1, left - c);
    }
  };
  gen(0, denominator);
  if (denominator % cells != 0)
    out.push_back(std::vector<double>(static_cast<std::size_t>(cells), 1.0 / cells));
  return out;
}

bool dominates(const RatePoint& a, const RatePoint& b) {
  if (a.common_or_zero() < b.common_or_zero() - kRateTol) return false;
  for (std::size_t i = 0; i < a.private_rates.size(); ++i)
    if (a.private_rates[i] < b.private_rates[i] - kRateTol) return false;
  return true;
}

}  // namespace

std::vector<BruteForcePoint> brute_force_region(const DiscreteChannelSpec& channel,
                                                const BruteForceOptions& options) {
  channel.validate();
  const int p = channel.num_tx();
  if (p > 3) throw capability_error("brute_force_region collects vertices, so p <= 3");
  const std::size_t cardinality_bound =
      channel.joint_input_size() +
      static_cast<std::size_t>(channel.num_rx()) * (std::size_t{1} << p) - 1;
  const int u_cap = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(options.u_size_cap), cardinality_bound));
  if (u_cap < 1) throw validation_error("u_size_cap must be >= 1");

  // count the laws up front against the budget
  std::vector<std::size_t> row_choices(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i)
    row_choices[static_cast<std::size_t>(i)] =
        simplex_grid(channel.input_sizes[static_cast<std::size_t>(i)], options.grid_denominator)
            .size();
  double total = 0.0;
  for (int nu = 1; nu <= u_cap; ++nu) {
    double laws = static_cast<double>(simplex_grid(nu, options.grid_denominator).size());
    for (int i = 0; i < p; ++i)
      laws *= std::pow(static_cast<double>(row_choices[static_cast<std::size_t>(i)]), nu);
    total += laws;
  }
  if (total > static_cast<double>(options.law_budget))
    throw validation_error("enumeration budget exceeded: " + std::to_string(total) +
                           " laws > budget " + std::to_string(options.law_budget));

  std::vector<BruteForcePoint> frontier;
  auto offer = [&frontier](const RatePoint& pt, const InputLaw& law) {
    for (const auto& kept : frontier)
      if (dominates(kept.rates, pt)) return;
    std::erase_if(frontier,
                  [&pt](const BruteForcePoint& kept) { return dominates(pt, kept.rates); });
    frontier.push_back({pt, law});
  };

  for (int nu = 1; nu <= u_cap; ++nu) {
    const auto pu_grid = simplex_grid(nu, options.grid_denominator);
    std::vector<std::vector<std::vector<double>>> row_grid(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i)
      row_grid[static_cast<std::size_t>(i)] = simplex_grid(
          channel.input_sizes[static_cast<std::size_t>(i)], options.grid_denominator);

    // odometer over per-(transmitter, u) row choices
    std::vector<std::size_t> idx(static_cast<std::size_t>(p * nu), 0);
    for (const auto& pu : pu_grid) {
      std::fill(idx.begin(), idx.end(), 0);
      for (;;) {
        InputLaw law;
        law.p_u = pu;
        law.conditional.resize(static_cast<std::size_t>(p));
        for (int i = 0; i < p; ++i) {
          auto& table = law.conditional[static_cast<std::size_t>(i)];
          table.resize(static_cast<std::size_t>(nu));
          for (int u = 0; u < nu; ++u)
            table[static_cast<std::size_t>(u)] =
                row_grid[static_cast<std::size_t>(i)]
                        [idx[static_cast<std::size_t>(i * nu + u)]];
        }
        const RateConstraintSet set = region_for_law(channel, law);
        if (options.check_structure && !check_submodular(set).submodular)
          throw validation_error("non-submodular region encountered during enumeration");
        for (const auto& v : vertices(set)) offer(v, law);

        std::size_t d = 0;
        for (; d < idx.size(); ++d) {
          if (++idx[d] < row_grid[static_cast<std::size_t>(static_cast<int>(d) / nu)].size())
            break;
          idx[d] = 0;
        }
        if (d == idx.size()) break;
      }
    }
  }

  std::sort(frontier.begin(), frontier.end(), [](const BruteForcePoint& a, const BruteForcePoint& b) {
    if (a.rates.common_or_zero() != b.rates.common_or_zero())
      return a.rates.common_or_zero() < b.rates.common_or_zero();
    return a.rates.private_rates < b.rates.private_rates;
  });
  return frontier;
}

RateConstraintSet willems_region(const DiscreteChannelSpec& channel, const InputLaw& law,
                                 const ConferencingSpec& conf) {
  if (channel.num_tx() != 2 || channel.num_rx() != 1)
    throw capability_error("willems_region requires p = 2, q = 1");
  conf.validate();
  const RateConstraintSet cm = region_for_law(channel, law);
  RateConstraintSet set;
  set.num_tx = 2;
  set.includes_common_rate = false;
  set.receivers.resize(1);
  auto& rec = set.receivers[0];
  rec.subset_bounds.push_back({0b01, cm.bound_for(0b01) + conf.c12});
  rec.subset_bounds.push_back({0b10, cm.bound_for(0b10) + conf.c21});
  rec.subset_bounds.push_back({0b11, cm.bound_for(0b11) + conf.c12 + conf.c21});
  rec.total_bound = cm.total_bound();
  set.validate();
  return set;
}

}  // namespace coopmac
