#include "coopmac/region.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "coopmac/errors.hpp"

namespace coopmac {

void WeightVector::validate() const {
  bool any_positive = false;
  if (common_weight < 0.0) throw validation_error("weights must be nonnegative");
  any_positive = common_weight > 0.0;
  for (double w : private_weights) {
    if (w < 0.0) throw validation_error("weights must be nonnegative");
    any_positive = any_positive || w > 0.0;
  }
  if (!any_positive) throw validation_error("weight vector must have a positive entry");
}

std::string subset_to_string(SubsetMask mask) {
  std::ostringstream os;
  bool first = true;
  for (int k = 0; mask >> k; ++k) {
    if (!(mask & (SubsetMask{1} << k))) continue;
    if (!first) os << '+';
    os << (k + 1);
    first = false;
  }
  return os.str();
}

double RateConstraintSet::bound_for(SubsetMask mask) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : receivers)
    for (const auto& sb : r.subset_bounds)
      if (sb.mask == mask) best = std::min(best, sb.bound);
  return best;
}

double RateConstraintSet::total_bound() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : receivers) best = std::min(best, r.total_bound);
  return best;
}

namespace {

// per-receiver effective subset bounds (min over duplicate masks)
std::vector<double> receiver_mask_bounds(const RateConstraintSet::Receiver& r, int num_tx) {
  const SubsetMask full = (SubsetMask{1} << num_tx) - 1;
  std::vector<double> a(full + 1, std::numeric_limits<double>::infinity());
  for (const auto& sb : r.subset_bounds) {
    if (sb.mask == 0 || sb.mask > full)
      throw validation_error("subset bound mask out of range");
    a[sb.mask] = std::min(a[sb.mask], sb.bound);
  }
  for (SubsetMask m = 1; m <= full; ++m)
    if (!std::isfinite(a[m]))
      throw validation_error("missing bound for subset " + subset_to_string(m));
  a[0] = 0.0;
  return a;
}

}  // namespace

void RateConstraintSet::validate() const {
  if (num_tx < 1) throw validation_error("constraint set needs num_tx >= 1");
  if (receivers.empty()) throw validation_error("constraint set needs a receiver");
  const SubsetMask full = (SubsetMask{1} << num_tx) - 1;
  for (const auto& r : receivers) {
    for (const auto& sb : r.subset_bounds)
      if (!std::isfinite(sb.bound) || sb.bound < 0.0)
        throw validation_error("subset bounds must be finite and nonnegative");
    if (!std::isfinite(r.total_bound) || r.total_bound < 0.0)
      throw validation_error("total bound must be finite and nonnegative");
    const auto a = receiver_mask_bounds(r, num_tx);
    for (SubsetMask m = 1; m <= full; ++m)
      for (int k = 0; k < num_tx; ++k) {
        const SubsetMask bigger = m | (SubsetMask{1} << k);
        if (bigger != m && a[m] > a[bigger] + kRateTol)
          throw validation_error("subset bounds not monotone: a(" + subset_to_string(m) +
                                 ") > a(" + subset_to_string(bigger) + ")");
      }
    if (includes_common_rate && a[full] > r.total_bound + kRateTol)
      throw validation_error("full-set bound exceeds the total (common-message) bound");
  }
}

MembershipResult membership(const RatePoint& point, const RateConstraintSet& constraints) {
  if (static_cast<int>(point.private_rates.size()) != constraints.num_tx)
    throw validation_error("rate point dimension mismatch");
  if (point.common_rate && !constraints.includes_common_rate && *point.common_rate > 0.0)
    throw validation_error("point carries a common rate but the region has none");
  if (point.common_or_zero() < -kRateTol)
    throw validation_error("rate points must be nonnegative");
  for (double r : point.private_rates)
    if (r < -kRateTol) throw validation_error("rate points must be nonnegative");

  double sum_all = 0.0;
  for (double r : point.private_rates) sum_all += r;
  const double r0 = constraints.includes_common_rate ? point.common_or_zero() : 0.0;

  for (std::size_t j = 0; j < constraints.receivers.size(); ++j) {
    const auto& rec = constraints.receivers[j];
    for (const auto& sb : rec.subset_bounds) {
      double lhs = 0.0;
      for (int k = 0; k < constraints.num_tx; ++k)
        if (sb.mask & (SubsetMask{1} << k)) lhs += point.private_rates[static_cast<std::size_t>(k)];
      if (lhs > sb.bound + kRateTol) {
        return {false,
                ConstraintViolation{static_cast<int>(j), false, sb.mask, sb.bound, lhs}};
      }
    }
    const double lhs_total = r0 + sum_all;
    if (lhs_total > rec.total_bound + kRateTol) {
      return {false,
              ConstraintViolation{static_cast<int>(j), true, 0, rec.total_bound, lhs_total}};
    }
  }
  return {};
}

std::string ConstraintViolation::describe() const {
  std::ostringstream os;
  os << "receiver " << (receiver + 1) << ": ";
  if (is_total)
    os << "total bound";
  else
    os << "subset {" << subset_to_string(mask) << "} bound";
  os << " " << bound << " violated by sum " << lhs;
  return os.str();
}

RateConstraintSet effective_bounds(const RateConstraintSet& constraints) {
  constraints.validate();
  const SubsetMask full = (SubsetMask{1} << constraints.num_tx) - 1;
  RateConstraintSet out;
  out.num_tx = constraints.num_tx;
  out.includes_common_rate = constraints.includes_common_rate;
  out.receivers.resize(1);
  auto& rec = out.receivers[0];
  for (SubsetMask m = 1; m <= full; ++m)
    rec.subset_bounds.push_back({m, constraints.bound_for(m)});
  rec.total_bound = constraints.total_bound();
  return out;
}

namespace {

// Solves the d x d system via Gaussian elimination; false if singular.
bool solve_square(std::vector<double> a, std::vector<double> b, int d, std::vector<double>& x) {
  for (int col = 0; col < d; ++col) {
    int pivot = col;
    for (int r = col + 1; r < d; ++r)
      if (std::abs(a[static_cast<std::size_t>(r) * d + col]) >
          std::abs(a[static_cast<std::size_t>(pivot) * d + col]))
        pivot = r;
    if (std::abs(a[static_cast<std::size_t>(pivot) * d + col]) < 1e-12) return false;
    if (pivot != col) {
      for (int c = 0; c < d; ++c)
        std::swap(a[static_cast<std::size_t>(pivot) * d + c],
                  a[static_cast<std::size_t>(col) * d + c]);
      std::swap(b[static_cast<std::size_t>(pivot)], b[static_cast<std::size_t>(col)]);
    }
    const double inv = 1.0 / a[static_cast<std::size_t>(col) * d + col];
    for (int r = 0; r < d; ++r) {
      if (r == col) continue;
      const double factor = a[static_cast<std::size_t>(r) * d + col] * inv;
      if (factor == 0.0) continue;
      for (int c = col; c < d; ++c)
        a[static_cast<std::size_t>(r) * d + c] -= factor * a[static_cast<std::size_t>(col) * d + c];
      b[static_cast<std::size_t>(r)] -= factor * b[static_cast<std::size_t>(col)];
    }
  }
  x.resize(static_cast<std::size_t>(d));
  for (int r = 0; r < d; ++r)
    x[static_cast<std::size_t>(r)] = b[static_cast<std::size_t>(r)] /
                                     a[static_cast<std::size_t>(r) * d + r];
  return true;
}

RatePoint to_rate_point(const std::vector<double>& x, bool includes_common) {
  RatePoint p;
  std::size_t offset = 0;
  if (includes_common) {
    p.common_rate = x[0];
    offset = 1;
  }
  p.private_rates.assign(x.begin() + static_cast<std::ptrdiff_t>(offset), x.end());
  return p;
}

bool points_close(const RatePoint& a, const RatePoint& b) {
  if (std::abs(a.common_or_zero() - b.common_or_zero()) > kRateTol) return false;
  for (std::size_t i = 0; i < a.private_rates.size(); ++i)
    if (std::abs(a.private_rates[i] - b.private_rates[i]) > kRateTol) return false;
  return true;
}

bool point_less(const RatePoint& a, const RatePoint& b) {
  if (a.common_or_zero() != b.common_or_zero()) return a.common_or_zero() < b.common_or_zero();
  return a.private_rates < b.private_rates;
}

}  // namespace

std::vector<RatePoint> vertices(const RateConstraintSet& constraints) {
  if (constraints.num_tx > 3)
    throw capability_error(
        "vertex enumeration limited to p <= 3; use support_value for larger p");
  const RateConstraintSet eff = effective_bounds(constraints);
  const auto& rec = eff.receivers[0];
  const int d = constraints.num_tx + (constraints.includes_common_rate ? 1 : 0);
  const std::size_t offset = constraints.includes_common_rate ? 1 : 0;

  // halfspaces rows: a . x <= c
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (int i = 0; i < d; ++i) {  // -x_i <= 0
    std::vector<double> row(static_cast<std::size_t>(d), 0.0);
    row[static_cast<std::size_t>(i)] = -1.0;
    rows.push_back(std::move(row));
    rhs.push_back(0.0);
  }
  for (const auto& sb : rec.subset_bounds) {
    std::vector<double> row(static_cast<std::size_t>(d), 0.0);
    for (int k = 0; k < constraints.num_tx; ++k)
      if (sb.mask & (SubsetMask{1} << k)) row[offset + static_cast<std::size_t>(k)] = 1.0;
    rows.push_back(std::move(row));
    rhs.push_back(sb.bound);
  }
  {
    std::vector<double> row(static_cast<std::size_t>(d), 1.0);
    rows.push_back(std::move(row));
    rhs.push_back(rec.total_bound);
  }

  const int n = static_cast<int>(rows.size());
  std::vector<RatePoint> found;
  std::vector<int> comb(static_cast<std::size_t>(d));
  // iterate all d-subsets of constraints
  std::function<void(int, int)> recurse = [&](int start, int depth) {
    if (depth == d) {
      std::vector<double> a(static_cast<std::size_t>(d) * d), b(static_cast<std::size_t>(d)), x;
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c)
          a[static_cast<std::size_t>(r) * d + c] = rows[static_cast<std::size_t>(comb[static_cast<std::size_t>(r)])][static_cast<std::size_t>(c)];
        b[static_cast<std::size_t>(r)] = rhs[static_cast<std::size_t>(comb[static_cast<std::size_t>(r)])];
      }
      if (!solve_square(std::move(a), std::move(b), d, x)) return;
      for (double& v : x) {
        if (v < -kRateTol) return;  // outside the nonnegative orthant
        if (std::abs(v) < 1e-12) v = 0.0;
      }
      const RatePoint p = to_rate_point(x, constraints.includes_common_rate);
      if (!membership(p, eff)) return;
      for (const auto& q : found)
        if (points_close(p, q)) return;
      found.push_back(p);
      return;
    }
    for (int i = start; i <= n - (d - depth); ++i) {
      comb[static_cast<std::size_t>(depth)] = i;
      recurse(i + 1, depth + 1);
    }
  };
  recurse(0, 0);

  std::sort(found.begin(), found.end(), point_less);
  return found;
}

SupportResult support_value(const RateConstraintSet& constraints, const WeightVector& w) {
  w.validate();
  if (static_cast<int>(w.private_weights.size()) != constraints.num_tx)
    throw validation_error("weight vector dimension mismatch");
  const auto verts = vertices(constraints);
  SupportResult best;
  best.value = -std::numeric_limits<double>::infinity();
  double best_sum = -std::numeric_limits<double>::infinity();
  for (const auto& v : verts) {
    double val = constraints.includes_common_rate ? w.common_weight * v.common_or_zero() : 0.0;
    double sum = v.common_or_zero();
    for (int k = 0; k < constraints.num_tx; ++k) {
      val += w.private_weights[static_cast<std::size_t>(k)] *
             v.private_rates[static_cast<std::size_t>(k)];
      sum += v.private_rates[static_cast<std::size_t>(k)];
    }
    // ties resolved toward the largest coordinate sum so the argmax is
    // Pareto-maximal on its own face
    if (val > best.value + kRateTol || (val > best.value - kRateTol && sum > best_sum)) {
      best.value = std::max(val, best.value);
      best_sum = sum;
      best.argmax = v;
    }
  }
  return best;
}

SubmodularityResult check_submodular(const RateConstraintSet& constraints) {
  if (constraints.num_tx > 4)
    throw capability_error("submodularity check limited to p <= 4");
  const SubsetMask full = (SubsetMask{1} << constraints.num_tx) - 1;
  for (std::size_t j = 0; j < constraints.receivers.size(); ++j) {
    auto a = receiver_mask_bounds(constraints.receivers[j], constraints.num_tx);
    for (SubsetMask m1 = 1; m1 <= full; ++m1)
      for (SubsetMask m2 = m1; m2 <= full; ++m2) {
        const double lhs = a[m1] + a[m2];
        const double rhs = a[m1 | m2] + a[m1 & m2];
        if (lhs + kRateTol < rhs) {
          return {false, static_cast<int>(j), m1, m2, rhs - lhs};
        }
      }
  }
  return {};
}

}  // namespace coopmac
