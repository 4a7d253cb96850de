#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "coopmac/errors.hpp"
#include "coopmac/region.hpp"

using namespace coopmac;

namespace {

// the classic two-user pentagon, optionally with a common-message total bound
RateConstraintSet pentagon(double a1, double a2, double a12, double b, bool with_common) {
  RateConstraintSet set;
  set.num_tx = 2;
  set.includes_common_rate = with_common;
  set.receivers.resize(1);
  set.receivers[0].subset_bounds = {{0b01, a1}, {0b10, a2}, {0b11, a12}};
  set.receivers[0].total_bound = b;
  return set;
}

RatePoint point3(double r0, double r1, double r2) {
  RatePoint p;
  p.common_rate = r0;
  p.private_rates = {r1, r2};
  return p;
}

RatePoint point2(double r1, double r2) {
  RatePoint p;
  p.private_rates = {r1, r2};
  return p;
}

}  // namespace

TEST_CASE("membership on the hand pentagon") {
  const auto set = pentagon(0.5, 0.5, 0.79, 1.16, true);

  CHECK(membership(point3(0.0, 0.0, 0.0), set).member);

  const auto violated = membership(point3(0.0, 0.5, 0.5), set);
  CHECK_FALSE(violated.member);
  REQUIRE(violated.first_violation.has_value());
  CHECK(violated.first_violation->mask == 0b11);
  CHECK(violated.first_violation->lhs == doctest::Approx(1.0));

  CHECK(membership(point3(0.37, 0.3, 0.49), set).member);   // tight on both sums
  CHECK_FALSE(membership(point3(0.38, 0.3, 0.49), set).member);
}

TEST_CASE("membership rejects dimension mismatches") {
  const auto set = pentagon(1, 1, 1.5, 1.5, false);
  RatePoint wrong;
  wrong.private_rates = {0.1};
  CHECK_THROWS_AS(membership(wrong, set), validation_error);
  CHECK_THROWS_AS(membership(point3(0.1, 0.1, 0.1), set), validation_error);
  CHECK(membership(point2(0.5, 0.5), set).member);
}

TEST_CASE("effective bounds minimize over receivers") {
  auto set = pentagon(0.4, 0.6, 1.0, 1.2, true);
  set.receivers.push_back(set.receivers[0]);
  set.receivers[1].subset_bounds = {{0b01, 0.6}, {0b10, 0.5}, {0b11, 0.8}};
  set.receivers[1].total_bound = 1.1;

  const auto eff = effective_bounds(set);
  CHECK(eff.receivers.size() == 1);
  CHECK(eff.bound_for(0b01) == 0.4);
  CHECK(eff.bound_for(0b10) == 0.5);
  CHECK(eff.bound_for(0b11) == 0.8);
  CHECK(eff.total_bound() == 1.1);

  // single receiver: identity
  const auto single = effective_bounds(pentagon(0.4, 0.6, 1.0, 1.2, true));
  CHECK(single.bound_for(0b01) == 0.4);
  CHECK(single.total_bound() == 1.2);

  // membership equivalence on a grid
  for (double r1 = 0.0; r1 <= 1.0; r1 += 0.1)
    for (double r2 = 0.0; r2 <= 1.0; r2 += 0.1)
      CHECK(membership(point3(0.05, r1, r2), set).member ==
            membership(point3(0.05, r1, r2), eff).member);
}

TEST_CASE("vertices of an interval") {
  RateConstraintSet set;
  set.num_tx = 1;
  set.includes_common_rate = false;
  set.receivers.resize(1);
  set.receivers[0].subset_bounds = {{0b1, 0.5}};
  set.receivers[0].total_bound = 0.5;
  const auto v = vertices(set);
  REQUIRE(v.size() == 2);
  CHECK(v[0].private_rates[0] == 0.0);
  CHECK(v[1].private_rates[0] == doctest::Approx(0.5));
}

TEST_CASE("vertices of the pentagon") {
  const auto set = pentagon(1.0, 1.0, 1.5, 1.5, false);
  const auto v = vertices(set);
  REQUIRE(v.size() == 5);
  // sorted lexicographically
  CHECK(v[0].private_rates == std::vector<double>{0.0, 0.0});
  CHECK(v[1].private_rates == std::vector<double>{0.0, 1.0});
  CHECK(v[2].private_rates[0] == doctest::Approx(0.5));
  CHECK(v[2].private_rates[1] == doctest::Approx(1.0));
  CHECK(v[3].private_rates == std::vector<double>{1.0, 0.0});
  CHECK(v[4].private_rates[0] == doctest::Approx(1.0));
  CHECK(v[4].private_rates[1] == doctest::Approx(0.5));
  for (const auto& p : v) CHECK(membership(p, set).member);
}

TEST_CASE("common-message slices shrink linearly then hit the total face") {
  // b < a12 + headroom so the R0 budget eats the sum face
  const auto set = pentagon(0.5, 0.5, 0.79, 1.0, true);
  for (double r0 = 0.0; r0 <= 1.0 + 1e-12; r0 += 0.05) {
    // brute-force the largest feasible R1 + R2 on a fine grid
    double best = -1.0;
    for (double r1 = 0.0; r1 <= 0.6; r1 += 1e-3)
      for (double r2 = 0.0; r2 <= 0.6; r2 += 1e-3)
        if (membership(point3(r0, r1, r2), set).member) best = std::max(best, r1 + r2);
    const double expected = std::min(0.79, 1.0 - r0);
    if (expected < -1e-9) {
      CHECK(best < 0.0);
    } else {
      CHECK(best == doctest::Approx(std::max(0.0, expected)).epsilon(5e-3).scale(1.0));
    }
  }
}

TEST_CASE("grid membership matches the vertex hull in 2d") {
  const auto set = pentagon(0.6, 0.8, 1.1, 1.1, false);
  const auto verts = vertices(set);

  // convex polygon test: inside iff on the inner side of every hull edge
  auto in_hull = [&verts](double x, double y) {
    // gift-wrap order via angle around the centroid
    std::vector<std::pair<double, double>> pts;
    for (const auto& v : verts) pts.emplace_back(v.private_rates[0], v.private_rates[1]);
    double cx = 0, cy = 0;
    for (auto& p : pts) {
      cx += p.first;
      cy += p.second;
    }
    cx /= static_cast<double>(pts.size());
    cy /= static_cast<double>(pts.size());
    std::sort(pts.begin(), pts.end(), [cx, cy](const auto& a, const auto& b) {
      return std::atan2(a.second - cy, a.first - cx) < std::atan2(b.second - cy, b.first - cx);
    });
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& a = pts[i];
      const auto& b = pts[(i + 1) % pts.size()];
      const double cross = (b.first - a.first) * (y - a.second) - (b.second - a.second) * (x - a.first);
      if (cross < -1e-9) return false;
    }
    return true;
  };

  for (double x = 0.0; x <= 1.2; x += 0.01)
    for (double y = 0.0; y <= 1.2; y += 0.01)
      CHECK(membership(point2(x, y), set).member == in_hull(x, y));
}

TEST_CASE("vertex enumeration is limited to p <= 3") {
  RateConstraintSet set;
  set.num_tx = 4;
  set.includes_common_rate = false;
  set.receivers.resize(1);
  for (SubsetMask m = 1; m < 16; ++m) set.receivers[0].subset_bounds.push_back({m, 1.0});
  set.receivers[0].total_bound = 1.0;
  CHECK_THROWS_AS(vertices(set), capability_error);
}

TEST_CASE("support values") {
  const auto set = pentagon(1.0, 1.0, 1.5, 1.5, false);

  WeightVector w1;
  w1.private_weights = {1.0, 0.0};
  CHECK(support_value(set, w1).value == doctest::Approx(1.0));

  WeightVector sum_w;
  sum_w.private_weights = {1.0, 1.0};
  const auto sum_res = support_value(set, sum_w);
  CHECK(sum_res.value == doctest::Approx(1.5));
  CHECK(membership(sum_res.argmax, set).member);

  // common-message set: all weight on R0 reaches the total bound
  const auto cm = pentagon(0.5, 0.5, 0.79, 1.16, true);
  WeightVector w0;
  w0.common_weight = 1.0;
  w0.private_weights = {0.0, 0.0};
  CHECK(support_value(cm, w0).value == doctest::Approx(1.16));

  // positive homogeneity
  WeightVector scaled;
  scaled.private_weights = {2.0, 2.0};
  CHECK(support_value(set, scaled).value == doctest::Approx(3.0));

  // monotone under bound increase
  const auto bigger = pentagon(1.0, 1.0, 1.7, 1.7, false);
  CHECK(support_value(bigger, sum_w).value >= sum_res.value);

  WeightVector empty;
  empty.private_weights = {0.0, 0.0};
  CHECK_THROWS_AS(support_value(set, empty), validation_error);
}

TEST_CASE("submodularity checks") {
  // bounds generated by a concave function of subset sums
  const double c2 = 0.5 * std::log2(3.0);  // C(2)
  const auto good = pentagon(0.5, 0.5, c2, c2, false);
  CHECK(check_submodular(good).submodular);

  const auto bad = pentagon(0.1, 0.1, 0.5, 0.5, false);
  const auto res = check_submodular(bad);
  CHECK_FALSE(res.submodular);
  CHECK(res.lhs_a == 0b01);
  CHECK(res.lhs_b == 0b10);
}

TEST_CASE("constraint-set validation") {
  auto set = pentagon(0.5, 0.5, 0.4, 1.0, true);  // a12 < a1: not monotone
  CHECK_THROWS_AS(set.validate(), validation_error);

  auto negative = pentagon(0.5, 0.5, 0.8, -0.1, true);
  CHECK_THROWS_AS(negative.validate(), validation_error);

  auto total_low = pentagon(0.5, 0.5, 0.8, 0.7, true);  // a_full > b with common rate
  CHECK_THROWS_AS(total_low.validate(), validation_error);

  // the same shape is legal for conferencing sets (no common rate)
  auto conf = pentagon(0.5, 0.5, 0.8, 0.7, false);
  CHECK_NOTHROW(conf.validate());
}
