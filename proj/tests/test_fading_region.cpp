#include <doctest.h>

#include <cmath>
#include <vector>

#include "coopmac/errors.hpp"
#include "coopmac/fading_region.hpp"
#include "coopmac/rng.hpp"

using namespace coopmac;

namespace {

FadingChannelSpec unit_fading_two_user(double p1 = 1.0, double p2 = 1.0) {
  StateSample ones(1, 2);
  ones(0, 0) = ones(0, 1) = 1.0;
  FadingChannelSpec spec;
  spec.num_tx = 2;
  spec.num_rx = 1;
  spec.noise_var = {1.0};
  spec.power_budget = {p1, p2};
  spec.fading = FadingDistribution::deterministic(std::move(ones));
  return spec;
}

FadingChannelSpec rayleigh_two_user(double p1, double p2) {
  FadingChannelSpec spec;
  spec.num_tx = 2;
  spec.num_rx = 1;
  spec.noise_var = {1.0};
  spec.power_budget = {p1, p2};
  spec.fading = FadingDistribution::rayleigh();
  return spec;
}

const Engine kSmallMc = McEngine{256, 9};
const double kC2 = 0.5 * std::log2(3.0);  // C(2)
const double kC4 = 0.5 * std::log2(5.0);  // C(4)

}  // namespace

TEST_CASE("zero power collapses the region to the origin") {
  const auto spec = unit_fading_two_user();
  const auto q = CsitQuantizer::no_csit(2);
  const auto policy = TransmitPolicy::constant({0.0, 0.0}, {0.0, 0.0});
  const auto set = region_cm(spec, q, policy, kSmallMc);
  CHECK(set.bound_for(0b01) == 0.0);
  CHECK(set.bound_for(0b10) == 0.0);
  CHECK(set.bound_for(0b11) == 0.0);
  CHECK(set.total_bound() == 0.0);
  const auto verts = vertices(set);
  REQUIRE(verts.size() == 1);
  CHECK(verts[0].common_or_zero() == 0.0);
}

TEST_CASE("awgn pentagon under unit fading, uncorrelated signals") {
  const auto spec = unit_fading_two_user();
  const auto set = region_cm(spec, CsitQuantizer::no_csit(2),
                             TransmitPolicy::constant({1.0, 1.0}, {0.0, 0.0}), kSmallMc);
  CHECK(set.bound_for(0b01) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(set.bound_for(0b10) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(set.bound_for(0b11) == doctest::Approx(kC2).epsilon(1e-12));
  CHECK(set.total_bound() == doctest::Approx(kC2).epsilon(1e-12));
}

TEST_CASE("fully correlated signals carry only the common message") {
  const auto spec = unit_fading_two_user();
  const auto set = region_cm(spec, CsitQuantizer::no_csit(2),
                             TransmitPolicy::constant({1.0, 1.0}, {1.0, 1.0}), kSmallMc);
  CHECK(set.bound_for(0b01) == 0.0);
  CHECK(set.bound_for(0b10) == 0.0);
  CHECK(set.bound_for(0b11) == 0.0);
  CHECK(set.total_bound() == doctest::Approx(kC4).epsilon(1e-12));
}

TEST_CASE("policy budget validation") {
  const auto spec = unit_fading_two_user();
  const auto q = CsitQuantizer::no_csit(2);
  CHECK_THROWS_AS(
      region_cm(spec, q, TransmitPolicy::constant({1.5, 1.0}, {0.0, 0.0}), kSmallMc),
      validation_error);
  // a csit-dependent table is budgeted in expectation, not per symbol
  FadingChannelSpec ray = rayleigh_two_user(1.0, 1.0);
  CsitQuantizer thresh;
  thresh.maps.push_back(CsitQuantizer::threshold(0, 0, {0.8326}));  // median of the law
  thresh.maps.push_back({});
  TransmitPolicy policy;
  policy.tx.resize(2);
  policy.tx[0].power_table = {0.4, 1.6};
  policy.tx[0].correlation_table = {0.0, 0.0};
  policy.tx[1].power_table = {1.0};
  policy.tx[1].correlation_table = {0.0};
  CHECK_NOTHROW(region_cm(ray, thresh, policy, QuadEngine{32}));
  policy.tx[0].power_table = {0.4, 2.8};  // E[phi] = 1.6 > 1
  CHECK_THROWS_AS(region_cm(ray, thresh, policy, QuadEngine{32}), validation_error);
}

TEST_CASE("emitted sets satisfy the structural region invariants") {
  const auto spec = rayleigh_two_user(2.0, 1.0);
  Rng rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    CsitQuantizer q;
    q.maps.push_back(CsitQuantizer::threshold(0, 0, {0.5 + rng.uniform()}));
    q.maps.push_back(CsitQuantizer::threshold(0, 1, {0.5 + rng.uniform()}));
    TransmitPolicy policy;
    policy.tx.resize(2);
    for (int i = 0; i < 2; ++i) {
      const double budget = spec.power_budget[static_cast<std::size_t>(i)];
      const double frac = 0.2 + 0.6 * rng.uniform();
      // split the budget across the two cells; cell probabilities are found
      // by the same engine the builder uses, so scale by a conservative 1/2
      policy.tx[static_cast<std::size_t>(i)].power_table = {2.0 * budget * frac * 0.5,
                                                            2.0 * budget * (1.0 - frac) * 0.5};
      policy.tx[static_cast<std::size_t>(i)].correlation_table = {rng.uniform(), rng.uniform()};
    }
    RateConstraintSet set;
    try {
      set = region_cm(spec, q, policy, QuadEngine{24});
    } catch (const validation_error&) {
      continue;  // unlucky split vs. the true cell mass; not what we test here
    }
    CHECK(check_submodular(set).submodular);  // validate() ran inside the builder
  }
}

TEST_CASE("raising correlation shrinks private bounds and grows the total") {
  const auto spec = rayleigh_two_user(2.0, 1.0);
  const auto q = CsitQuantizer::no_csit(2);
  const Engine engine = QuadEngine{32};
  double prev_a = -1.0, prev_b = -1.0;
  for (double rho : {0.0, 0.3, 0.6, 0.9, 1.0}) {
    const auto set = region_cm(spec, q, TransmitPolicy::constant({2.0, 1.0}, {rho, rho}), engine);
    const double a = set.bound_for(0b11);
    const double b = set.total_bound();
    if (prev_a >= 0.0) {
      CHECK(a <= prev_a + 1e-12);
      CHECK(b >= prev_b - 1e-12);
    }
    prev_a = a;
    prev_b = b;
  }
}

TEST_CASE("specialization chain: no-csit wrappers agree exactly") {
  const auto spec = rayleigh_two_user(100.0, 100.0);
  const Engine engine = McEngine{20000, 77};
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const double rho1 = rng.uniform();
    const double rho2 = rng.uniform();
    const auto direct = region_cm(spec, CsitQuantizer::no_csit(2),
                                  TransmitPolicy::constant({100.0, 100.0}, {rho1, rho2}), engine);
    const auto wrapped = region_no_csit(spec, rho1, rho2, engine);
    CHECK(std::abs(direct.bound_for(0b01) - wrapped.bound_for(0b01)) < 1e-12);
    CHECK(std::abs(direct.bound_for(0b10) - wrapped.bound_for(0b10)) < 1e-12);
    CHECK(std::abs(direct.bound_for(0b11) - wrapped.bound_for(0b11)) < 1e-12);
    CHECK(std::abs(direct.total_bound() - wrapped.total_bound()) < 1e-12);

    ConferencingSpec zero;
    const auto conf = region_no_csit(spec, rho1, rho2, engine, &zero);
    CHECK(std::abs(conf.bound_for(0b01) - direct.bound_for(0b01)) < 1e-12);
    CHECK(std::abs(conf.bound_for(0b11) - direct.bound_for(0b11)) < 1e-12);
    CHECK(std::abs(conf.total_bound() - direct.total_bound()) < 1e-12);
    CHECK_FALSE(conf.includes_common_rate);
  }
}

TEST_CASE("conferencing region bounds carry the link credits") {
  const auto spec = unit_fading_two_user();
  const auto q = CsitQuantizer::no_csit(2);
  const auto policy = TransmitPolicy::constant({1.0, 1.0}, {0.0, 0.0});
  ConferencingSpec conf{0.25, 0.5};
  const auto terms = two_user_bound_terms(spec, q, policy, kSmallMc);
  const auto set = region_conf(spec, q, policy, conf, kSmallMc);
  CHECK(set.bound_for(0b01) == doctest::Approx(terms.r1 + 0.25).epsilon(1e-12));
  CHECK(set.bound_for(0b10) == doctest::Approx(terms.r2 + 0.5).epsilon(1e-12));
  CHECK(set.bound_for(0b11) == doctest::Approx(terms.sum + 0.75).epsilon(1e-12));
  CHECK(set.total_bound() == doctest::Approx(terms.coop).epsilon(1e-12));

  CHECK_THROWS_AS(region_conf(rayleigh_two_user(1.0, 1.0), q, policy,
                              ConferencingSpec{-0.1, 0.0}, kSmallMc),
                  validation_error);
}

TEST_CASE("large links turn the region into the cooperative triangle") {
  const auto spec = unit_fading_two_user();
  const auto q = CsitQuantizer::no_csit(2);
  // rho = 1 maximizes the cooperative bound; links beyond it cannot help
  const auto policy = TransmitPolicy::constant({1.0, 1.0}, {1.0, 1.0});
  ConferencingSpec conf{kC4, kC4};
  const auto set = region_conf(spec, q, policy, conf, kSmallMc);
  // membership scan: only the uncredited sum constraint binds
  for (double r1 = 0.0; r1 <= kC4 + 0.1; r1 += 0.01)
    for (double r2 = 0.0; r2 <= kC4 + 0.1; r2 += 0.01) {
      RatePoint pt;
      pt.private_rates = {r1, r2};
      CHECK(membership(pt, set).member == (r1 + r2 <= kC4 + 1e-9));
    }
}

TEST_CASE("conferencing reduction corner test matches membership") {
  const auto spec = rayleigh_two_user(4.0, 2.0);
  const auto q = CsitQuantizer::no_csit(2);
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const auto policy =
        TransmitPolicy::constant({4.0, 2.0}, {rng.uniform(), rng.uniform()});
    ConferencingSpec conf{0.8 * rng.uniform(), 0.8 * rng.uniform()};
    const Engine engine = QuadEngine{24};
    const auto terms = two_user_bound_terms(spec, q, policy, engine);
    const auto set = region_conf(spec, q, policy, conf, engine);
    const double span = terms.coop + conf.c12 + conf.c21 + 0.2;
    for (int i = 0; i < 500; ++i) {
      const double r1 = span * rng.uniform();
      const double r2 = span * rng.uniform();
      RatePoint pt;
      pt.private_rates = {r1, r2};
      CHECK(conferencing_reduction_check(r1, r2, conf, terms) == membership(pt, set).member);
    }
    // beyond the uncredited sum bound no link capacity helps
    CHECK_FALSE(conferencing_reduction_check(terms.coop, terms.coop, ConferencingSpec{50.0, 50.0},
                                             terms));
  }
}

TEST_CASE("max common rate") {
  CHECK(max_common_rate(unit_fading_two_user(), kSmallMc) ==
        doctest::Approx(kC4).epsilon(1e-12));

  // matches the rho = 1 total bound of the region builder
  const auto spec = rayleigh_two_user(3.0, 2.0);
  const auto via_region = region_cm(spec, CsitQuantizer::no_csit(2),
                                    TransmitPolicy::constant({3.0, 2.0}, {1.0, 1.0}),
                                    QuadEngine{48});
  CHECK(max_common_rate(spec, QuadEngine{48}) ==
        doctest::Approx(via_region.total_bound()).epsilon(1e-12));

  // fixed power sum: the symmetric split maximizes the common rate
  double best = -1.0, best_split = -1.0;
  for (double p1 : {40.0, 80.0, 100.0, 120.0, 160.0}) {
    const double v = max_common_rate(rayleigh_two_user(p1, 200.0 - p1), QuadEngine{48});
    if (v > best) {
      best = v;
      best_split = p1;
    }
  }
  CHECK(best_split == 100.0);
}

TEST_CASE("compensation capacity") {
  // unit fading, alpha = 1/2, P1 = 2, P2 = 1: C(1 / 1.5)
  const auto spec = unit_fading_two_user(2.0, 1.0);
  CHECK(compensation_capacity(0.5, spec, kSmallMc) ==
        doctest::Approx(0.5 * std::log2(1.0 + 2.0 / 3.0)).epsilon(1e-12));

  // vanishing alpha gives a vanishing link
  CHECK(compensation_capacity(1e-9, rayleigh_two_user(200.0, 100.0), QuadEngine{32}) < 1e-6);

  CHECK_THROWS_AS(compensation_capacity(1.0, spec, kSmallMc), validation_error);
  CHECK_THROWS_AS(compensation_capacity(0.0, spec, kSmallMc), validation_error);
}

TEST_CASE("correlation coefficient") {
  const auto spec = rayleigh_two_user(2.0, 1.0);
  const auto q = CsitQuantizer::no_csit(2);
  // constants factor out of the expectation ratio
  const auto policy = TransmitPolicy::constant({2.0, 1.0}, {0.6, 0.5});
  CHECK(correlation_coefficient(policy, 0, 1, spec, q, QuadEngine{24}) ==
        doctest::Approx(0.3).epsilon(1e-9));

  const auto uncorr = TransmitPolicy::constant({2.0, 1.0}, {0.0, 0.7});
  CHECK(correlation_coefficient(uncorr, 0, 1, spec, q, QuadEngine{24}) == 0.0);

  const auto silent = TransmitPolicy::constant({0.0, 1.0}, {0.5, 0.5});
  CHECK_THROWS_AS(correlation_coefficient(silent, 0, 1, spec, q, QuadEngine{24}),
                  validation_error);
  CHECK_THROWS_AS(correlation_coefficient(policy, 1, 1, spec, q, QuadEngine{24}),
                  validation_error);
}

TEST_CASE("gaussian signaling statistics") {
  const auto spec = rayleigh_two_user(2.0, 1.0);
  const auto q = CsitQuantizer::no_csit(2);

  // rho = 1 with equal power makes both signals equal the common carrier
  const auto coherent = TransmitPolicy::constant({1.0, 1.0}, {1.0, 1.0});
  auto samples = gaussian_signal_samples(coherent, rayleigh_two_user(1.0, 1.0), q, 100, 3);
  for (const auto& g : samples) {
    CHECK(g.x[0] == doctest::Approx(g.u).epsilon(1e-12));
    CHECK(g.x[1] == doctest::Approx(g.u).epsilon(1e-12));
  }

  // signal power matches the allocated power in expectation
  CsitQuantizer thresh;
  thresh.maps.push_back(CsitQuantizer::threshold(0, 0, {1.0}));
  thresh.maps.push_back({});
  TransmitPolicy policy;
  policy.tx.resize(2);
  policy.tx[0].power_table = {1.0, 2.0};
  policy.tx[0].correlation_table = {0.2, 0.8};
  policy.tx[1].power_table = {1.0};
  policy.tx[1].correlation_table = {0.5};

  const std::size_t n = 200000;
  samples = gaussian_signal_samples(policy, spec, thresh, n, 11);
  for (int i = 0; i < 2; ++i) {
    double sum2 = 0.0, sum4 = 0.0;
    for (const auto& g : samples) {
      const double x2 = g.x[static_cast<std::size_t>(i)] * g.x[static_cast<std::size_t>(i)];
      sum2 += x2;
      sum4 += x2 * x2;
    }
    const double mean = sum2 / static_cast<double>(n);
    const double se = std::sqrt((sum4 / n - mean * mean) / static_cast<double>(n));
    // P(S11 > 1) = exp(-1) under the Rayleigh law, so E[phi_1] is closed-form
    const double tail = std::exp(-1.0);
    const double expected = i == 0 ? 1.0 * (1.0 - tail) + 2.0 * tail : 1.0;
    CHECK(std::abs(mean - expected) < 3.0 * se + 1e-6);
  }

  // empirical pairwise correlation matches the closed form, batched errors
  const double tail = std::exp(-1.0);
  const double r_formula = 0.5 * (0.2 * (1.0 - tail) + 0.8 * std::sqrt(2.0) * tail) /
                           std::sqrt(1.0 + tail);
  CHECK(r_formula >= 0.0);
  CHECK(r_formula <= 1.0);
  const std::size_t batch = 10000, nbatch = 20;
  double rsum = 0.0, rsq = 0.0;
  for (std::size_t b = 0; b < nbatch; ++b) {
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t k = b * batch; k < (b + 1) * batch; ++k) {
      sxy += samples[k].x[0] * samples[k].x[1];
      sxx += samples[k].x[0] * samples[k].x[0];
      syy += samples[k].x[1] * samples[k].x[1];
    }
    const double r = sxy / std::sqrt(sxx * syy);
    rsum += r;
    rsq += r * r;
  }
  const double rmean = rsum / nbatch;
  const double rse = std::sqrt((rsq / nbatch - rmean * rmean) / (nbatch - 1.0));
  CHECK(std::abs(rmean - r_formula) < 3.0 * rse + 1e-3);
}

TEST_CASE("frontier recovers the analytic corners") {
  const auto spec = rayleigh_two_user(9.0, 4.0);
  const auto q = CsitQuantizer::no_csit(2);
  const Engine engine = QuadEngine{32};
  PolicyGrid grid{5, 0};  // rho in {0, .25, .5, .75, 1}

  WeightVector common_only;
  common_only.common_weight = 1.0;
  common_only.private_weights = {0.0, 0.0};
  WeightVector sum_only;
  sum_only.private_weights = {1.0, 1.0};

  const auto points = frontier(spec, q, {common_only, sum_only}, grid, engine);
  REQUIRE(points.size() == 2);
  CHECK(points[0].value == doctest::Approx(max_common_rate(spec, engine)).epsilon(1e-9));
  const auto terms =
      two_user_bound_terms(spec, q, TransmitPolicy::constant({9.0, 4.0}, {0.0, 0.0}), engine);
  CHECK(points[1].value == doctest::Approx(terms.sum).epsilon(1e-9));

  // frontier points are feasible in their own regions and mutually
  // non-dominated
  std::vector<WeightVector> fan;
  for (int i = 0; i <= 8; ++i) {
    WeightVector w;
    w.private_weights = {std::cos(i * M_PI / 16.0), std::sin(i * M_PI / 16.0)};
    fan.push_back(w);
  }
  const auto pts = frontier(spec, q, fan, grid, engine);
  for (const auto& a : pts)
    for (const auto& b : pts) {
      if (&a == &b) continue;
      bool geq_all = true, gt_some = false;
      for (std::size_t k = 0; k < 2; ++k) {
        if (b.rates.private_rates[k] < a.rates.private_rates[k] - 1e-12) geq_all = false;
        if (b.rates.private_rates[k] > a.rates.private_rates[k] + 1e-9) gt_some = true;
      }
      const bool strictly_dominated = geq_all && gt_some;
      CHECK_FALSE(strictly_dominated);
    }

  CHECK_THROWS_AS(frontier(spec, q, {}, grid, engine), validation_error);
}
