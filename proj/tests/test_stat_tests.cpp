#include <gtest/gtest.h>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

#include <cmath>

#include "mixstable/analytics.hpp"
#include "mixstable/multivariate.hpp"
#include "mixstable/tests.hpp"
#include "mixstable/univariate.hpp"

using namespace mixstable;

namespace {

const SpdMatrix kSigma = make_spd({{4, 2}, {2, 3}});

double kolmogorov_series(double lambda) {
  double s = 0.0;
  for (int k = 1; k <= 200; ++k) s += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return s;
}

std::vector<std::vector<double>> grid2() {
  std::vector<std::vector<double>> g;
  for (double r : {0.15, 0.4})
    for (int k = 0; k < 4; ++k) {
      const double th = k * std::numbers::pi / 4.0;
      g.push_back({r * std::cos(th), r * std::sin(th)});
    }
  return g;
}

}  // namespace

TEST(Kolmogorov, MatchesAlternatingSeries) {
  for (double l : {0.3, 0.5, 0.8, 1.0, 1.36, 1.63, 2.0, 3.0}) EXPECT_NEAR(kolmogorov_q(l), kolmogorov_series(l), 1e-12) << l;
  EXPECT_NEAR(kolmogorov_q(1.358), 0.05, 1e-3);
  EXPECT_EQ(kolmogorov_q(0.0), 1.0);
}

TEST(Ks, IdenticalBatches) {
  const auto a = sample(Exponential{}, 1000, RngStream(1));
  const auto r = ks_two_sample(a, a);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_TRUE(r.pass);
}

TEST(Ks, StatisticByBruteForce) {
  const auto a = sample(Normal{}, 300, RngStream(2));
  const auto b = sample(Laplace{}, 200, RngStream(3));
  double d = 0.0;
  for (const auto* s : {&a, &b})
    for (double x : s->values()) {
      double fa = 0, fb = 0;
      for (double v : a.values()) fa += v <= x;
      for (double v : b.values()) fb += v <= x;
      d = std::max(d, std::abs(fa / 300.0 - fb / 200.0));
    }
  EXPECT_DOUBLE_EQ(ks_two_sample(a, b).statistic, d);
}

TEST(Ks, DetectsShapeDifference) {
  const auto r = ks_two_sample(sample(Exponential{}, 10000, RngStream(4)), sample(Gamma{2.0, 2.0}, 10000, RngStream(5)));
  EXPECT_LT(r.p_value, 1e-6);
  EXPECT_FALSE(r.pass);
}

TEST(Ks, NullPValuesRoughlyUniform) {
  int below = 0;
  const int reps = 400;
  for (int i = 0; i < reps; ++i) {
    const auto r = ks_two_sample(sample(Normal{}, 500, RngStream(6, 2 * i)), sample(Normal{}, 700, RngStream(6, 2 * i + 1)));
    below += r.p_value < 0.1;
  }
  // Binomial(400, 0.1): mean 40, sd 6
  EXPECT_GT(below, 40 - 20);
  EXPECT_LT(below, 40 + 20);
}

TEST(Ks, Errors) {
  EXPECT_THROW(ks_two_sample(sample(Normal{}, 99, RngStream(7)), sample(Normal{}, 500, RngStream(8))), ParameterDomainError);
  const auto mv = sample(MvNormal{kSigma}, 500, RngStream(9));
  EXPECT_THROW(ks_two_sample(mv, mv), DimensionMismatchError);
}

TEST(KsDistance, AgainstExactCdf) {
  const std::vector<double> x{0.1, 0.5, 0.9};
  // uniform cdf: maximal gap is at 0.1 (1/3 - 0.1) or 0.5 (0.5 - 1/3) or 0.9 (1 - 0.9)
  EXPECT_NEAR(ks_distance(x, [](double v) { return v; }), 0.2333333333333333, 1e-15);
}

TEST(Energy, SameBatchDoesNotReject) {
  const auto a = sample(MvNormal{kSigma}, 2000, RngStream(10));
  const auto r = energy_test(a, a, {.permutations = 200});
  EXPECT_GT(r.p_value, 0.5);
  EXPECT_TRUE(r.pass);
  ASSERT_TRUE(r.permutation_p_value.has_value());
}

TEST(Energy, DetectsScaleChange) {
  const auto a = sample(MvNormal{SpdMatrix::identity(2)}, 5000, RngStream(11));
  const auto b = sample(MvNormal{make_spd({{2, 0}, {0, 2}})}, 5000, RngStream(12));
  const auto r = energy_test(a, b, {.permutations = 200});
  EXPECT_LT(r.p_value, 1e-3);
  EXPECT_FALSE(r.pass);
}

TEST(Energy, ExactPathDetectsLocationShift) {
  const auto a = sample(Normal{}, 500, RngStream(13));
  auto shifted = sample(Normal{}, 500, RngStream(14));
  for (auto& v : shifted.data()) v += 0.5;
  const auto r = energy_test(a, shifted, {.permutations = 200});
  EXPECT_LT(r.p_value, 1e-3);
}

TEST(Energy, HeavyTailsAreHandled) {
  const auto a = sample(EcStable{0.7, kSigma}, 3000, RngStream(15));
  const auto b = sample(EcStable{0.7, kSigma}, 3000, RngStream(16));
  const auto r = energy_test(a, b, {.permutations = 200});
  EXPECT_TRUE(std::isfinite(r.statistic));
  EXPECT_TRUE(r.pass);
}

TEST(Energy, StatisticIsDeterministic) {
  const auto a = sample(MvLaplace{kSigma}, 1500, RngStream(17));
  const auto b = sample(MvLaplace{kSigma}, 1500, RngStream(18));
  EXPECT_EQ(energy_test(a, b, {.permutations = 200}).p_value, energy_test(a, b, {.permutations = 200}).p_value);
}

TEST(Energy, NullTailRecoversSkewedLaw) {
  // a shifted gamma(1.5) null whose skewness differs from the 2 sd / mean a
  // two-moment fit would assume
  const boost::math::gamma_distribution<> g(1.5, 0.7);
  RngStream rng(23);
  std::vector<double> null(200000);
  for (auto& v : null) v = boost::math::quantile(g, rng.uniform()) - 0.5;
  for (double q : {1e-2, 1e-3, 1e-4}) {
    const double x = boost::math::quantile(boost::math::complement(g, q)) - 0.5;
    EXPECT_NEAR(std::log(detail::gamma_tail(x, null)), std::log(q), 0.15) << q;
  }
  EXPECT_EQ(detail::gamma_tail(-10.0, null), 1.0);
}

TEST(Energy, Errors) {
  const auto a = sample(MvNormal{kSigma}, 600, RngStream(19));
  const auto u = sample(Normal{}, 600, RngStream(20));
  EXPECT_THROW(energy_test(a, u, {.permutations = 200}), DimensionMismatchError);
  EXPECT_THROW(energy_test(a, sample(MvNormal{kSigma}, 499, RngStream(21))), ParameterDomainError);
  EXPECT_THROW(energy_test(a, a, {.permutations = 199}), ParameterDomainError);
}

TEST(CfDistance, CriticalValue) {
  const boost::math::normal_distribution<double> z;
  EXPECT_NEAR(cf_critical_value(1), 3.0, 5e-3);
  EXPECT_NEAR(cf_critical_value(16), boost::math::quantile(z, 1.0 - 0.0027 / 32.0), 1e-12);
}

TEST(CfDistance, GenLinnikPasses) {
  const MultivariateSpec spec = MvGenLinnik{1.4, kSigma, 2.0};
  const auto b = sample(spec, 100000, RngStream(22));
  const auto r = cf_distance_test(b, [&](std::span<const double> t) { return cf(spec, t); }, grid2());
  EXPECT_TRUE(r.pass) << r.statistic;
  EXPECT_LT(r.statistic, cf_critical_value(16));
}

TEST(CfDistance, NormalPassesAndScaleErrorFails) {
  const MultivariateSpec spec = MvNormal{kSigma};
  const auto ok = sample(spec, 100000, RngStream(23));
  const auto bad = sample(MultivariateSpec{MvNormal{make_spd({{8, 4}, {4, 6}})}}, 100000, RngStream(24));
  const auto f = [&](std::span<const double> t) { return cf(spec, t); };
  EXPECT_TRUE(cf_distance_test(ok, f, grid2()).pass);
  const auto r = cf_distance_test(bad, f, grid2());
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.statistic, 10.0);
}

TEST(CfDistance, Errors) {
  const auto b = sample(MvNormal{kSigma}, 100, RngStream(25));
  EXPECT_THROW(cf_distance_test(b, [](std::span<const double>) { return Complex(1.0); }, {}), ParameterDomainError);
}

TEST(Holm, StepDownAdjustment) {
  std::vector<TestReport> r(4);
  const double p[] = {0.01, 0.04, 0.03, 0.005};
  for (int i = 0; i < 4; ++i) {
    r[i].p_value = p[i];
    r[i].level = 0.05;
  }
  holm_adjust(r);
  EXPECT_DOUBLE_EQ(*r[3].adjusted_p_value, 0.02);
  EXPECT_DOUBLE_EQ(*r[0].adjusted_p_value, 0.03);
  EXPECT_DOUBLE_EQ(*r[2].adjusted_p_value, 0.06);
  EXPECT_DOUBLE_EQ(*r[1].adjusted_p_value, 0.06);
  EXPECT_TRUE(r[3].pass == false && r[0].pass == false && r[2].pass && r[1].pass);
}

TEST(Holm, AdjustedNeverBelowRawAndCappedAtOne) {
  std::vector<TestReport> r(5);
  for (int i = 0; i < 5; ++i) r[i].p_value = 0.3 + 0.1 * i;
  holm_adjust(r);
  for (const auto& x : r) {
    EXPECT_GE(*x.adjusted_p_value, x.p_value);
    EXPECT_LE(*x.adjusted_p_value, 1.0);
  }
}
