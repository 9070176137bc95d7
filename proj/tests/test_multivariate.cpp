#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mixstable/analytics.hpp"
#include "mixstable/multivariate.hpp"
#include "mixstable/spd.hpp"
#include "mixstable/tests.hpp"
#include "test_util.hpp"

using namespace mixstable;

namespace {

const SpdMatrix kSigma = make_spd({{4, 2}, {2, 3}});

// entrywise sample second moments with standard errors
std::vector<Estimate> second_moments(const SampleBatch& b) {
  const std::size_t d = b.dim();
  std::vector<detail::RunningMoments> acc(d * d);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto x = b.row(i);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) acc[j * d + k].add(x[j] * x[k]);
  }
  std::vector<Estimate> out;
  for (const auto& a : acc) out.push_back({a.mean, a.se()});
  return out;
}

SampleBatch project(const SampleBatch& b, std::vector<double> t) {
  SampleBatch out(b.size(), 1);
  for (std::size_t i = 0; i < b.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) s += t[j] * b.row(i)[j];
    out[i] = s;
  }
  return out;
}

bool energy_pass(const SampleBatch& a, const SampleBatch& b) {
  EnergyOptions o;
  o.permutations = 300;
  return energy_test(a, b, o).pass;
}

}  // namespace

TEST(SpdMatrix, IdentityFactor) {
  const auto s = SpdMatrix::identity(2);
  EXPECT_EQ(s.factor()(0, 0), 1.0);
  EXPECT_EQ(s.factor()(1, 0), 0.0);
  EXPECT_EQ(s.factor()(1, 1), 1.0);
}

TEST(SpdMatrix, HandCholesky) {
  EXPECT_DOUBLE_EQ(kSigma.factor()(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(kSigma.factor()(1, 0), 1.0);
  EXPECT_NEAR(kSigma.factor()(1, 1), std::sqrt(2.0), 1e-15);
  const auto& a = kSigma.factor();
  const Eigen::MatrixXd back = a * a.transpose();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_LE(std::abs(back(i, j) - kSigma(i, j)), 1e-10 * 4.0);
}

TEST(SpdMatrix, Errors) {
  EXPECT_THROW(make_spd({{1, 2}, {2, 1}}), NotPositiveDefiniteError);
  EXPECT_THROW(make_spd({{1, 0.5}, {0.4, 1}}), ShapeError);
  EXPECT_THROW(make_spd({{1, 0}, {0}}), ShapeError);
}

TEST(MvNormal, Covariance) {
  for (const auto& s : {SpdMatrix::identity(2), kSigma}) {
    const auto b = sample_mv_normal(s, 1000000, RngStream(1));
    const auto m = second_moments(b);
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k) EXPECT_WITHIN_SE(m[j * 2 + k], s(j, k), 3.0);
  }
}

TEST(MvNormal, CharacteristicFunction) {
  const auto b = sample_mv_normal(kSigma, 1000000, RngStream(2));
  const std::vector<double> t{1.0, 0.0};
  const auto e = empirical_cf(b, t);
  EXPECT_LE(std::abs(e.value.real() - std::exp(-2.0)), 3.0 * e.se_re);
}

TEST(EcStable, AlphaTwoIsNormalTwoSigma) {
  const auto b = sample_ec_stable(2.0, kSigma, 1000000, RngStream(3));
  const auto m = second_moments(b);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t k = 0; k < 2; ++k) EXPECT_WITHIN_SE(m[j * 2 + k], 2.0 * kSigma(j, k), 3.0);
}

TEST(EcStable, ProjectionLaw) {
  const double alpha = 1.2;
  const auto y = project(sample_ec_stable(alpha, kSigma, 100000, RngStream(4, 0)), {1.0, 1.0});
  auto s = sample_symmetric_stable(alpha, 100000, RngStream(4, 1));
  const double scale = std::sqrt(kSigma.quadratic_form(std::vector<double>{1.0, 1.0}));
  for (auto& v : s.data()) v *= scale;
  EXPECT_TRUE(ks_two_sample(y, s).pass);
}

TEST(EcStable, UnitQuadraticFormCf) {
  const auto b = sample_ec_stable(1.3, kSigma, 1000000, RngStream(5));
  const std::vector<double> t{0.5, 0.0};  // t' Sigma t = 1
  const auto e = empirical_cf(b, t);
  EXPECT_LE(std::abs(e.value.real() - std::exp(-1.0)), 3.0 * e.se_re);
}

TEST(ScaleMixedStable, ConstantOneIsEcStable) {
  const auto a = sample_scale_mixed_stable(1.5, kSigma, MixerSpec::constant(1.0), 3000, RngStream(6, 0));
  const auto b = sample_ec_stable(1.5, kSigma, 3000, RngStream(6, 1));
  EXPECT_TRUE(energy_pass(a, b));
  const std::vector<double> t{0.3, -0.2};
  EXPECT_EQ(cf_scale_mixed(1.5, kSigma, MixerSpec::constant(1.0), t), cf(MultivariateSpec{EcStable{1.5, kSigma}}, t).real());
}

TEST(ScaleMixedStable, ExponentialMixerIsLinnik) {
  const auto a = sample_scale_mixed_stable(1.4, kSigma, MixerSpec::of(Exponential{}), 3000, RngStream(7, 0));
  const auto b = sample_mv_linnik(1.4, kSigma, Route::NormalMixtureRoute, 3000, RngStream(7, 1));
  EXPECT_TRUE(energy_pass(a, b));
}

TEST(ScaleMixedStable, GammaMixerIsGenLinnik) {
  const auto a = sample_scale_mixed_stable(1.4, kSigma, MixerSpec::of(Gamma{2.5}), 3000, RngStream(8, 0));
  const auto b = sample_mv_gen_linnik(1.4, kSigma, 2.5, Route::NormalMixtureRoute, 3000, RngStream(8, 1));
  EXPECT_TRUE(energy_pass(a, b));
}

TEST(ScaleMixedStable, ProjectionConsistency) {
  const double alpha = 1.5;
  const auto mixer = MixerSpec::of(Gamma{0.8});
  const auto y = project(sample_scale_mixed_stable(alpha, kSigma, mixer, 100000, RngStream(9, 0)), {1.0, -2.0});
  auto s = sample_symmetric_stable(alpha, 100000, RngStream(9, 1));
  const auto u = sample(mixer, 100000, RngStream(9, 2));
  const double scale = std::sqrt(kSigma.quadratic_form(std::vector<double>{1.0, -2.0}));
  for (std::size_t i = 0; i < s.size(); ++i) s.data()[i] *= scale * std::pow(u[i], 1.0 / alpha);
  EXPECT_TRUE(ks_two_sample(y, s).pass);
}

TEST(ScaleMixedStable, TheoremOneWithExponentialAndGammaMixers) {
  // Y_{a',1}^{1/a} S(a,Sigma,0) = Y_{a a',Sigma,0}
  const double a = 1.6, ap = 0.6;
  for (const auto& mixer : {MixerSpec::of(Exponential{}), MixerSpec::of(Gamma{2.0})}) {
    const auto lhs = sample_scale_mixed_stable(a * ap, kSigma, mixer, 3000, RngStream(10, 0));
    auto rhs = sample_ec_stable(a, kSigma, 3000, RngStream(10, 1));
    const auto u = sample(mixer, 3000, RngStream(10, 2));
    const auto s = sample_one_sided_stable(ap, 3000, RngStream(10, 3));
    for (std::size_t i = 0; i < rhs.size(); ++i) {
      const double f = std::pow(std::pow(u[i], 1.0 / ap) * s[i], 1.0 / a);
      for (auto& v : rhs.row(i)) v *= f;
    }
    EXPECT_TRUE(energy_pass(lhs, rhs)) << describe(mixer);
  }
}

TEST(ScaleMixedStable, FiniteMeanCovarianceAtAlphaTwo) {
  // alpha = 2 with mean-1.5 mixer: covariance 2 * 1.5 * Sigma
  const auto b = sample_scale_mixed_stable(2.0, kSigma, MixerSpec::of(Gamma{3.0, 2.0}), 1000000, RngStream(11));
  const auto m = second_moments(b);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t k = 0; k < 2; ++k) EXPECT_WITHIN_SE(m[j * 2 + k], 3.0 * kSigma(j, k), 3.0);
}

TEST(ScaleMixedStable, SecondMomentDivergesBelowTwo) {
  // running second moment of a heavy-tailed law keeps growing along n
  const auto b = sample_ec_stable(1.2, SpdMatrix::identity(2), 1 << 20, RngStream(12));
  double sum = 0.0, last = 0.0;
  int increases = 0;
  std::size_t next = 1 << 10;
  for (std::size_t i = 0; i < b.size(); ++i) {
    sum += b.row(i)[0] * b.row(i)[0];
    if (i + 1 == next) {
      increases += sum / static_cast<double>(next) > last;
      last = sum / static_cast<double>(next);
      next <<= 2;
    }
  }
  EXPECT_GE(increases, 4);
}

TEST(MvLaplace, CfAndCovariance) {
  const auto b = sample_mv_laplace(kSigma, 1000000, RngStream(13));
  const std::vector<double> t{0.5, 0.0};
  const auto e = empirical_cf(b, t);
  EXPECT_LE(std::abs(e.value.real() - 0.5), 3.0 * e.se_re);
  const auto m = second_moments(b);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t k = 0; k < 2; ++k) EXPECT_WITHIN_SE(m[j * 2 + k], 2.0 * kSigma(j, k), 3.0);
}

TEST(MvLaplace, OneDimensionalConstruction) {
  const auto a = sample_mv_laplace(SpdMatrix::identity(1), 100000, RngStream(14, 0));
  auto w = sample(Exponential{}, 100000, RngStream(14, 1));
  const auto x = sample(Normal{}, 100000, RngStream(14, 2));
  for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = std::sqrt(2.0 * w[i]) * x[i];
  EXPECT_TRUE(ks_two_sample(a, w).pass);
}

TEST(MvLinnik, RoutesAgree) {
  const auto a = sample_mv_linnik(1.3, kSigma, Route::StableRoute, 20000, RngStream(15, 0));
  const auto b = sample_mv_linnik(1.3, kSigma, Route::NormalMixtureRoute, 20000, RngStream(15, 1));
  EXPECT_TRUE(energy_pass(a, b));
}

TEST(MvLinnik, UnitCf) {
  const auto b = sample_mv_linnik(1.3, kSigma, Route::NormalMixtureRoute, 1000000, RngStream(16));
  const auto e = empirical_cf(b, std::vector<double>{0.5, 0.0});
  EXPECT_LE(std::abs(e.value.real() - 0.5), 3.0 * e.se_re);
}

TEST(MvLinnik, AlphaTwoIsLaplace) {
  const auto a = sample_mv_linnik(2.0, kSigma, Route::StableRoute, 3000, RngStream(17, 0));
  const auto b = sample_mv_laplace(kSigma, 3000, RngStream(17, 1));
  EXPECT_TRUE(energy_pass(a, b));
}

TEST(MvGenLinnik, NuOneIsLinnik) {
  const auto a = sample_mv_gen_linnik(1.5, kSigma, 1.0, Route::NormalMixtureRoute, 3000, RngStream(18, 0));
  const auto b = sample_mv_linnik(1.5, kSigma, Route::StableRoute, 3000, RngStream(18, 1));
  EXPECT_TRUE(energy_pass(a, b));
}

TEST(MvGenLinnik, UnitCf) {
  const double nu = 2.5;
  const auto b = sample_mv_gen_linnik(1.5, kSigma, nu, Route::NormalMixtureRoute, 1000000, RngStream(19));
  const auto e = empirical_cf(b, std::vector<double>{0.5, 0.0});
  EXPECT_LE(std::abs(e.value.real() - std::pow(2.0, -nu)), 3.0 * e.se_re);
}

TEST(MvGenLinnik, RoutesAgree) {
  const auto a = sample_mv_gen_linnik(1.5, kSigma, 2.5, Route::StableRoute, 20000, RngStream(20, 0));
  const auto b = sample_mv_gen_linnik(1.5, kSigma, 2.5, Route::NormalMixtureRoute, 20000, RngStream(20, 1));
  EXPECT_TRUE(energy_pass(a, b));
}

TEST(Multivariate, EllipticalSymmetryUnderRotation) {
  const auto a = sample_mv_gen_linnik(1.2, SpdMatrix::identity(2), 0.7, Route::NormalMixtureRoute, 3000, RngStream(21, 0));
  auto b = sample_mv_gen_linnik(1.2, SpdMatrix::identity(2), 0.7, Route::NormalMixtureRoute, 3000, RngStream(21, 1));
  RngStream rng(21, 2);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double th = 2.0 * std::numbers::pi * rng.uniform();
    auto r = b.row(i);
    const double x = r[0], y = r[1];
    r[0] = std::cos(th) * x - std::sin(th) * y;
    r[1] = std::sin(th) * x + std::cos(th) * y;
  }
  EXPECT_TRUE(energy_pass(a, b));
}

TEST(Multivariate, MultiplicationTheoremInThreeDimensions) {
  const auto s3 = make_spd({{2, 0.5, 0.2}, {0.5, 1, 0.3}, {0.2, 0.3, 1.5}});
  const double a = 1.6, ap = 0.5;
  const auto lhs = sample_ec_stable(a * ap, s3, 3000, RngStream(22, 0));
  auto rhs = sample_ec_stable(a, s3, 3000, RngStream(22, 1));
  const auto s = sample_one_sided_stable(ap, 3000, RngStream(22, 2));
  for (std::size_t i = 0; i < rhs.size(); ++i)
    for (auto& v : rhs.row(i)) v *= std::pow(s[i], 1.0 / a);
  EXPECT_TRUE(energy_pass(lhs, rhs));
}

TEST(Multivariate, DimensionsOneThroughFive) {
  for (std::size_t d : {1u, 2u, 3u, 5u}) {
    std::vector<double> diag(d, 1.5);
    const auto b = sample_mv_gen_linnik(1.7, SpdMatrix::diagonal(diag), 1.2, Route::NormalMixtureRoute, 2000, RngStream(23));
    EXPECT_EQ(b.dim(), d);
    for (double v : b.values()) ASSERT_TRUE(std::isfinite(v));
  }
}

TEST(Multivariate, LogSpaceKeepsExtremeProductsFinite) {
  // alpha = 0.3 products overflow naive arithmetic now and then
  const auto b = sample_ec_stable(0.3, kSigma, 50000, RngStream(24));
  for (double v : b.values()) ASSERT_TRUE(std::isfinite(v));
  EXPECT_LT(b.meta.redraws, 50u);
}

TEST(Multivariate, Validation) {
  EXPECT_THROW(sample_ec_stable(2.5, kSigma, 10, RngStream(1)), ParameterDomainError);
  EXPECT_THROW(sample_mv_gen_linnik(1.5, kSigma, -1.0, Route::StableRoute, 10, RngStream(1)), ParameterDomainError);
  EXPECT_THROW(sample_scale_mixed_stable(1.5, kSigma, MixerSpec::of(Normal{}), 10, RngStream(1)), ParameterDomainError);
}
