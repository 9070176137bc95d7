#pragma once

// Closed-form transforms, densities and moments, and their empirical
// counterparts with CLT standard errors.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixstable/batch.hpp"
#include "mixstable/error.hpp"
#include "mixstable/multivariate.hpp"
#include "mixstable/special.hpp"
#include "mixstable/univariate.hpp"

namespace mixstable {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Characteristic functions

/// Characteristic function E exp(i t X) of a univariate law.
inline Complex cf(const UnivariateSpec& spec, double t) {
  validate(spec);
  const double at = std::abs(t);
  const double sgn = t < 0.0 ? -1.0 : (t > 0.0 ? 1.0 : 0.0);
  return std::visit(
      overloaded{
          [&](const Normal&) { return Complex(std::exp(-0.5 * t * t), 0.0); },
          [&](const Exponential&) { return 1.0 / Complex(1.0, -t); },
          [&](const Gamma& g) { return std::pow(Complex(1.0, -t / g.rate), -g.shape); },
          [&](const OneSidedStable& s) {
            if (s.alpha == 1.0) return std::exp(Complex(0.0, t));
            const double phase = -0.5 * std::numbers::pi * s.alpha * sgn;
            return std::exp(-std::pow(at, s.alpha) * Complex(std::cos(phase), std::sin(phase)));
          },
          [&](const SymmetricStable& s) { return Complex(std::exp(-std::pow(at, s.alpha)), 0.0); },
          [&](const Laplace&) { return Complex(1.0 / (1.0 + t * t), 0.0); },
          [&](const Linnik& l) { return Complex(1.0 / (1.0 + std::pow(at, l.alpha)), 0.0); },
          [&](const GenLinnik& l) { return Complex(std::pow(1.0 + std::pow(at, l.alpha), -l.nu), 0.0); },
          [&](const auto&) -> Complex {
            throw UnsupportedFamilyError(describe(spec) + " has no closed-form characteristic function");
          },
      },
      spec);
}

// ---------------------------------------------------------------------------
// Densities

namespace detail {

inline double log_gamma_density(double x, double shape, double rate) {
  return shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x - std::lgamma(shape);
}

}  // namespace detail

/// Density of Z_{r,mu} at mu + u. Taking the offset directly keeps the
/// (z - mu)^{-r} singularity accurate for tiny u.
inline double mixed_exp_mixer_density_above(const MixedExpMixer& z, double u) {
  if (!(u > 0.0)) return 0.0;
  return std::exp(z.r * std::log(z.mu) - std::lgamma(1.0 - z.r) - std::lgamma(z.r) - z.r * std::log(u) - std::log(z.mu + u));
}

/// Density of a univariate law; 0 outside the support.
inline double density(const UnivariateSpec& spec, double x) {
  validate(spec);
  if (std::isnan(x)) throw ParameterDomainError("density argument is NaN");
  const double pi = std::numbers::pi;
  return std::visit(
      overloaded{
          [&](const Normal&) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi); },
          [&](const Exponential&) { return x < 0.0 ? 0.0 : std::exp(-x); },
          [&](const Gamma& g) {
            if (x < 0.0) return 0.0;
            if (x == 0.0) return g.shape < 1.0 ? std::numeric_limits<double>::infinity() : (g.shape == 1.0 ? g.rate : 0.0);
            return std::exp(detail::log_gamma_density(x, g.shape, g.rate));
          },
          [&](const GeneralizedGamma& g) {
            // X = G^{1/p}: f(x) = |p| x^{p-1} g(x^p)
            if (x <= 0.0) return 0.0;
            const double y = std::pow(x, g.power);
            if (!(y > 0.0) || !std::isfinite(y)) return 0.0;
            return std::exp(std::log(std::abs(g.power)) + (g.power - 1.0) * std::log(x) +
                            detail::log_gamma_density(y, g.shape, g.rate));
          },
          [&](const Weibull& w) {
            if (x < 0.0) return 0.0;
            if (x == 0.0) return w.shape < 1.0 ? std::numeric_limits<double>::infinity() : (w.shape == 1.0 ? 1.0 : 0.0);
            return w.shape * std::pow(x, w.shape - 1.0) * std::exp(-std::pow(x, w.shape));
          },
          [&](const MittagLeffler& m) { return mittag_leffler_density(m.delta, x); },
          [&](const MixedExpMixer& z) { return mixed_exp_mixer_density_above(z, x - z.mu); },
          [&](const SnedecorFisher& f) {
            if (x <= 0.0) return x < 0.0 ? 0.0 : (f.a < 1.0 ? std::numeric_limits<double>::infinity() : 0.0);
            const double lb = std::lgamma(f.a) + std::lgamma(f.b) - std::lgamma(f.a + f.b);
            return std::exp(f.a * std::log(f.a / f.b) + (f.a - 1.0) * std::log(x) -
                            (f.a + f.b) * std::log1p(f.a * x / f.b) - lb);
          },
          [&](const StableRatio& r) {
            if (x <= 0.0) return 0.0;
            if (r.delta == 1.0) throw UnsupportedFamilyError("stable-ratio(delta=1) is the constant 1 and has no density");
            const double xd = std::pow(x, r.delta);
            return std::sin(pi * r.delta) * xd / x /
                   (pi * (1.0 + xd * xd + 2.0 * xd * std::cos(pi * r.delta)));
          },
          [&](const Laplace&) { return 0.5 * std::exp(-std::abs(x)); },
          [&](const auto&) -> double {
            throw UnsupportedFamilyError(describe(spec) + " has no closed-form density");
          },
      },
      spec);
}

/// Integral of the density over its support, by double-exponential
/// quadrature. The Mittag-Leffler tail beyond `split` uses its exact
/// survival function.
inline double density_total_mass(const UnivariateSpec& spec) {
  using boost::math::quadrature::exp_sinh;
  using boost::math::quadrature::tanh_sinh;
  auto f = [&](double x) {
    const double v = density(spec, x);
    return std::isfinite(v) ? v : 0.0;
  };
  tanh_sinh<double> ts;
  exp_sinh<double> es;
  if (const auto* m = std::get_if<MittagLeffler>(&spec)) {
    if (m->delta < 1.0) {
      const double split = 50.0;
      double mass = 0.0;
      for (auto [a, b] : {std::pair{0.0, 1.0}, {1.0, 10.0}, {10.0, split}}) mass += ts.integrate(f, a, b, 1e-12);
      return mass + mittag_leffler_survival(m->delta, split);
    }
  }
  const bool real_line = std::holds_alternative<Normal>(spec) || std::holds_alternative<Laplace>(spec);
  double lo = 0.0;
  if (const auto* z = std::get_if<MixedExpMixer>(&spec)) {
    lo = z->mu;
    const double head = ts.integrate([&](double u) { return mixed_exp_mixer_density_above(*z, u); }, 0.0, 1.0, 1e-12);
    return head + ts.integrate(
                      [&](double w) {
                        const double v = mixed_exp_mixer_density_above(*z, 1.0 / w) / (w * w);
                        return std::isfinite(v) ? v : 0.0;
                      },
                      0.0, 1.0, 1e-12);
  }
  // tail [c, inf) mapped to (0, 1] by x = c / w, which turns power-law
  // tails into integrable endpoint singularities
  auto tail = [&](double c, double sign) {
    return ts.integrate(
        [&](double w) {
          const double v = f(sign * c / w) * c / (w * w);
          return std::isfinite(v) ? v : 0.0;
        },
        0.0, 1.0, 1e-12);
  };
  double mass = ts.integrate(f, lo, lo + 1.0, 1e-12) + tail(lo + 1.0, 1.0);
  if (real_line) mass += ts.integrate(f, -1.0, 0.0, 1e-12) + tail(1.0, -1.0);
  return mass;
}

// ---------------------------------------------------------------------------
// Laplace-Stieltjes transforms

/// E exp(-s X) for a nonnegative univariate law.
inline double lst(const UnivariateSpec& spec, double s) {
  validate(spec);
  if (!(s >= 0.0)) throw ParameterDomainError("LST argument must be >= 0");
  if (s == 0.0) {
    if (!is_nonnegative(spec)) throw UnsupportedFamilyError(describe(spec) + " is not a nonnegative law");
    return 1.0;
  }
  return std::visit(
      overloaded{
          [&](const Exponential&) { return 1.0 / (1.0 + s); },
          [&](const Gamma& g) { return std::pow(1.0 + s / g.rate, -g.shape); },
          [&](const OneSidedStable& o) { return std::exp(-std::pow(s, o.alpha)); },
          [&](const MittagLeffler& m) { return 1.0 / (1.0 + std::pow(s, m.delta)); },
          [&](const GenMittagLeffler& m) { return std::pow(1.0 + std::pow(s, m.delta), -m.nu); },
          // E exp(-s S/S') = E_delta(-s^delta)
          [&](const StableRatio& r) {
            return r.delta == 1.0 ? std::exp(-s) : mittag_leffler_function(r.delta, -std::pow(s, r.delta));
          },
          [&](const Geometric& g) {
            const double e = std::exp(-s);
            return g.p * e / (1.0 - (1.0 - g.p) * e);
          },
          [&](const NegativeBinomial& nb) {
            const double e = std::exp(-s);
            return e * std::pow(nb.p / (1.0 - (1.0 - nb.p) * e), nb.nu);
          },
          [&](const auto&) -> double {
            throw UnsupportedFamilyError(describe(spec) + " has no closed-form Laplace-Stieltjes transform");
          },
      },
      spec);
}

/// E exp(-s U) for a mixer. Gamma scale mixtures U = V G_nu use
/// E (1 + s V)^{-nu}, integrated against the density of V.
inline double lst(const MixerSpec& m, double s) {
  validate(m);
  if (!(s >= 0.0)) throw ParameterDomainError("LST argument must be >= 0");
  const double ss = s * m.scale;
  if (ss == 0.0) return 1.0;
  return std::visit(overloaded{
                        [&](const UnivariateSpec& u) { return lst(u, ss); },
                        [&](const ConstantMixer& c) { return std::exp(-ss * c.c); },
                        [&](const GammaScaleMixture& g) {
                          auto f = [&](double v) {
                            const double d = density(g.v, v);
                            const double r = std::isfinite(d) ? d * std::pow(1.0 + ss * v, -g.nu) : 0.0;
                            return std::isfinite(r) ? r : 0.0;
                          };
                          boost::math::quadrature::tanh_sinh<double> ts;
                          boost::math::quadrature::exp_sinh<double> es;
                          return ts.integrate(f, 0.0, 1.0, 1e-12) +
                                 es.integrate([&](double t) { return f(1.0 + t); }, 1e-12);
                        },
                    },
                    m.law);
}

/// Characteristic function of U^{1/alpha} S(alpha, Sigma, 0):
/// psi_U((t' Sigma t)^{alpha/2}).
inline double cf_scale_mixed(double alpha, const SpdMatrix& sigma, const MixerSpec& mixer, std::span<const double> t) {
  if (!detail::in_left_open(alpha, 0.0, 2.0)) throw ParameterDomainError("requires 0 < alpha <= 2");
  return lst(mixer, std::pow(sigma.quadratic_form(t), alpha / 2.0));
}

/// Characteristic function of a multivariate law; all are real (symmetric).
inline Complex cf(const MultivariateSpec& spec, std::span<const double> t) {
  validate(spec);
  const double q = sigma_of(spec).quadratic_form(t);
  const double v = std::visit(overloaded{
                                  [&](const MvNormal&) { return std::exp(-0.5 * q); },
                                  [&](const EcStable& s) { return std::exp(-std::pow(q, s.alpha / 2.0)); },
                                  [&](const ScaleMixedStable& s) { return lst(s.mixer, std::pow(q, s.alpha / 2.0)); },
                                  [&](const MvLaplace&) { return 1.0 / (1.0 + q); },
                                  [&](const MvLinnik& s) { return 1.0 / (1.0 + std::pow(q, s.alpha / 2.0)); },
                                  [&](const MvGenLinnik& s) { return std::pow(1.0 + std::pow(q, s.alpha / 2.0), -s.nu); },
                              },
                              spec);
  return {v, 0.0};
}

// ---------------------------------------------------------------------------
// Moments

/// Analytic moment value; infinite moments are a normal answer, not an error.
struct MomentValue {
  double value = 0.0;
  bool infinite = false;

  static MomentValue finite(double v) { return {v, false}; }
  static MomentValue infinity() { return {std::numeric_limits<double>::infinity(), true}; }
  bool operator==(const MomentValue&) const = default;
};

namespace detail {

inline double tg(double x) { return std::tgamma(x); }

/// E|S(alpha,0)|^beta for beta < alpha (any beta when alpha = 2).
inline double symmetric_stable_abs_moment(double alpha, double beta) {
  const double base = std::pow(2.0, beta) * tg((beta + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
  if (alpha == 2.0) return base;
  return base * tg(1.0 - beta / alpha) / tg(1.0 - beta / 2.0);
}

}  // namespace detail

/// E X^order for nonnegative laws, E|X|^order for real-valued ones.
inline MomentValue analytic_moment(const UnivariateSpec& spec, double order) {
  validate(spec);
  if (!(order >= 0.0) || !std::isfinite(order)) throw ParameterDomainError("moment order must be finite and >= 0");
  using detail::tg;
  const double b = order;
  if (b == 0.0) return MomentValue::finite(1.0);
  auto fin = MomentValue::finite;
  const auto inf = MomentValue::infinity();
  return std::visit(
      overloaded{
          [&](const Normal&) { return fin(std::pow(2.0, b / 2.0) * tg((b + 1.0) / 2.0) / std::sqrt(std::numbers::pi)); },
          [&](const Exponential&) { return fin(tg(1.0 + b)); },
          [&](const Gamma& g) { return fin(std::exp(std::lgamma(g.shape + b) - std::lgamma(g.shape) - b * std::log(g.rate))); },
          [&](const GeneralizedGamma& g) {
            const double e = b / g.power;
            if (g.shape + e <= 0.0) return inf;
            return fin(std::exp(std::lgamma(g.shape + e) - std::lgamma(g.shape) - e * std::log(g.rate)));
          },
          [&](const Weibull& w) { return fin(tg(1.0 + b / w.shape)); },
          [&](const OneSidedStable& s) {
            if (s.alpha == 1.0) return fin(1.0);
            if (b >= s.alpha) return inf;
            return fin(tg(1.0 - b / s.alpha) / tg(1.0 - b));
          },
          [&](const SymmetricStable& s) {
            if (s.alpha < 2.0 && b >= s.alpha) return inf;
            return fin(detail::symmetric_stable_abs_moment(s.alpha, b));
          },
          [&](const MittagLeffler& m) {
            if (m.delta == 1.0) return fin(tg(1.0 + b));
            if (b >= m.delta) return inf;
            return fin(tg(1.0 - b / m.delta) * tg(1.0 + b / m.delta) / tg(1.0 - b));
          },
          [&](const GenMittagLeffler& m) {
            if (m.delta == 1.0) return fin(std::exp(std::lgamma(m.nu + b) - std::lgamma(m.nu)));
            if (b >= m.delta) return inf;
            return fin(tg(1.0 - b / m.delta) * std::exp(std::lgamma(m.nu + b / m.delta) - std::lgamma(m.nu)) /
                       tg(1.0 - b));
          },
          [&](const MixedExpMixer& z) {
            if (b >= z.r) return inf;
            return fin(std::pow(z.mu, b) * tg(z.r - b) / (tg(z.r) * tg(1.0 - b)));
          },
          [&](const StableRatio& r) {
            if (r.delta == 1.0) return fin(1.0);
            if (b >= r.delta) return inf;
            return fin(tg(1.0 - b / r.delta) * tg(1.0 + b / r.delta) / (tg(1.0 - b) * tg(1.0 + b)));
          },
          [&](const SnedecorFisher& f) {
            if (b >= f.b) return inf;
            return fin(std::pow(f.b / f.a, b) *
                       std::exp(std::lgamma(f.a + b) + std::lgamma(f.b - b) - std::lgamma(f.a) - std::lgamma(f.b)));
          },
          [&](const Laplace&) { return fin(tg(1.0 + b)); },
          [&](const Linnik& l) {
            if (l.alpha < 2.0 && b >= l.alpha) return inf;
            return fin(detail::symmetric_stable_abs_moment(l.alpha, b) * tg(1.0 + b / l.alpha));
          },
          [&](const GenLinnik& l) {
            if (l.alpha < 2.0 && b >= l.alpha) return inf;
            return fin(detail::symmetric_stable_abs_moment(l.alpha, b) *
                       std::exp(std::lgamma(l.nu + b / l.alpha) - std::lgamma(l.nu)));
          },
          [&](const auto&) -> MomentValue {
            throw UnsupportedFamilyError(describe(spec) + " has no closed-form moment");
          },
      },
      spec);
}

/// Side-by-side report of the implemented moment and the alternative
/// closed forms found in parts of the literature for the same quantity.
struct MomentDiagnostics {
  MomentValue implemented;
  std::optional<double> alternative;  // value of the alternative form, when one exists
  std::string alternative_formula;
};

inline MomentDiagnostics moment_diagnostics(const UnivariateSpec& spec, double order) {
  MomentDiagnostics d{analytic_moment(spec, order), std::nullopt, ""};
  const double b = order;
  using detail::tg;
  if (const auto* s = std::get_if<OneSidedStable>(&spec); s && s->alpha < 1.0 && b < s->alpha && b > 0.0) {
    d.alternative = std::pow(2.0, b) * tg(1.0 - b / s->alpha) / tg(1.0 - b);
    d.alternative_formula = "2^b Gamma(1-b/alpha) / Gamma(1-b)";
  } else if (const auto* s = std::get_if<SymmetricStable>(&spec); s && b < s->alpha && b > 0.0) {
    d.alternative = std::pow(2.0, b) / std::sqrt(std::numbers::pi) * tg((b + 1.0) / 2.0) * tg(1.0 - b / s->alpha) /
                    tg(2.0 / b - 1.0);
    d.alternative_formula = "2^b/sqrt(pi) Gamma((b+1)/2) Gamma(1-b/alpha) / Gamma(2/b-1)";
  } else if (const auto* l = std::get_if<GenLinnik>(&spec); l && b < l->alpha && b > 0.0) {
    d.alternative = std::pow(2.0, b) / std::sqrt(std::numbers::pi) * tg((b + 1.0) / 2.0) * tg(1.0 - b / l->alpha) *
                    std::exp(std::lgamma(l->nu + b / l->alpha) - std::lgamma(l->nu)) / tg(2.0 / b - 1.0);
    d.alternative_formula = "2^b/sqrt(pi) Gamma((b+1)/2) Gamma(1-b/alpha) Gamma(nu+b/alpha) / (Gamma(2/b-1) Gamma(nu))";
  }
  return d;
}

// ---------------------------------------------------------------------------
// Empirical estimators

struct Estimate {
  double value;
  double se;
};

struct ComplexEstimate {
  Complex value;
  double se_re;
  double se_im;
};

namespace detail {

/// Welford accumulator; exact zero variance for constant input.
struct RunningMoments {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double se() const { return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0; }
};

inline void require_nonempty(const SampleBatch& batch) {
  if (batch.empty()) throw EmptyBatchError("empirical estimate of an empty batch");
}

}  // namespace detail

/// Mean of exp(i t'x) over the batch with CLT standard errors per component.
inline ComplexEstimate empirical_cf(const SampleBatch& batch, std::span<const double> t) {
  detail::require_nonempty(batch);
  if (t.size() != batch.dim()) throw DimensionMismatchError("cf argument dimension does not match the batch");
  detail::RunningMoments re, im;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto x = batch.row(i);
    double dot = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) dot += t[j] * x[j];
    re.add(std::cos(dot));
    im.add(std::sin(dot));
  }
  return {{re.mean, im.mean}, re.se(), im.se()};
}

inline ComplexEstimate empirical_cf(const SampleBatch& batch, double t) {
  return empirical_cf(batch, std::span<const double>(&t, 1));
}

/// Mean of exp(-s x) with its standard error; values must be nonnegative.
inline Estimate empirical_lst(const SampleBatch& batch, double s) {
  detail::require_nonempty(batch);
  if (batch.dim() != 1) throw DimensionMismatchError("empirical LST needs a univariate batch");
  if (!(s >= 0.0)) throw ParameterDomainError("LST argument must be >= 0");
  detail::RunningMoments acc;
  for (double x : batch.values()) {
    if (x < 0.0) throw ParameterDomainError("empirical LST of a batch with negative values");
    acc.add(std::exp(-s * x));
  }
  return {acc.mean, acc.se()};
}

/// Mean of |x|^order with its standard error (meaningful when the
/// 2*order moment is finite).
inline Estimate empirical_abs_moment(const SampleBatch& batch, double order) {
  detail::require_nonempty(batch);
  if (batch.dim() != 1) throw DimensionMismatchError("empirical moment needs a univariate batch");
  detail::RunningMoments acc;
  for (double x : batch.values()) acc.add(std::pow(std::abs(x), order));
  return {acc.mean, acc.se()};
}

}  // namespace mixstable
