#pragma once

// Univariate laws and their exact-convention samplers.
//
// Conventions: gamma G_{r,lambda} has density lambda^r x^{r-1} e^{-lambda x} / Gamma(r);
// the one-sided stable S(alpha,1) has Laplace-Stieltjes transform
// exp(-s^alpha); the symmetric stable S(alpha,0) has characteristic
// function exp(-|t|^alpha). Discrete index laws live on {1, 2, ...}.

#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>

#include "mixstable/batch.hpp"
#include "mixstable/error.hpp"
#include "mixstable/parallel.hpp"
#include "mixstable/rng.hpp"

namespace mixstable {

struct Normal {};
struct Exponential {};
struct Gamma {
  double shape;
  double rate = 1.0;
};
struct GeneralizedGamma {
  double shape;
  double power;
  double rate = 1.0;
};
struct Weibull {
  double shape;
};
struct OneSidedStable {
  double alpha;
};
struct SymmetricStable {
  double alpha;
};
struct MittagLeffler {
  double delta;
};
struct GenMittagLeffler {
  double delta;
  double nu;
};
/// Z_{r,mu} = mu (G_{r,1} + G_{1-r,1}) / G_{r,1}.
struct MixedExpMixer {
  double r;
  double mu = 1.0;
};
/// R_delta = S(delta,1) / S'(delta,1) with independent numerator and denominator.
struct StableRatio {
  double delta;
};
/// (G_{a,1}/a) / (G_{b,1}/b); (a, b) = (1-r, r) gives V_{1-r,r}.
struct SnedecorFisher {
  double a;
  double b;
};
struct Geometric {
  double p;
};
struct NegativeBinomial {
  double nu;
  double p;
};
/// Density exp(-|x|)/2.
struct Laplace {};
struct Linnik {
  double alpha;
};
struct GenLinnik {
  double alpha;
  double nu;
};

using UnivariateSpec =
    std::variant<Normal, Exponential, Gamma, GeneralizedGamma, Weibull, OneSidedStable, SymmetricStable,
                 MittagLeffler, GenMittagLeffler, MixedExpMixer, StableRatio, SnedecorFisher, Geometric,
                 NegativeBinomial, Laplace, Linnik, GenLinnik>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

namespace detail {

inline bool in_open(double x, double lo, double hi) { return std::isfinite(x) && x > lo && x < hi; }
inline bool in_left_open(double x, double lo, double hi) { return std::isfinite(x) && x > lo && x <= hi; }
inline bool positive(double x) { return std::isfinite(x) && x > 0.0; }

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

/// Sink for library warnings; replaceable so tests and the CLI can route it.
inline std::function<void(std::string_view)>& warning_sink() {
  static std::function<void(std::string_view)> sink = [](std::string_view msg) {
    std::clog << "mixstable warning: " << msg << '\n';
  };
  return sink;
}

inline void warn(std::string_view msg) {
  if (auto& sink = warning_sink()) sink(msg);
}

}  // namespace detail

/// Human- and machine-readable name, e.g. "gamma(shape=2,rate=3)".
inline std::string describe(const UnivariateSpec& spec) {
  using detail::fmt;
  return std::visit(
      overloaded{
          [](const Normal&) { return std::string("normal"); },
          [](const Exponential&) { return std::string("exponential"); },
          [](const Gamma& g) { return "gamma(shape=" + fmt(g.shape) + ",rate=" + fmt(g.rate) + ")"; },
          [](const GeneralizedGamma& g) {
            return "gen-gamma(shape=" + fmt(g.shape) + ",power=" + fmt(g.power) + ",rate=" + fmt(g.rate) + ")";
          },
          [](const Weibull& w) { return "weibull(shape=" + fmt(w.shape) + ")"; },
          [](const OneSidedStable& s) { return "one-sided-stable(alpha=" + fmt(s.alpha) + ")"; },
          [](const SymmetricStable& s) { return "symmetric-stable(alpha=" + fmt(s.alpha) + ")"; },
          [](const MittagLeffler& m) { return "mittag-leffler(delta=" + fmt(m.delta) + ")"; },
          [](const GenMittagLeffler& m) {
            return "gen-mittag-leffler(delta=" + fmt(m.delta) + ",nu=" + fmt(m.nu) + ")";
          },
          [](const MixedExpMixer& z) { return "mixed-exp-mixer(r=" + fmt(z.r) + ",mu=" + fmt(z.mu) + ")"; },
          [](const StableRatio& r) { return "stable-ratio(delta=" + fmt(r.delta) + ")"; },
          [](const SnedecorFisher& f) { return "snedecor-fisher(a=" + fmt(f.a) + ",b=" + fmt(f.b) + ")"; },
          [](const Geometric& g) { return "geometric(p=" + fmt(g.p) + ")"; },
          [](const NegativeBinomial& nb) {
            return "negative-binomial(nu=" + fmt(nb.nu) + ",p=" + fmt(nb.p) + ")";
          },
          [](const Laplace&) { return std::string("laplace"); },
          [](const Linnik& l) { return "linnik(alpha=" + fmt(l.alpha) + ")"; },
          [](const GenLinnik& l) { return "gen-linnik(alpha=" + fmt(l.alpha) + ",nu=" + fmt(l.nu) + ")"; },
      },
      spec);
}

/// Throws ParameterDomainError when the parameters leave the family's domain.
inline void validate(const UnivariateSpec& spec) {
  using namespace detail;
  const std::string name = describe(spec);
  auto check = [&](bool ok, const char* rule) {
    if (!ok) throw ParameterDomainError(name + ": requires " + rule);
  };
  std::visit(overloaded{
                 [](const Normal&) {},
                 [](const Exponential&) {},
                 [&](const Gamma& g) { check(positive(g.shape) && positive(g.rate), "shape > 0, rate > 0"); },
                 [&](const GeneralizedGamma& g) {
                   check(positive(g.shape) && positive(g.rate) && std::isfinite(g.power) && g.power != 0.0,
                         "shape > 0, rate > 0, power != 0");
                 },
                 [&](const Weibull& w) { check(positive(w.shape), "shape > 0"); },
                 [&](const OneSidedStable& s) { check(in_left_open(s.alpha, 0.0, 1.0), "0 < alpha <= 1"); },
                 [&](const SymmetricStable& s) { check(in_left_open(s.alpha, 0.0, 2.0), "0 < alpha <= 2"); },
                 [&](const MittagLeffler& m) { check(in_left_open(m.delta, 0.0, 1.0), "0 < delta <= 1"); },
                 [&](const GenMittagLeffler& m) {
                   check(in_left_open(m.delta, 0.0, 1.0) && positive(m.nu), "0 < delta <= 1, nu > 0");
                 },
                 [&](const MixedExpMixer& z) { check(in_open(z.r, 0.0, 1.0) && positive(z.mu), "0 < r < 1, mu > 0"); },
                 [&](const StableRatio& r) { check(in_left_open(r.delta, 0.0, 1.0), "0 < delta <= 1"); },
                 [&](const SnedecorFisher& f) { check(positive(f.a) && positive(f.b), "a > 0, b > 0"); },
                 [&](const Geometric& g) { check(in_open(g.p, 0.0, 1.0), "0 < p < 1"); },
                 [&](const NegativeBinomial& nb) {
                   check(positive(nb.nu) && in_open(nb.p, 0.0, 1.0), "nu > 0, 0 < p < 1");
                 },
                 [](const Laplace&) {},
                 [&](const Linnik& l) { check(in_left_open(l.alpha, 0.0, 2.0), "0 < alpha <= 2"); },
                 [&](const GenLinnik& l) {
                   check(in_left_open(l.alpha, 0.0, 2.0) && positive(l.nu), "0 < alpha <= 2, nu > 0");
                 },
             },
             spec);
}

/// True for laws supported on [0, inf).
inline bool is_nonnegative(const UnivariateSpec& spec) {
  return !std::holds_alternative<Normal>(spec) && !std::holds_alternative<SymmetricStable>(spec) &&
         !std::holds_alternative<Laplace>(spec) && !std::holds_alternative<Linnik>(spec) &&
         !std::holds_alternative<GenLinnik>(spec);
}

inline bool is_discrete(const UnivariateSpec& spec) {
  return std::holds_alternative<Geometric>(spec) || std::holds_alternative<NegativeBinomial>(spec);
}

namespace detail {

/// Below this distance from 1 the one-sided stable exponent is clamped to 1.
inline constexpr double kOneSidedClamp = 1e-6;

inline double effective_one_sided_alpha(double alpha) {
  if (alpha < 1.0 && alpha > 1.0 - kOneSidedClamp) {
    static std::once_flag once;
    std::call_once(once, [alpha] {
      warn("one-sided stable alpha=" + fmt(alpha) + " is within 1e-6 of 1; clamped to S(1,1) = 1");
    });
    return 1.0;
  }
  return alpha;
}

/// log G_{shape,1}. Marsaglia-Tsang squeeze/rejection for shape >= 1;
/// shape < 1 boosts to shape + 1 and multiplies by U^{1/shape}.
inline double log_gamma_variate(double shape, RngStream& rng) {
  if (shape < 1.0) return log_gamma_variate(shape + 1.0, rng) + std::log(rng.uniform()) / shape;
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d * v);
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return std::log(d * v);
  }
}

inline double gamma_variate(double shape, RngStream& rng) { return std::exp(log_gamma_variate(shape, rng)); }

/// log S(alpha,1) by Kanter's representation:
/// S = sin(alpha U) / sin(U)^{1/alpha} * (sin((1-alpha) U) / W)^{(1-alpha)/alpha},
/// U ~ Uniform(0, pi), W ~ Exp(1). Scale is such that E exp(-s S) = exp(-s^alpha).
inline double log_one_sided_stable(double alpha, RngStream& rng) {
  alpha = effective_one_sided_alpha(alpha);
  if (alpha == 1.0) return 0.0;
  const double u = std::numbers::pi * rng.uniform();
  const double w = rng.exponential();
  const double beta = 1.0 - alpha;
  return std::log(std::sin(alpha * u)) - std::log(std::sin(u)) / alpha +
         (beta / alpha) * (std::log(std::sin(beta * u)) - std::log(w));
}

/// Signed log-magnitude representation of a real draw.
struct SignedLog {
  double log_abs;
  double sign;
};

/// S(alpha,0) by Chambers-Mallows-Stuck with beta = 0:
/// sin(alpha V) / cos(V)^{1/alpha} * (cos((1-alpha) V) / W)^{(1-alpha)/alpha},
/// V ~ Uniform(-pi/2, pi/2). The characteristic function is exactly exp(-|t|^alpha).
inline SignedLog log_symmetric_stable(double alpha, RngStream& rng) {
  if (alpha == 2.0) {
    const double x = std::numbers::sqrt2 * rng.normal();
    return {std::log(std::abs(x)), x < 0.0 ? -1.0 : 1.0};
  }
  const double v = std::numbers::pi * (rng.uniform() - 0.5);
  if (alpha == 1.0) {
    const double x = std::tan(v);
    return {std::log(std::abs(x)), x < 0.0 ? -1.0 : 1.0};
  }
  const double w = rng.exponential();
  const double s = std::sin(alpha * v);
  const double beta = 1.0 - alpha;
  const double log_abs = std::log(std::abs(s)) - std::log(std::cos(v)) / alpha +
                         (beta / alpha) * (std::log(std::cos(beta * v)) - std::log(w));
  return {log_abs, s < 0.0 ? -1.0 : 1.0};
}

inline double symmetric_stable(double alpha, RngStream& rng) {
  const auto [log_abs, sign] = log_symmetric_stable(alpha, rng);
  return sign * std::exp(log_abs);
}

/// Poisson(mean): multiplication method below 10, Hormann's PTRS above.
inline double poisson_variate(double mean, RngStream& rng) {
  if (!(mean > 0.0)) return 0.0;
  if (mean < 10.0) {
    const double limit = std::exp(-mean);
    double prod = rng.uniform();
    double k = 0.0;
    while (prod > limit) {
      prod *= rng.uniform();
      k += 1.0;
    }
    return k;
  }
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <= -mean + k * loglam - std::lgamma(k + 1.0))
      return k;
  }
}

/// Geometric on {1, 2, ...}: P(N = k) = p (1-p)^{k-1}. p = 1 gives N = 1.
inline double geometric_variate(double p, RngStream& rng) {
  if (p >= 1.0) return 1.0;
  return 1.0 + std::floor(std::log(rng.uniform()) / std::log1p(-p));
}

/// Negative binomial shifted to {1, 2, ...}: 1 + Poisson(G_{nu,1} (1-p)/p).
inline double negative_binomial_variate(double nu, double p, RngStream& rng) {
  if (p >= 1.0) return 1.0;
  const double mean = std::exp(log_gamma_variate(nu, rng) + std::log1p(-p) - std::log(p));
  return 1.0 + poisson_variate(mean, rng);
}

inline double log_mixed_exp_mixer(double r, double mu, RngStream& rng) {
  const double lg_r = log_gamma_variate(r, rng);
  const double lg_q = log_gamma_variate(1.0 - r, rng);
  const double d = lg_q - lg_r;
  // log(1 + e^d) without overflow
  const double softplus = d > 0.0 ? d + std::log1p(std::exp(-d)) : std::log1p(std::exp(d));
  return std::log(mu) + softplus;
}

/// One draw on the log scale for nonnegative families.
inline double log_draw(const UnivariateSpec& spec, RngStream& rng) {
  return std::visit(
      overloaded{
          [&](const Exponential&) { return std::log(rng.exponential()); },
          [&](const Gamma& g) { return log_gamma_variate(g.shape, rng) - std::log(g.rate); },
          [&](const GeneralizedGamma& g) { return (log_gamma_variate(g.shape, rng) - std::log(g.rate)) / g.power; },
          [&](const Weibull& w) { return std::log(rng.exponential()) / w.shape; },
          [&](const OneSidedStable& s) { return log_one_sided_stable(s.alpha, rng); },
          [&](const MittagLeffler& m) {
            return log_one_sided_stable(m.delta, rng) + std::log(rng.exponential()) / m.delta;
          },
          [&](const GenMittagLeffler& m) {
            return log_one_sided_stable(m.delta, rng) + log_gamma_variate(m.nu, rng) / m.delta;
          },
          [&](const MixedExpMixer& z) { return log_mixed_exp_mixer(z.r, z.mu, rng); },
          [&](const StableRatio& r) {
            return log_one_sided_stable(r.delta, rng) - log_one_sided_stable(r.delta, rng);
          },
          [&](const SnedecorFisher& f) {
            return log_gamma_variate(f.a, rng) - std::log(f.a) - log_gamma_variate(f.b, rng) + std::log(f.b);
          },
          [&](const Geometric& g) { return std::log(geometric_variate(g.p, rng)); },
          [&](const NegativeBinomial& nb) { return std::log(negative_binomial_variate(nb.nu, nb.p, rng)); },
          [&](const auto&) -> double {
            throw UnsupportedFamilyError(describe(spec) + " is not a nonnegative law");
          },
      },
      spec);
}

/// One draw of a real-valued law as (log|x|, sign).
inline SignedLog signed_log_draw(const UnivariateSpec& spec, RngStream& rng) {
  return std::visit(overloaded{
                        [&](const Normal&) {
                          const double x = rng.normal();
                          return SignedLog{std::log(std::abs(x)), x < 0.0 ? -1.0 : 1.0};
                        },
                        [&](const SymmetricStable& s) { return log_symmetric_stable(s.alpha, rng); },
                        [&](const Laplace&) { return SignedLog{std::log(rng.exponential()), rng.sign()}; },
                        [&](const Linnik& l) {
                          const auto s = log_symmetric_stable(l.alpha, rng);
                          return SignedLog{s.log_abs + std::log(rng.exponential()) / l.alpha, s.sign};
                        },
                        [&](const GenLinnik& l) {
                          const auto s = log_symmetric_stable(l.alpha, rng);
                          return SignedLog{s.log_abs + log_gamma_variate(l.nu, rng) / l.alpha, s.sign};
                        },
                        [&](const auto&) { return SignedLog{log_draw(spec, rng), 1.0}; },
                    },
                    spec);
}

}  // namespace detail

/// One draw from `spec`; may be non-finite for extreme heavy-tailed products.
inline double draw(const UnivariateSpec& spec, RngStream& rng) {
  return std::visit(overloaded{
                        [&](const Normal&) { return rng.normal(); },
                        [&](const Exponential&) { return rng.exponential(); },
                        [&](const SymmetricStable& s) { return detail::symmetric_stable(s.alpha, rng); },
                        [&](const Geometric& g) { return detail::geometric_variate(g.p, rng); },
                        [&](const NegativeBinomial& nb) { return detail::negative_binomial_variate(nb.nu, nb.p, rng); },
                        [&](const Laplace&) { return rng.sign() * rng.exponential(); },
                        [&](const auto&) {
                          const auto [log_abs, sign] = detail::signed_log_draw(spec, rng);
                          return sign * std::exp(log_abs);
                        },
                    },
                    spec);
}

/// n i.i.d. draws. Pure in `rng`: chunk k of the batch uses rng.child(k).
inline SampleBatch sample(const UnivariateSpec& spec, std::size_t n, const RngStream& rng, int threads = 0) {
  validate(spec);
  auto batch = generate_rows(n, 1, rng, threads, [&](RngStream& local, std::span<double> row) {
    row[0] = draw(spec, local);
    return std::isfinite(row[0]);
  });
  batch.meta.spec = describe(spec);
  return batch;
}

/// Normal, exponential, gamma, generalized gamma, Weibull, geometric and
/// negative binomial draws.
inline SampleBatch sample_standard(const UnivariateSpec& spec, std::size_t n, const RngStream& rng, int threads = 0) {
  const bool allowed = std::holds_alternative<Normal>(spec) || std::holds_alternative<Exponential>(spec) ||
                       std::holds_alternative<Gamma>(spec) || std::holds_alternative<GeneralizedGamma>(spec) ||
                       std::holds_alternative<Weibull>(spec) || std::holds_alternative<Geometric>(spec) ||
                       std::holds_alternative<NegativeBinomial>(spec);
  if (!allowed) throw UnsupportedFamilyError(describe(spec) + " is not a standard family");
  return sample(spec, n, rng, threads);
}

inline SampleBatch sample_one_sided_stable(double alpha, std::size_t n, const RngStream& rng, int threads = 0) {
  return sample(OneSidedStable{alpha}, n, rng, threads);
}

inline SampleBatch sample_symmetric_stable(double alpha, std::size_t n, const RngStream& rng, int threads = 0) {
  return sample(SymmetricStable{alpha}, n, rng, threads);
}

inline SampleBatch sample_mittag_leffler(double delta, std::size_t n, const RngStream& rng, int threads = 0) {
  return sample(MittagLeffler{delta}, n, rng, threads);
}

inline SampleBatch sample_gen_mittag_leffler(double delta, double nu, std::size_t n, const RngStream& rng,
                                             int threads = 0) {
  return sample(GenMittagLeffler{delta, nu}, n, rng, threads);
}

inline SampleBatch sample_mixed_exp_mixer(double r, double mu, std::size_t n, const RngStream& rng, int threads = 0) {
  return sample(MixedExpMixer{r, mu}, n, rng, threads);
}

inline SampleBatch sample_stable_ratio(double delta, std::size_t n, const RngStream& rng, int threads = 0) {
  return sample(StableRatio{delta}, n, rng, threads);
}

}  // namespace mixstable
