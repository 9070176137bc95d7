#pragma once

// r-variate laws built as scalar multiples of a normal vector A z, where
// A A' = Sigma. Every law here is a normal scale mixture, so one row is
// exp(log_scale) * A z with the scale accumulated on the log axis.

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mixstable/batch.hpp"
#include "mixstable/parallel.hpp"
#include "mixstable/rng.hpp"
#include "mixstable/spd.hpp"
#include "mixstable/univariate.hpp"

namespace mixstable {

struct ConstantMixer {
  double c;
};

/// U = V o G_{nu,1}, the class of gamma scale mixtures.
struct GammaScaleMixture {
  UnivariateSpec v;
  double nu;
};

/// A nonnegative mixing variable, optionally multiplied by a constant.
struct MixerSpec {
  std::variant<UnivariateSpec, GammaScaleMixture, ConstantMixer> law;
  double scale = 1.0;

  static MixerSpec of(UnivariateSpec base, double scale = 1.0) { return {std::move(base), scale}; }
  static MixerSpec constant(double c) { return {ConstantMixer{c}, 1.0}; }
  static MixerSpec gamma_scale_mixture(UnivariateSpec v, double nu) { return {GammaScaleMixture{std::move(v), nu}, 1.0}; }
};

inline std::string describe(const MixerSpec& m) {
  std::string base = std::visit(overloaded{
                                    [](const UnivariateSpec& u) { return describe(u); },
                                    [](const GammaScaleMixture& g) {
                                      return "gamma-scale-mixture(v=" + describe(g.v) + ",nu=" + detail::fmt(g.nu) + ")";
                                    },
                                    [](const ConstantMixer& c) { return "constant(" + detail::fmt(c.c) + ")"; },
                                },
                                m.law);
  return m.scale == 1.0 ? base : detail::fmt(m.scale) + "*" + base;
}

inline void validate(const MixerSpec& m) {
  if (!detail::positive(m.scale)) throw ParameterDomainError("mixer scale must be positive");
  std::visit(overloaded{
                 [](const UnivariateSpec& u) {
                   validate(u);
                   if (!is_nonnegative(u)) throw ParameterDomainError(describe(u) + " is not a nonnegative mixer");
                 },
                 [](const GammaScaleMixture& g) {
                   validate(g.v);
                   if (!is_nonnegative(g.v)) throw ParameterDomainError(describe(g.v) + " is not a nonnegative mixer");
                   if (!detail::positive(g.nu)) throw ParameterDomainError("gamma-scale-mixture requires nu > 0");
                 },
                 [](const ConstantMixer& c) {
                   if (!detail::positive(c.c)) throw ParameterDomainError("constant mixer requires c > 0");
                 },
             },
             m.law);
}

namespace detail {

inline double log_draw(const MixerSpec& m, RngStream& rng) {
  const double base = std::visit(overloaded{
                                     [&](const UnivariateSpec& u) { return log_draw(u, rng); },
                                     [&](const GammaScaleMixture& g) {
                                       return log_draw(g.v, rng) + log_gamma_variate(g.nu, rng);
                                     },
                                     [](const ConstantMixer& c) { return std::log(c.c); },
                                 },
                                 m.law);
  return std::log(m.scale) + base;
}

}  // namespace detail

inline double draw(const MixerSpec& m, RngStream& rng) { return std::exp(detail::log_draw(m, rng)); }

inline SampleBatch sample(const MixerSpec& m, std::size_t n, const RngStream& rng, int threads = 0) {
  validate(m);
  auto batch = generate_rows(n, 1, rng, threads, [&](RngStream& local, std::span<double> row) {
    row[0] = draw(m, local);
    return std::isfinite(row[0]);
  });
  batch.meta.spec = describe(m);
  return batch;
}

enum class Route { StableRoute, NormalMixtureRoute };

inline const char* to_string(Route r) { return r == Route::StableRoute ? "stable" : "normal-mixture"; }

struct MvNormal {
  SpdMatrix sigma;
};
struct EcStable {
  double alpha;
  SpdMatrix sigma;
};
/// U^{1/alpha} o S(alpha, Sigma, 0).
struct ScaleMixedStable {
  double alpha;
  SpdMatrix sigma;
  MixerSpec mixer;
};
/// sqrt(2 W_1) o X with X ~ N(0, Sigma).
struct MvLaplace {
  SpdMatrix sigma;
};
struct MvLinnik {
  double alpha;
  SpdMatrix sigma;
  Route route = Route::NormalMixtureRoute;
};
struct MvGenLinnik {
  double alpha;
  SpdMatrix sigma;
  double nu;
  Route route = Route::NormalMixtureRoute;
};

using MultivariateSpec = std::variant<MvNormal, EcStable, ScaleMixedStable, MvLaplace, MvLinnik, MvGenLinnik>;

inline const SpdMatrix& sigma_of(const MultivariateSpec& spec) {
  return std::visit([](const auto& s) -> const SpdMatrix& { return s.sigma; }, spec);
}

inline std::size_t dim_of(const MultivariateSpec& spec) { return sigma_of(spec).dim(); }

inline std::string describe(const MultivariateSpec& spec) {
  using detail::fmt;
  return std::visit(
      overloaded{
          [](const MvNormal& s) { return "mv-normal(sigma=" + s.sigma.to_string() + ")"; },
          [](const EcStable& s) { return "ec-stable(alpha=" + fmt(s.alpha) + ",sigma=" + s.sigma.to_string() + ")"; },
          [](const ScaleMixedStable& s) {
            return "scale-mixed-stable(alpha=" + fmt(s.alpha) + ",sigma=" + s.sigma.to_string() +
                   ",mixer=" + describe(s.mixer) + ")";
          },
          [](const MvLaplace& s) { return "mv-laplace(sigma=" + s.sigma.to_string() + ")"; },
          [](const MvLinnik& s) {
            return "mv-linnik(alpha=" + fmt(s.alpha) + ",sigma=" + s.sigma.to_string() + ",route=" + to_string(s.route) + ")";
          },
          [](const MvGenLinnik& s) {
            return "mv-gen-linnik(alpha=" + fmt(s.alpha) + ",sigma=" + s.sigma.to_string() + ",nu=" + fmt(s.nu) +
                   ",route=" + to_string(s.route) + ")";
          },
      },
      spec);
}

inline void validate(const MultivariateSpec& spec) {
  auto check_alpha = [&](double a) {
    if (!detail::in_left_open(a, 0.0, 2.0)) throw ParameterDomainError(describe(spec) + ": requires 0 < alpha <= 2");
  };
  std::visit(overloaded{
                 [](const MvNormal&) {},
                 [&](const EcStable& s) { check_alpha(s.alpha); },
                 [&](const ScaleMixedStable& s) {
                   check_alpha(s.alpha);
                   validate(s.mixer);
                 },
                 [](const MvLaplace&) {},
                 [&](const MvLinnik& s) { check_alpha(s.alpha); },
                 [&](const MvGenLinnik& s) {
                   check_alpha(s.alpha);
                   if (!detail::positive(s.nu)) throw ParameterDomainError(describe(spec) + ": requires nu > 0");
                 },
             },
             spec);
}

namespace detail {

inline constexpr double kLog2 = std::numbers::ln2;

/// log of sqrt(2 S(alpha/2, 1)), the sub-Gaussian stable multiplier.
inline double log_subgaussian_scale(double alpha, RngStream& rng) {
  return 0.5 * (kLog2 + log_one_sided_stable(alpha / 2.0, rng));
}

/// log of the scalar multiplying A z in one draw of `spec`.
inline double log_row_scale(const MultivariateSpec& spec, RngStream& rng) {
  return std::visit(
      overloaded{
          [](const MvNormal&) { return 0.0; },
          [&](const EcStable& s) { return log_subgaussian_scale(s.alpha, rng); },
          [&](const ScaleMixedStable& s) {
            return log_draw(s.mixer, rng) / s.alpha + log_subgaussian_scale(s.alpha, rng);
          },
          [&](const MvLaplace&) { return 0.5 * (kLog2 + std::log(rng.exponential())); },
          [&](const MvLinnik& s) {
            if (s.route == Route::StableRoute)
              return std::log(rng.exponential()) / s.alpha + log_subgaussian_scale(s.alpha, rng);
            return 0.5 * (kLog2 + log_draw(UnivariateSpec{MittagLeffler{s.alpha / 2.0}}, rng));
          },
          [&](const MvGenLinnik& s) {
            if (s.route == Route::StableRoute)
              return log_gamma_variate(s.nu, rng) / s.alpha + log_subgaussian_scale(s.alpha, rng);
            return 0.5 * (kLog2 + log_draw(UnivariateSpec{GenMittagLeffler{s.alpha / 2.0, s.nu}}, rng));
          },
      },
      spec);
}

/// Writes exp(log_scale) * A z into `out`; false if the row overflowed.
inline bool scaled_normal_row(const SpdMatrix& sigma, double log_scale, RngStream& rng, std::span<double> out) {
  const std::size_t r = sigma.dim();
  double z[16];
  std::vector<double> heap;
  double* zp = z;
  if (r > 16) {
    heap.resize(r);
    zp = heap.data();
  }
  for (std::size_t i = 0; i < r; ++i) zp[i] = rng.normal();
  sigma.apply_factor({zp, r}, out);
  const double scale = std::exp(log_scale);
  if (!std::isfinite(scale)) return false;
  for (auto& v : out) {
    v *= scale;
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace detail

/// One draw of `spec` into `out`; false if it overflowed and must be redrawn.
inline bool draw_row(const MultivariateSpec& spec, RngStream& rng, std::span<double> out) {
  const double log_scale = detail::log_row_scale(spec, rng);
  return detail::scaled_normal_row(sigma_of(spec), log_scale, rng, out);
}

inline SampleBatch sample(const MultivariateSpec& spec, std::size_t n, const RngStream& rng, int threads = 0) {
  validate(spec);
  auto batch = generate_rows(n, dim_of(spec), rng, threads,
                             [&](RngStream& local, std::span<double> row) { return draw_row(spec, local, row); });
  batch.meta.spec = describe(spec);
  return batch;
}

inline SampleBatch sample_mv_normal(const SpdMatrix& sigma, std::size_t n, const RngStream& rng, int threads = 0) {
  return sample(MvNormal{sigma}, n, rng, threads);
}

inline SampleBatch sample_ec_stable(double alpha, const SpdMatrix& sigma, std::size_t n, const RngStream& rng,
                                    int threads = 0) {
  return sample(EcStable{alpha, sigma}, n, rng, threads);
}

inline SampleBatch sample_scale_mixed_stable(double alpha, const SpdMatrix& sigma, const MixerSpec& mixer,
                                             std::size_t n, const RngStream& rng, int threads = 0) {
  return sample(ScaleMixedStable{alpha, sigma, mixer}, n, rng, threads);
}

inline SampleBatch sample_mv_laplace(const SpdMatrix& sigma, std::size_t n, const RngStream& rng, int threads = 0) {
  return sample(MvLaplace{sigma}, n, rng, threads);
}

inline SampleBatch sample_mv_linnik(double alpha, const SpdMatrix& sigma, Route route, std::size_t n,
                                    const RngStream& rng, int threads = 0) {
  return sample(MvLinnik{alpha, sigma, route}, n, rng, threads);
}

inline SampleBatch sample_mv_gen_linnik(double alpha, const SpdMatrix& sigma, double nu, Route route, std::size_t n,
                                        const RngStream& rng, int threads = 0) {
  return sample(MvGenLinnik{alpha, sigma, nu, route}, n, rng, threads);
}

}  // namespace mixstable
