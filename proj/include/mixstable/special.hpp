#pragma once

// Mittag-Leffler function E_delta(z) on the real line and the
// Mittag-Leffler density. For 0 < delta < 1 and z = -x <= 0 three schemes
// are tried in order: the power series (accepted when cancellation is
// harmless), the algebraic asymptotic series (accepted when its smallest
// term is negligible), and otherwise the spectral integral
//
//   E_delta(-x) = sin(pi delta)/(pi delta) * int_0^inf exp(-(u x)^{1/delta}) / (u^2 + 2u cos(pi delta) + 1) du,
//
// which is a convergent positive integral with no cancellation.

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/sin_pi.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "mixstable/error.hpp"

namespace mixstable {

namespace detail {

/// 1/Gamma(z), exactly zero at the poles z = 0, -1, -2, ...
inline double rgamma(double z) {
  if (z <= 0.0 && z == std::floor(z)) return 0.0;
  if (z > 0.0) return std::exp(-std::lgamma(z));
  return boost::math::sin_pi(z) / std::numbers::pi * std::tgamma(1.0 - z);
}

/// Neumaier compensated summation that also tracks sum |terms|.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  double abs_sum = 0.0;
  void add(double x) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
    abs_sum += std::abs(x);
  }
  double value() const { return sum + comp; }
};

struct SchemeResult {
  double value;
  double error;  // absolute error estimate
};

inline constexpr double kSeriesAcceptRel = 1e-14;

/// sum_n (-1)^n x^n / Gamma(delta n + shift) for x > 0.
inline SchemeResult alternating_series(double delta, double shift, double x) {
  CompensatedSum s;
  const double lx = std::log(x);
  bool past_peak = false;
  double prev_log = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < 5000; ++n) {
    const double lt = n * lx - std::lgamma(delta * n + shift);
    const double t = std::exp(lt);
    s.add(n % 2 ? -t : t);
    if (lt < prev_log) past_peak = true;
    prev_log = lt;
    if (past_peak && t <= 1e-18 * std::abs(s.value())) break;
    if (past_peak && t == 0.0) break;
  }
  const double eps = std::numeric_limits<double>::epsilon();
  return {s.value(), 4.0 * eps * s.abs_sum};
}

/// sum_{k>=1} (-1)^{k+1} c_k x^{-k} rgamma(1 - delta k) truncated at the
/// smallest term of the envelope Gamma(delta k) x^{-k}; c_k = weight(k).
template <class Weight>
SchemeResult asymptotic_series(double delta, double x, Weight weight) {
  CompensatedSum s;
  const double lx = std::log(x);
  double prev_env = std::numeric_limits<double>::infinity();
  double err = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 2000; ++k) {
    const double env = std::lgamma(delta * k) - k * lx + std::log(weight(k));
    if (env > prev_env) {
      err = std::exp(prev_env);
      break;
    }
    prev_env = env;
    const double t = weight(k) * std::exp(-k * lx) * rgamma(1.0 - delta * k);
    s.add(k % 2 ? t : -t);
    if (std::exp(env) < 1e-18 * std::abs(s.value())) {
      err = std::exp(env);
      break;
    }
  }
  return {s.value(), err};
}

/// (sin(pi d)/(pi d)) * int_0^inf g(u) / (u^2 + 2u cos(pi d) + 1) du, with
/// breakpoints at the denominator's peak and at the decay scale `knee`.
template <class G>
double spectral_integral(double delta, double knee, G g) {
  const double c = std::cos(std::numbers::pi * delta);
  const double s = std::sin(std::numbers::pi * delta);
  auto f = [&](double u) {
    const double den = (u + c) * (u + c) + s * s;
    const double v = g(u) / den;
    return std::isfinite(v) ? v : 0.0;
  };
  std::vector<double> cuts{0.0};
  const double peak = c < 0.0 ? -c : 0.0;
  const double width = std::max(s, 1e-8);
  for (double m : {0.0, 1.0, 10.0, 100.0}) {
    if (peak > 0.0 && m == 0.0) cuts.push_back(peak);
    if (m > 0.0) cuts.push_back(peak + m * width);
    if (peak > m * width && m > 0.0) cuts.push_back(peak - m * width);
  }
  for (double m : {0.1, 1.0, 4.0}) cuts.push_back(m * knee);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cuts[i], cuts[i + 1], 10, 1e-13);
  }
  const double last = cuts.back();
  static thread_local boost::math::quadrature::exp_sinh<double> tail;
  total += tail.integrate([&](double t) { return f(last + t); }, 1e-13);
  return s / (std::numbers::pi * delta) * total;
}

inline double ml_negative_small_delta(double delta, double x) {
  const auto series = alternating_series(delta, 1.0, x);
  if (series.error <= kSeriesAcceptRel * std::abs(series.value)) return series.value;
  const auto asym = asymptotic_series(delta, x, [](int) { return 1.0; });
  if (asym.error <= kSeriesAcceptRel * std::abs(asym.value)) return asym.value;
  const double inv_delta = 1.0 / delta;
  return spectral_integral(delta, 1.0 / x, [&](double u) { return std::exp(-std::pow(u * x, inv_delta)); });
}

}  // namespace detail

/// E_delta(z) = sum_n z^n / Gamma(delta n + 1) for real z and delta > 0.
inline double mittag_leffler_function(double delta, double z) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ParameterDomainError("Mittag-Leffler function requires delta > 0");
  if (std::isnan(z)) throw ParameterDomainError("Mittag-Leffler function argument is NaN");
  if (z == 0.0) return 1.0;
  if (delta == 1.0) return std::exp(z);
  if (z > 0.0) {
    if (std::isinf(z)) return std::numeric_limits<double>::infinity();
    detail::CompensatedSum s;
    const double lz = std::log(z);
    double prev = -std::numeric_limits<double>::infinity();
    for (int n = 0; n < 100000; ++n) {
      const double lt = n * lz - std::lgamma(delta * n + 1.0);
      const double t = std::exp(lt);
      s.add(t);
      if (lt < prev && t <= 1e-17 * s.value()) break;
      prev = lt;
    }
    return s.value();
  }
  const double x = -z;
  if (std::isinf(x)) return 0.0;
  if (delta < 1.0) return detail::ml_negative_small_delta(delta, x);
  if (delta == 2.0) return std::cos(std::sqrt(x));
  // delta > 1: the function oscillates; only the series is used, in
  // extended precision, and refused when cancellation eats the result.
  long double sum = 0.0L, abs_sum = 0.0L;
  const long double lx = std::log(static_cast<long double>(x));
  long double prev = -std::numeric_limits<long double>::infinity();
  int n = 0;
  for (; n < 20000; ++n) {
    const long double lt = n * lx - std::lgamma(static_cast<long double>(delta) * n + 1.0L);
    const long double t = std::exp(lt);
    sum += (n % 2) ? -t : t;
    abs_sum += t;
    if (lt < prev && t <= 1e-21L * abs_sum) break;
    prev = lt;
  }
  const double err = static_cast<double>(4.0L * std::numeric_limits<long double>::epsilon() * abs_sum);
  if (!(err <= 1e-10 * std::abs(static_cast<double>(sum))))
    throw AccuracyError("Mittag-Leffler series lost too many digits to cancellation at delta=" + std::to_string(delta) +
                            ", z=" + std::to_string(z),
                        err, n);
  return static_cast<double>(sum);
}

/// Density of the Mittag-Leffler law with Laplace transform (1+s^delta)^{-1},
/// f(x) = -(d/dx) E_delta(-x^delta), 0 < delta <= 1.
inline double mittag_leffler_density(double delta, double x) {
  if (!(delta > 0.0 && delta <= 1.0)) throw ParameterDomainError("Mittag-Leffler density requires 0 < delta <= 1");
  if (!(x >= 0.0)) return 0.0;
  if (delta == 1.0) return std::exp(-x);
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(x)) return 0.0;
  const double y = std::pow(x, delta);
  // f(x) = x^{delta-1} sum_m (-1)^m y^m / Gamma(delta m + delta)
  const auto series = detail::alternating_series(delta, delta, y);
  if (series.error <= detail::kSeriesAcceptRel * std::abs(series.value))
    return std::pow(x, delta - 1.0) * series.value;
  // f(x) ~ (1/x) sum_k (-1)^{k+1} delta k y^{-k} / Gamma(1 - delta k)
  const auto asym = detail::asymptotic_series(delta, y, [delta](int k) { return delta * k; });
  if (asym.error <= detail::kSeriesAcceptRel * std::abs(asym.value)) return asym.value / x;
  const double inv_delta = 1.0 / delta;
  return detail::spectral_integral(delta, 1.0 / y, [&](double u) {
    const double r = std::pow(u, inv_delta);
    return r * std::exp(-x * r);
  });
}

/// P(M_delta > x) = E_delta(-x^delta).
inline double mittag_leffler_survival(double delta, double x) {
  if (!(x > 0.0)) return 1.0;
  return mittag_leffler_function(delta, -std::pow(x, delta));
}

}  // namespace mixstable
