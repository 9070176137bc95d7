#pragma once

// Generative recipes: products of independent scalar factors (c X)^p,
// optionally multiplying a vector draw, optionally summed over i.i.d.
// copies. Products are accumulated on the log axis.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixstable/batch.hpp"
#include "mixstable/multivariate.hpp"
#include "mixstable/parallel.hpp"
#include "mixstable/univariate.hpp"

namespace mixstable {

/// (scale * X)^power with X drawn from `law`.
struct Factor {
  UnivariateSpec law;
  double power = 1.0;
  double scale = 1.0;
};

struct Recipe {
  std::string text;
  std::vector<Factor> factors;
  std::optional<MultivariateSpec> vector;
  std::size_t sum_of = 1;

  std::size_t dim() const { return vector ? dim_of(*vector) : 1; }
};

inline bool is_signed_law(const UnivariateSpec& law) { return !is_nonnegative(law); }

inline void validate(const Recipe& r) {
  if (r.factors.empty() && !r.vector) throw ParameterDomainError("recipe '" + r.text + "' is empty");
  if (r.sum_of == 0) throw ParameterDomainError("recipe '" + r.text + "' sums zero copies");
  for (const auto& f : r.factors) {
    validate(f.law);
    if (!std::isfinite(f.power) || f.power == 0.0 || !detail::positive(f.scale))
      throw ParameterDomainError("recipe '" + r.text + "': factor needs finite nonzero power and positive scale");
    if (is_signed_law(f.law) && f.power != 1.0)
      throw ParameterDomainError("recipe '" + r.text + "': real-valued factor " + describe(f.law) + " must have power 1");
  }
  if (r.vector) validate(*r.vector);
}

/// One draw of the recipe into `out`; false when it overflowed.
inline bool draw_row(const Recipe& r, RngStream& rng, std::span<double> out) {
  for (auto& v : out) v = 0.0;
  std::vector<double> buf(out.size());
  for (std::size_t c = 0; c < r.sum_of; ++c) {
    double log_scale = 0.0;
    double sign = 1.0;
    for (const auto& f : r.factors) {
      const auto s = detail::signed_log_draw(f.law, rng);
      log_scale += f.power * (std::log(f.scale) + s.log_abs);
      sign *= s.sign;
    }
    if (r.vector) {
      log_scale += detail::log_row_scale(*r.vector, rng);
      if (!detail::scaled_normal_row(sigma_of(*r.vector), log_scale, rng, buf)) return false;
    } else {
      buf[0] = std::exp(log_scale);
      if (!std::isfinite(buf[0])) return false;
    }
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += sign * buf[j];
  }
  for (double v : out)
    if (!std::isfinite(v)) return false;
  return true;
}

inline SampleBatch sample(const Recipe& r, std::size_t n, const RngStream& rng, int threads = 0) {
  validate(r);
  auto batch = generate_rows(n, r.dim(), rng, threads,
                             [&](RngStream& local, std::span<double> row) { return draw_row(r, local, row); });
  batch.meta.spec = r.text;
  return batch;
}

}  // namespace mixstable
