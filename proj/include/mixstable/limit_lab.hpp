#pragma once

// Random sums d_n^{-e} (X_1 + ... + X_{N_n}) of i.i.d. vectors with an
// independent random index, compared along a ladder of n against their
// scale-mixed stable limits.

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "mixstable/batch.hpp"
#include "mixstable/error.hpp"
#include "mixstable/multivariate.hpp"
#include "mixstable/parallel.hpp"
#include "mixstable/rng.hpp"
#include "mixstable/spd.hpp"
#include "mixstable/tests.hpp"
#include "mixstable/univariate.hpp"

namespace mixstable {

// ---------------------------------------------------------------------------
// Summands and index laws

/// X_k ~ S(alpha, Sigma, 0); sums normalize with exponent 1/alpha.
struct EcStableIid {
  double alpha;
  SpdMatrix sigma;
};

enum class FiniteCovBase { MvNormal, ScaledRademacher };

/// Finite-covariance X_k with covariance Sigma; sums normalize with exponent 1/2.
/// ScaledRademacher draws L e with L L' = Sigma and e uniform on {-1, 1}^d.
struct FiniteCovIid {
  FiniteCovBase base;
  SpdMatrix sigma;
};

using Summand = std::variant<EcStableIid, FiniteCovIid>;

/// N_n negative binomial with p_n = 1/n, E N_n about n nu.
struct NegBinomialIndex {
  double nu;
};
/// N_n geometric with p_n = 1/n.
struct GeometricIndex {};
/// N_n = max(1, round(n U)).
struct ScaledMixerIndex {
  MixerSpec mixer;
};
/// N_n = n.
struct FixedIndex {};

using IndexLaw = std::variant<NegBinomialIndex, GeometricIndex, ScaledMixerIndex, FixedIndex>;

enum class SumPath { Auto, Literal, Fast };

struct ExperimentConfig {
  std::string name;
  Summand summand;
  IndexLaw index;
  /// d_n = d_coef * n^d_power, b_n = n.
  double d_coef = 1.0;
  double d_power = 1.0;
  std::vector<std::size_t> ladder{100, 1000, 10000};
  std::size_t replicates = 5000;
  MultivariateSpec target;
  std::size_t permutations = 500;
  double level = kDefaultLevel;
  SumPath path = SumPath::Auto;
  /// Auto path: total literal summands allowed per ladder point.
  std::size_t literal_budget = 25'000'000;

  double d_n(std::size_t n) const { return d_coef * std::pow(static_cast<double>(n), d_power); }
};

inline std::size_t summand_dim(const Summand& s) {
  return std::visit([](const auto& x) { return x.sigma.dim(); }, s);
}

inline double normalizing_exponent(const Summand& s) {
  return std::visit(overloaded{[](const EcStableIid& e) { return 1.0 / e.alpha; }, [](const FiniteCovIid&) { return 0.5; }}, s);
}

inline std::string describe(const Summand& s) {
  return std::visit(overloaded{[](const EcStableIid& e) { return "ec-stable-iid(alpha=" + detail::fmt(e.alpha) + ")"; },
                               [](const FiniteCovIid& f) {
                                 return std::string(f.base == FiniteCovBase::MvNormal ? "normal-iid" : "rademacher-iid");
                               }},
                    s);
}

inline std::string describe(const IndexLaw& law) {
  return std::visit(overloaded{[](const NegBinomialIndex& b) { return "negative-binomial(nu=" + detail::fmt(b.nu) + ")"; },
                               [](const GeometricIndex&) { return std::string("geometric"); },
                               [](const ScaledMixerIndex& m) { return "scaled-mixer(" + describe(m.mixer) + ")"; },
                               [](const FixedIndex&) { return std::string("fixed"); }},
                    law);
}

inline void validate(const IndexLaw& law) {
  std::visit(overloaded{[](const NegBinomialIndex& b) {
                          if (!detail::positive(b.nu)) throw ParameterDomainError("negative-binomial index needs nu > 0");
                        },
                        [](const ScaledMixerIndex& m) { validate(m.mixer); }, [](const auto&) {}},
             law);
}

inline void validate(const ExperimentConfig& c) {
  std::visit(overloaded{[](const EcStableIid& e) {
                          if (!detail::in_left_open(e.alpha, 0.0, 2.0)) throw ParameterDomainError("summand alpha must lie in (0, 2]");
                        },
                        [](const FiniteCovIid&) {}},
             c.summand);
  validate(c.index);
  validate(c.target);
  if (dim_of(c.target) != summand_dim(c.summand)) throw DimensionMismatchError(c.name + ": target and summand dimensions differ");
  if (c.ladder.empty()) throw ConfigError(c.name + ": empty ladder");
  for (std::size_t i = 0; i < c.ladder.size(); ++i) {
    if (c.ladder[i] == 0) throw ConfigError(c.name + ": ladder entries must be >= 1");
    if (i > 0 && c.ladder[i] <= c.ladder[i - 1]) throw ConfigError(c.name + ": ladder must be strictly increasing");
  }
  if (c.replicates < 1000) throw ConfigError(c.name + ": at least 1000 replicates required");
  if (c.permutations < kMinPermutations) throw ConfigError(c.name + ": at least 200 permutations required");
  if (!detail::positive(c.d_coef) || !std::isfinite(c.d_power)) throw ConfigError(c.name + ": bad d_n sequence");
}

/// The law V with b_{N_n}/d_n => V under b_n = d_n = n.
inline MixerSpec index_limit(const IndexLaw& law) {
  return std::visit(overloaded{[](const NegBinomialIndex& b) { return MixerSpec::of(Gamma{b.nu}); },
                               [](const GeometricIndex&) { return MixerSpec::of(Exponential{}); },
                               [](const ScaledMixerIndex& m) { return m.mixer; },
                               [](const FixedIndex&) { return MixerSpec::constant(1.0); }},
                    law);
}

/// One draw of N_n.
inline std::uint64_t sample_random_index(const IndexLaw& law, std::size_t n, RngStream& rng) {
  if (n < 1) throw ParameterDomainError("random index needs n >= 1");
  const double p = 1.0 / static_cast<double>(n);
  return std::visit(overloaded{[&](const NegBinomialIndex& b) {
                                 return static_cast<std::uint64_t>(detail::negative_binomial_variate(b.nu, p, rng));
                               },
                               [&](const GeometricIndex&) { return static_cast<std::uint64_t>(detail::geometric_variate(p, rng)); },
                               [&](const ScaledMixerIndex& m) {
                                 const double u = draw(m.mixer, rng);
                                 const double v = std::round(static_cast<double>(n) * u);
                                 if (!(v < 9e18)) throw AccuracyError("scaled-mixer index overflow", v, 0);
                                 return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(v));
                               },
                               [&](const FixedIndex&) { return static_cast<std::uint64_t>(n); }},
                    law);
}

namespace detail {

/// Adapts RngStream to the standard UniformRandomBitGenerator concept.
struct StdEngine {
  using result_type = std::uint64_t;
  RngStream* rng;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return rng->next_u64(); }
};

inline void add_summand(const Summand& s, RngStream& rng, std::span<double> acc, std::span<double> tmp) {
  std::visit(overloaded{[&](const EcStableIid& e) {
                          for (std::uint64_t k = 0; !scaled_normal_row(e.sigma, log_subgaussian_scale(e.alpha, rng), rng, tmp); ++k)
                            if (k == kMaxRedrawsPerRow) throw AccuracyError("summand overflow", 0.0, 0);
                        },
                        [&](const FiniteCovIid& f) {
                          if (f.base == FiniteCovBase::MvNormal) {
                            scaled_normal_row(f.sigma, 0.0, rng, tmp);
                          } else {
                            // tmp doubles as the sign vector; apply_factor reads z[j] for j <= i only
                            for (auto& v : tmp) v = rng.sign();
                            for (std::size_t i = tmp.size(); i-- > 0;) {
                              double a = 0.0;
                              for (std::size_t j = 0; j <= i; ++j) a += f.sigma.factor()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * tmp[j];
                              tmp[i] = a;
                            }
                          }
                        }},
             s);
  for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += tmp[j];
}

/// Law-exact shortcut for the whole sum of `count` summands.
inline void fast_sum(const Summand& s, std::uint64_t count, RngStream& rng, std::span<double> out) {
  const double c = static_cast<double>(count);
  std::visit(overloaded{[&](const EcStableIid& e) {
                          // strict stability: X_1 + ... + X_N = N^{1/alpha} X in law
                          scaled_normal_row(e.sigma, std::log(c) / e.alpha + log_subgaussian_scale(e.alpha, rng), rng, out);
                        },
                        [&](const FiniteCovIid& f) {
                          if (f.base == FiniteCovBase::MvNormal) {
                            scaled_normal_row(f.sigma, 0.5 * std::log(c), rng, out);
                          } else {
                            // each coordinate of the sum of N Rademacher vectors is 2 Bin(N, 1/2) - N
                            StdEngine eng{&rng};
                            std::binomial_distribution<std::uint64_t> bin(count, 0.5);
                            std::vector<double> e(out.size());
                            for (auto& v : e) v = 2.0 * static_cast<double>(bin(eng)) - c;
                            f.sigma.apply_factor(e, out);
                          }
                        }},
             s);
}

}  // namespace detail

struct RandomSumBatch {
  SampleBatch values;
  std::vector<std::uint64_t> index;  // N_n per replicate
  std::size_t literal_rows = 0;
};

/// m replicates of d_n^{-e} S_{N_n}; replicate r uses rng.child(r).
inline RandomSumBatch simulate_random_sums(const ExperimentConfig& c, std::size_t n, std::size_t m, const RngStream& rng,
                                           SumPath path = SumPath::Auto, int threads = 0) {
  const std::size_t d = summand_dim(c.summand);
  const double e = normalizing_exponent(c.summand);
  const double log_norm = -e * std::log(c.d_n(n));
  const std::uint64_t cap = path == SumPath::Literal ? ~std::uint64_t{0}
                            : path == SumPath::Fast  ? 0
                                                     : std::max<std::uint64_t>(1, c.literal_budget / std::max<std::size_t>(m, 1));
  RandomSumBatch out{SampleBatch(m, d), std::vector<std::uint64_t>(m), 0};
  std::vector<std::uint8_t> literal(m, 0);
  const std::size_t chunks = (m + kChunkRows - 1) / kChunkRows;
  parallel_for(chunks, threads, [&](std::size_t k) {
    std::vector<double> tmp(d);
    for (std::size_t r = k * kChunkRows; r < std::min(m, (k + 1) * kChunkRows); ++r) {
      RngStream local = rng.child(r);
      const std::uint64_t count = sample_random_index(c.index, n, local);
      out.index[r] = count;
      auto row = out.values.row(r);
      std::fill(row.begin(), row.end(), 0.0);
      if (count <= cap) {
        for (std::uint64_t i = 0; i < count; ++i) detail::add_summand(c.summand, local, row, tmp);
        literal[r] = 1;
      } else {
        detail::fast_sum(c.summand, count, local, row);
      }
      const double f = std::exp(log_norm);
      for (auto& v : row) v *= f;
    }
  });
  for (auto l : literal) out.literal_rows += l;
  out.values.meta.seed = rng.seed();
  out.values.meta.stream_id = rng.stream_id();
  out.values.meta.spec = c.name;
  return out;
}

// ---------------------------------------------------------------------------
// Index condition b_{N_n}/d_n => V

struct IndexConditionReport {
  std::size_t n = 0;
  std::size_t m = 0;
  double ks_distance = 0.0;
  double p_value = 1.0;
  std::string reference;
};

namespace detail {

inline std::optional<std::function<double(double)>> mixer_cdf(const MixerSpec& v) {
  const double s = v.scale;
  if (const auto* c = std::get_if<ConstantMixer>(&v.law)) {
    const double at = c->c * s;
    return [at](double x) { return x >= at ? 1.0 : 0.0; };
  }
  if (const auto* u = std::get_if<UnivariateSpec>(&v.law)) {
    if (std::holds_alternative<Exponential>(*u)) return [s](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x / s); };
    if (const auto* g = std::get_if<Gamma>(u)) {
      const double shape = g->shape, rate = g->rate;
      return [=](double x) { return x <= 0.0 ? 0.0 : boost::math::gamma_p(shape, rate * x / s); };
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// KS distance between the empirical law of N_n/d_n and V. For mixers without
/// a closed-form CDF the reference is an independent batch of m draws of V.
inline IndexConditionReport check_index_condition(const ExperimentConfig& c, std::size_t n, std::size_t m, const RngStream& rng) {
  validate(c.index);
  const MixerSpec v = index_limit(c.index);
  const double dn = c.d_n(n);
  std::vector<double> ratio(m);
  for (std::size_t r = 0; r < m; ++r) {
    RngStream local = rng.child(r);
    ratio[r] = static_cast<double>(sample_random_index(c.index, n, local)) / dn;
  }
  std::sort(ratio.begin(), ratio.end());
  IndexConditionReport rep{n, m, 0.0, 1.0, describe(v)};
  if (auto cdf = detail::mixer_cdf(v)) {
    rep.ks_distance = ks_distance(ratio, *cdf);
    rep.p_value = kolmogorov_q(std::sqrt(static_cast<double>(m)) * rep.ks_distance);
  } else {
    std::vector<double> ref = sample(v, m, rng.child(~std::uint64_t{0})).data();
    std::sort(ref.begin(), ref.end());
    rep.ks_distance = detail::ks_statistic_sorted(ratio, ref);
    rep.p_value = detail::ks_p_value(rep.ks_distance, m, ref.size());
    rep.reference += " (two-sample)";
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Convergence along the ladder

struct LadderPoint {
  std::size_t n = 0;
  double energy_distance = 0.0;
  double distance_se = 0.0;  // spread of the permutation null
  double p_value = 1.0;
  double permutation_p_value = 1.0;
  double ks_index_distance = 0.0;
  double ks_index_p_value = 1.0;
  double literal_fraction = 0.0;
};

struct ConvergenceReport {
  std::string name;
  std::string target;
  std::vector<LadderPoint> points;
  bool top_not_rejected = false;
  bool nonincreasing = false;
  bool pass = false;
  bool partial = false;
  std::string note;
};

inline constexpr double kTrendTolerance = 3.0;

inline void decide(ConvergenceReport& r, double level) {
  r.top_not_rejected = !r.points.empty() && r.points.back().p_value >= level;
  r.nonincreasing = true;
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    const auto& a = r.points[i - 1];
    const auto& b = r.points[i];
    if (b.energy_distance > a.energy_distance + kTrendTolerance * std::hypot(a.distance_se, b.distance_se)) r.nonincreasing = false;
  }
  r.pass = !r.partial && r.top_not_rejected && r.nonincreasing;
}

/// Runs every ladder point: m random sums against m target draws.
inline ConvergenceReport run_random_sum(const ExperimentConfig& c, const RngStream& rng, int threads = 0) {
  validate(c);
  ConvergenceReport rep{c.name, describe(c.target), {}, false, false, false, false, {}};
  for (std::size_t i = 0; i < c.ladder.size(); ++i) {
    const std::size_t n = c.ladder[i];
    const RngStream point = rng.child(i);
    LadderPoint lp;
    lp.n = n;
    try {
      const auto sums = simulate_random_sums(c, n, c.replicates, point.child(0), c.path, threads);
      const auto target = sample(c.target, c.replicates, point.child(1), threads);
      EnergyOptions opt;
      opt.permutations = c.permutations;
      opt.seed = mix64(point.stream_id() ^ rng.seed());
      const auto res = energy_statistic(sums.values, target, opt);
      std::size_t exceed = 0;
      double mean = 0.0, var = 0.0;
      for (double v : res.null_statistics) mean += v;
      mean /= static_cast<double>(res.null_statistics.size());
      for (double v : res.null_statistics) var += (v - mean) * (v - mean);
      lp.energy_distance = res.statistic;
      lp.distance_se = std::sqrt(var / static_cast<double>(res.null_statistics.size() - 1));
      for (double v : res.null_statistics) exceed += v >= res.statistic;
      lp.p_value = detail::gamma_tail(res.statistic, res.null_statistics);
      lp.permutation_p_value = (1.0 + static_cast<double>(exceed)) / (1.0 + static_cast<double>(res.null_statistics.size()));
      lp.literal_fraction = static_cast<double>(sums.literal_rows) / static_cast<double>(c.replicates);
      const auto index = check_index_condition(c, n, c.replicates, point.child(2));
      lp.ks_index_distance = index.ks_distance;
      lp.ks_index_p_value = index.p_value;
    } catch (const AccuracyError& e) {
      rep.partial = true;
      rep.note = "stopped at n = " + std::to_string(n) + ": " + e.what();
      break;
    }
    rep.points.push_back(lp);
  }
  decide(rep, c.level);
  return rep;
}

/// Same machinery for a config whose index law and target are known to
/// disagree; the report is expected to fail.
inline ConvergenceReport necessity_probe(const ExperimentConfig& mismatched, const RngStream& rng, int threads = 0) {
  auto rep = run_random_sum(mismatched, rng, threads);
  rep.note += rep.note.empty() ? "necessity probe" : "; necessity probe";
  return rep;
}

// ---------------------------------------------------------------------------
// Shipped configurations (b_n = d_n = n)

inline SpdMatrix default_limit_sigma() { return make_spd({{4.0, 2.0}, {2.0, 3.0}}); }

/// Heavy-tailed summands, negative binomial index: limit L_{alpha,Sigma,nu}.
inline ExperimentConfig negative_binomial_config(double alpha = 1.4, double nu = 2.0, SpdMatrix sigma = default_limit_sigma()) {
  ExperimentConfig c{"negative-binomial-stable", EcStableIid{alpha, sigma}, NegBinomialIndex{nu}, 1.0, 1.0, {100, 1000, 10000},
                     5000, MvGenLinnik{alpha, sigma, nu, Route::StableRoute}};
  return c;
}

/// Heavy-tailed summands, index n M_{alpha',nu}: limit L_{alpha alpha',Sigma,nu}.
inline ExperimentConfig ml_index_config(double alpha = 1.6, double alpha_prime = 0.8, double nu = 2.0,
                                        SpdMatrix sigma = default_limit_sigma()) {
  return {"ml-index-stable", EcStableIid{alpha, sigma}, ScaledMixerIndex{MixerSpec::of(GenMittagLeffler{alpha_prime, nu})}, 1.0, 1.0,
          {100, 1000, 10000}, 5000, MvGenLinnik{alpha * alpha_prime, sigma, nu, Route::StableRoute}};
}

/// Finite-covariance summands, index n 2 M_{alpha/2,nu}: limit L_{alpha,Sigma,nu}.
inline ExperimentConfig finite_covariance_config(double alpha = 1.4, double nu = 2.0, SpdMatrix sigma = default_limit_sigma(),
                                                 FiniteCovBase base = FiniteCovBase::MvNormal) {
  return {"finite-covariance-ml-index", FiniteCovIid{base, sigma}, ScaledMixerIndex{MixerSpec::of(GenMittagLeffler{alpha / 2.0, nu}, 2.0)},
          1.0, 1.0, {100, 1000, 10000}, 5000, MvGenLinnik{alpha, sigma, nu, Route::StableRoute}};
}

/// Fixed index N_n = n: the stable law itself.
inline ExperimentConfig fixed_index_config(double alpha = 1.4, SpdMatrix sigma = default_limit_sigma()) {
  return {"fixed-index-stable", EcStableIid{alpha, sigma}, FixedIndex{}, 1.0, 1.0, {100, 1000, 10000}, 5000, EcStable{alpha, sigma}};
}

inline std::vector<ExperimentConfig> shipped_configs() {
  return {negative_binomial_config(), ml_index_config(), finite_covariance_config()};
}

/// Fixed index against a generalized Linnik target.
inline ExperimentConfig fixed_index_probe() {
  auto c = fixed_index_config();
  c.name = "probe-fixed-index-vs-linnik";
  c.target = MvGenLinnik{1.4, default_limit_sigma(), 2.0, Route::StableRoute};
  return c;
}

/// Negative binomial nu = 2 against the nu = 5 limit.
inline ExperimentConfig wrong_shape_probe() {
  auto c = negative_binomial_config();
  c.name = "probe-negative-binomial-wrong-nu";
  c.target = MvGenLinnik{1.4, default_limit_sigma(), 5.0, Route::StableRoute};
  return c;
}

inline std::vector<ExperimentConfig> probe_configs() { return {fixed_index_probe(), wrong_shape_probe()}; }

}  // namespace mixstable
