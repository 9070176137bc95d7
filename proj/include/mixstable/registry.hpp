#pragma once

// Catalog of distributional identities. Each case builds two independent
// generative recipes that must agree in law, and is run as a two-sample
// test (KS in one dimension, energy distance otherwise).

#include <fnmatch.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mixstable/error.hpp"
#include "mixstable/multivariate.hpp"
#include "mixstable/recipe.hpp"
#include "mixstable/spd.hpp"
#include "mixstable/tests.hpp"

namespace mixstable {

using Params = std::map<std::string, double>;

struct CaseContext {
  Params params;
  SpdMatrix sigma;
  double p(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end()) throw ConfigError("missing parameter '" + key + "'");
    return it->second;
  }
};

struct IdentityCase {
  std::string id;
  std::string statement;  // the identity in plain notation
  Params defaults;
  bool multivariate = false;
  std::function<void(const CaseContext&)> guard;
  std::function<std::pair<Recipe, Recipe>(const CaseContext&)> build;
};

enum class TestMethod { Auto, Ks, Energy, Both };

struct RunOptions {
  std::size_t n = 0;  // 0: 10^5 for univariate cases, 2*10^4 for multivariate
  std::uint64_t seed = 20240601;
  TestMethod method = TestMethod::Auto;
  std::size_t permutations = 500;
  double level = kDefaultLevel;
  Params params;               // overrides applied to both sides
  Params corrupt_lhs;          // overrides applied to the left side only
  std::optional<SpdMatrix> sigma;
  int threads = 0;
};

inline constexpr std::size_t kDefaultUnivariateN = 100000;
inline constexpr std::size_t kDefaultMultivariateN = 20000;

inline SpdMatrix default_case_sigma() { return make_spd({{4.0, 2.0}, {2.0, 3.0}}); }

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline void need(bool ok, const std::string& id, const std::string& rule) {
  if (!ok) throw ParameterDomainError(id + ": requires " + rule);
}

inline bool is_integer(double x) { return x >= 1.0 && x == std::floor(x); }

inline Factor z_power(double nu, double power) {
  // Z_{1,1} = 1, so nu = 1 contributes a constant factor
  if (nu == 1.0) return {Gamma{1.0, 1.0}, 0.0, 1.0};
  return {MixedExpMixer{nu, 1.0}, power, 1.0};
}

inline std::vector<Factor> strip_constants(std::vector<Factor> f) {
  std::erase_if(f, [](const Factor& x) { return x.power == 0.0; });
  return f;
}

inline Recipe make_recipe(std::string text, std::vector<Factor> factors, std::optional<MultivariateSpec> vec = std::nullopt,
                          std::size_t sum_of = 1) {
  return Recipe{std::move(text), strip_constants(std::move(factors)), std::move(vec), sum_of};
}

}  // namespace detail

/// All registered cases, in a fixed order.
inline const std::vector<IdentityCase>& identity_registry() {
  using detail::make_recipe;
  using detail::need;
  using detail::z_power;
  static const std::vector<IdentityCase> cases = [] {
    std::vector<IdentityCase> v;

    v.push_back({"weibull-power", "W_{g g'} = W_{g'}^{1/g}", {{"gamma", 2.0}, {"gamma_prime", 0.5}}, false,
                 [](const CaseContext& c) { need(c.p("gamma") > 0 && c.p("gamma_prime") > 0, "weibull-power", "gamma, gamma_prime > 0"); },
                 [](const CaseContext& c) {
                   const double g = c.p("gamma"), gp = c.p("gamma_prime");
                   return std::pair{make_recipe("W_{g g'}", {{Weibull{g * gp}}}),
                                    make_recipe("W_{g'}^{1/g}", {{Weibull{gp}, 1.0 / g}})};
                 }});

    v.push_back({"gamma-mixed-exponential", "G_{r,mu} = W_1 / Z_{r,mu}", {{"r", 0.5}, {"mu", 1.0}}, false,
                 [](const CaseContext& c) { need(c.p("r") > 0 && c.p("r") < 1 && c.p("mu") > 0, "gamma-mixed-exponential", "0 < r < 1, mu > 0"); },
                 [](const CaseContext& c) {
                   const double r = c.p("r"), mu = c.p("mu");
                   return std::pair{make_recipe("G_{r,mu}", {{Gamma{r, mu}}}),
                                    make_recipe("W_1 Z_{r,mu}^{-1}", {{Exponential{}}, {MixedExpMixer{r, mu}, -1.0}})};
                 }});

    v.push_back({"stable-multiplication", "S(a a',1) = S(a',1)^{1/a} S(a,1)", {{"alpha", 0.5}, {"alpha_prime", 0.5}}, false,
                 [](const CaseContext& c) {
                   need(c.p("alpha") > 0 && c.p("alpha") <= 1 && c.p("alpha_prime") > 0 && c.p("alpha_prime") <= 1,
                        "stable-multiplication", "0 < alpha, alpha_prime <= 1");
                 },
                 [](const CaseContext& c) {
                   const double a = c.p("alpha"), ap = c.p("alpha_prime");
                   return std::pair{make_recipe("S(a a',1)", {{OneSidedStable{a * ap}}}),
                                    make_recipe("S(a',1)^{1/a} S(a,1)", {{OneSidedStable{ap}, 1.0 / a}, {OneSidedStable{a}}})};
                 }});

    v.push_back({"ec-stable-subgaussian", "s S(a,0) = sqrt(2 S(a/2,1)) X, X ~ N(0, s^2)", {{"alpha", 1.2}, {"scale", 1.5}}, false,
                 [](const CaseContext& c) { need(c.p("alpha") > 0 && c.p("alpha") <= 2 && c.p("scale") > 0, "ec-stable-subgaussian", "0 < alpha <= 2, scale > 0"); },
                 [](const CaseContext& c) {
                   const double a = c.p("alpha"), s = c.p("scale");
                   return std::pair{make_recipe("s S(a,0)", {{SymmetricStable{a}, 1.0, s}}),
                                    make_recipe("sqrt(2 S(a/2,1)) s X", {{OneSidedStable{a / 2.0}, 0.5, 2.0}, {Normal{}, 1.0, s}})};
                 }});

    v.push_back({"ec-stable-multiplication", "S(a a',Sigma,0) = S(a',1)^{1/a} S(a,Sigma,0)", {{"alpha", 1.6}, {"alpha_prime", 0.5}}, true,
                 [](const CaseContext& c) {
                   need(c.p("alpha") > 0 && c.p("alpha") <= 2 && c.p("alpha_prime") > 0 && c.p("alpha_prime") <= 1,
                        "ec-stable-multiplication", "0 < alpha <= 2, 0 < alpha_prime <= 1");
                 },
                 [](const CaseContext& c) {
                   const double a = c.p("alpha"), ap = c.p("alpha_prime");
                   return std::pair{make_recipe("S(a a',Sigma,0)", {}, EcStable{a * ap, c.sigma}),
                                    make_recipe("S(a',1)^{1/a} S(a,Sigma,0)", {{OneSidedStable{ap}, 1.0 / a}}, EcStable{a, c.sigma})};
                 }});

    v.push_back({"gen-ml-product", "M_{d,nu} = S(d,1) G_nu^{1/d} = sum of nu i.i.d. M_d", {{"delta", 0.7}, {"nu", 2.0}}, false,
                 [](const CaseContext& c) {
                   need(c.p("delta") > 0 && c.p("delta") <= 1 && detail::is_integer(c.p("nu")), "gen-ml-product", "0 < delta <= 1, integer nu >= 1");
                 },
                 [](const CaseContext& c) {
                   const double d = c.p("delta"), nu = c.p("nu");
                   return std::pair{make_recipe("S(d,1) G_nu^{1/d}", {{OneSidedStable{d}}, {Gamma{nu}, 1.0 / d}}),
                                    make_recipe("sum_nu M_d", {{MittagLeffler{d}}}, std::nullopt, static_cast<std::size_t>(nu))};
                 }});

    v.push_back({"gen-ml-mixer", "M_{d,nu} = Z_{nu,1}^{-1/d} M_d", {{"delta", 0.7}, {"nu", 0.6}}, false,
                 [](const CaseContext& c) {
                   need(c.p("delta") > 0 && c.p("delta") <= 1 && c.p("nu") > 0 && c.p("nu") <= 1, "gen-ml-mixer", "0 < delta <= 1, 0 < nu <= 1");
                 },
                 [](const CaseContext& c) {
                   const double d = c.p("delta"), nu = c.p("nu");
                   return std::pair{make_recipe("M_{d,nu}", {{GenMittagLeffler{d, nu}}}),
                                    make_recipe("Z_{nu,1}^{-1/d} M_d", {z_power(nu, -1.0 / d), {MittagLeffler{d}}})};
                 }});

    v.push_back({"gen-ml-stable-mixture", "M_{d d',nu} = S(d,1) M_{d',nu}^{1/d}", {{"delta", 0.8}, {"delta_prime", 0.6}, {"nu", 2.0}}, false,
                 [](const CaseContext& c) {
                   need(c.p("delta") > 0 && c.p("delta") <= 1 && c.p("delta_prime") > 0 && c.p("delta_prime") < 1 && c.p("nu") > 0,
                        "gen-ml-stable-mixture", "0 < delta <= 1, 0 < delta_prime < 1, nu > 0");
                 },
                 [](const CaseContext& c) {
                   const double d = c.p("delta"), dp = c.p("delta_prime"), nu = c.p("nu");
                   return std::pair{make_recipe("M_{d d',nu}", {{GenMittagLeffler{d * dp, nu}}}),
                                    make_recipe("S(d,1) M_{d',nu}^{1/d}", {{OneSidedStable{d}}, {GenMittagLeffler{dp, nu}, 1.0 / d}})};
                 }});

    v.push_back({"linnik-normal-mixture", "W_1^{1/a} S(a,0) = sqrt(2 M_{a/2}) X", {{"alpha", 1.4}}, false,
                 [](const CaseContext& c) { need(c.p("alpha") > 0 && c.p("alpha") <= 2, "linnik-normal-mixture", "0 < alpha <= 2"); },
                 [](const CaseContext& c) {
                   const double a = c.p("alpha");
                   return std::pair{make_recipe("W_1^{1/a} S(a,0)", {{Exponential{}, 1.0 / a}, {SymmetricStable{a}}}),
                                    make_recipe("sqrt(2 M_{a/2}) X", {{MittagLeffler{a / 2.0}, 0.5, 2.0}, {Normal{}}})};
                 }});

    v.push_back({"gen-linnik-product", "S(a,0) G_nu^{1/a} = sum of nu i.i.d. L_a", {{"alpha", 1.5}, {"nu", 3.0}}, false,
                 [](const CaseContext& c) {
                   need(c.p("alpha") > 0 && c.p("alpha") <= 2 && detail::is_integer(c.p("nu")), "gen-linnik-product", "0 < alpha <= 2, integer nu >= 1");
                 },
                 [](const CaseContext& c) {
                   const double a = c.p("alpha"), nu = c.p("nu");
                   return std::pair{make_recipe("S(a,0) G_nu^{1/a}", {{SymmetricStable{a}}, {Gamma{nu}, 1.0 / a}}),
                                    make_recipe("sum_nu sqrt(2 M_{a/2}) X", {{MittagLeffler{a / 2.0}, 0.5, 2.0}, {Normal{}}}, std::nullopt,
                                                static_cast<std::size_t>(nu))};
                 }});

    v.push_back({"gen-linnik-normal-mixture", "S(a,0) G_nu^{1/a} = X sqrt(2 M_{a/2,nu})", {{"alpha", 1.5}, {"nu", 2.5}}, false,
                 [](const CaseContext& c) { need(c.p("alpha") > 0 && c.p("alpha") <= 2 && c.p("nu") > 0, "gen-linnik-normal-mixture", "0 < alpha <= 2, nu > 0"); },
                 [](const CaseContext& c) {
                   const double a = c.p("alpha"), nu = c.p("nu");
                   return std::pair{make_recipe("S(a,0) G_nu^{1/a}", {{SymmetricStable{a}}, {Gamma{nu}, 1.0 / a}}),
                                    make_recipe("X sqrt(2 M_{a/2,nu})", {{Normal{}}, {GenMittagLeffler{a / 2.0, nu}, 0.5, 2.0}})};
                 }});

    v.push_back({"gen-gamma-power", "G_nu^{1/(a a')} = (G_nu^{1/a'})^{1/a}", {{"alpha", 1.5}, {"alpha_prime", 0.7}, {"nu", 1.5}}, false,
                 [](const CaseContext& c) {
                   need(c.p("alpha") > 0 && c.p("alpha_prime") > 0 && c.p("nu") > 0, "gen-gamma-power", "alpha, alpha_prime, nu > 0");
                 },
                 [](const CaseContext& c) {
                   const double a = c.p("alpha"), ap = c.p("alpha_prime"), nu = c.p("nu");
                   return std::pair{make_recipe("GG(nu, a a')", {{GeneralizedGamma{nu, a * ap}}}),
                                    make_recipe("GG(nu, a')^{1/a}", {{GeneralizedGamma{nu, ap}, 1.0 / a}})};
                 }});

    v.push_back({"gen-linnik-stable-mixture", "L_{a a',nu} = S(a,0) M_{a',nu}^{1/a}", {{"alpha", 1.8}, {"alpha_prime", 0.6}, {"nu", 1.5}}, false,
                 [](const CaseContext& c) {
                   need(c.p("alpha") > 0 && c.p("alpha") <= 2 && c.p("alpha_prime") > 0 && c.p("alpha_prime") < 1 && c.p("nu") > 0,
                        "gen-linnik-stable-mixture", "0 < alpha <= 2, 0 < alpha_prime < 1, nu > 0");
                 },
                 [](const CaseContext& c) {
                   const double a = c.p("alpha"), ap = c.p("alpha_prime"), nu = c.p("nu");
                   return std::pair{make_recipe("S(a a',0) G_nu^{1/(a a')}", {{SymmetricStable{a * ap}}, {Gamma{nu}, 1.0 / (a * ap)}}),
                                    make_recipe("S(a,0) M_{a',nu}^{1/a}", {{SymmetricStable{a}}, {GenMittagLeffler{ap, nu}, 1.0 / a}})};
                 }});

    v.push_back({"gen-linnik-linnik-mixture", "L_{a,nu} = L_a Z_{nu,1}^{-1/a}", {{"alpha", 1.5}, {"nu", 0.6}}, false,
                 [](const CaseContext& c) {
                   need(c.p("alpha") > 0 && c.p("alpha") <= 2 && c.p("nu") > 0 && c.p("nu") <= 1, "gen-linnik-linnik-mixture", "0 < alpha <= 2, 0 < nu <= 1");
                 },
                 [](const CaseContext& c) {
                   const double a = c.p("alpha"), nu = c.p("nu");
                   return std::pair{make_recipe("S(a,0) G_nu^{1/a}", {{SymmetricStable{a}}, {Gamma{nu}, 1.0 / a}}),
                                    make_recipe("L_a Z_{nu,1}^{-1/a}", {{Linnik{a}}, z_power(nu, -1.0 / a)})};
                 }});

    v.push_back({"gen-linnik-laplace-mixture", "L_{a,nu} = Lambda Z_{nu,1}^{-1/a} sqrt(R_{a/2})", {{"alpha", 1.5}, {"nu", 0.6}}, false,
                 [](const CaseContext& c) {
                   need(c.p("alpha") > 0 && c.p("alpha") <= 2 && c.p("nu") > 0 && c.p("nu") <= 1, "gen-linnik-laplace-mixture", "0 < alpha <= 2, 0 < nu <= 1");
                 },
                 [](const CaseContext& c) {
                   const double a = c.p("alpha"), nu = c.p("nu");
                   return std::pair{make_recipe("S(a,0) G_nu^{1/a}", {{SymmetricStable{a}}, {Gamma{nu}, 1.0 / a}}),
                                    make_recipe("Lambda Z_{nu,1}^{-1/a} sqrt(R_{a/2})",
                                                {{Laplace{}}, z_power(nu, -1.0 / a), {StableRatio{a / 2.0}, 0.5}})};
                 }});

    v.push_back({"mv-gen-linnik-stable-mixture", "L_{a a',Sigma,nu} = M_{a',nu}^{1/a} S(a,Sigma,0)",
                 {{"alpha", 1.8}, {"alpha_prime", 0.7}, {"nu", 1.5}}, true,
                 [](const CaseContext& c) {
                   need(c.p("alpha") > 0 && c.p("alpha") <= 2 && c.p("alpha_prime") > 0 && c.p("alpha_prime") < 1 && c.p("nu") > 0,
                        "mv-gen-linnik-stable-mixture", "0 < alpha <= 2, 0 < alpha_prime < 1, nu > 0");
                 },
                 [](const CaseContext& c) {
                   const double a = c.p("alpha"), ap = c.p("alpha_prime"), nu = c.p("nu");
                   return std::pair{make_recipe("L_{a a',Sigma,nu}", {}, MvGenLinnik{a * ap, c.sigma, nu}),
                                    make_recipe("M_{a',nu}^{1/a} S(a,Sigma,0)", {{GenMittagLeffler{ap, nu}, 1.0 / a}}, EcStable{a, c.sigma})};
                 }});

    v.push_back({"mv-gen-linnik-linnik-mixture", "L_{a,Sigma,nu} = Z_{nu,1}^{-1/a} L_{a,Sigma}", {{"alpha", 1.5}, {"nu", 0.6}}, true,
                 [](const CaseContext& c) {
                   need(c.p("alpha") > 0 && c.p("alpha") <= 2 && c.p("nu") > 0 && c.p("nu") <= 1, "mv-gen-linnik-linnik-mixture",
                        "0 < alpha <= 2, 0 < nu <= 1");
                 },
                 [](const CaseContext& c) {
                   const double a = c.p("alpha"), nu = c.p("nu");
                   return std::pair{make_recipe("L_{a,Sigma,nu}", {}, MvGenLinnik{a, c.sigma, nu}),
                                    make_recipe("Z_{nu,1}^{-1/a} L_{a,Sigma}", {z_power(nu, -1.0 / a)}, MvLinnik{a, c.sigma})};
                 }});

    v.push_back({"weibull-stable-ratio", "W_d = W_1 / S(d,1)", {{"delta", 0.6}}, false,
                 [](const CaseContext& c) { need(c.p("delta") > 0 && c.p("delta") <= 1, "weibull-stable-ratio", "0 < delta <= 1"); },
                 [](const CaseContext& c) {
                   const double d = c.p("delta");
                   return std::pair{make_recipe("W_d", {{Weibull{d}}}),
                                    make_recipe("W_1 S(d,1)^{-1}", {{Exponential{}}, {OneSidedStable{d}, -1.0}})};
                 }});

    v.push_back({"mv-linnik-laplace-mixture", "W_1^{1/a} S(a,Sigma,0) = sqrt(R_{a/2}) Lambda_Sigma", {{"alpha", 1.5}}, true,
                 [](const CaseContext& c) { need(c.p("alpha") > 0 && c.p("alpha") <= 2, "mv-linnik-laplace-mixture", "0 < alpha <= 2"); },
                 [](const CaseContext& c) {
                   const double a = c.p("alpha");
                   return std::pair{make_recipe("W_1^{1/a} S(a,Sigma,0)", {}, MvLinnik{a, c.sigma, Route::StableRoute}),
                                    make_recipe("sqrt(R_{a/2}) Lambda_Sigma", {{StableRatio{a / 2.0}, 0.5}}, MvLaplace{c.sigma})};
                 }});

    v.push_back({"scale-mixed-multiplication", "Y_{a a',Sigma,0} = Y_{a',1}^{1/a} S(a,Sigma,0), U = G_nu",
                 {{"alpha", 1.6}, {"alpha_prime", 0.6}, {"nu", 2.0}}, true,
                 [](const CaseContext& c) {
                   need(c.p("alpha") > 0 && c.p("alpha") <= 2 && c.p("alpha_prime") > 0 && c.p("alpha_prime") <= 1 && c.p("nu") > 0,
                        "scale-mixed-multiplication", "0 < alpha <= 2, 0 < alpha_prime <= 1, nu > 0");
                 },
                 [](const CaseContext& c) {
                   const double a = c.p("alpha"), ap = c.p("alpha_prime"), nu = c.p("nu");
                   return std::pair{
                       make_recipe("U^{1/(a a')} S(a a',Sigma,0)", {}, ScaleMixedStable{a * ap, c.sigma, MixerSpec::of(Gamma{nu})}),
                       make_recipe("(U^{1/a'} S(a',1))^{1/a} S(a,Sigma,0)", {{Gamma{nu}, 1.0 / (a * ap)}, {OneSidedStable{ap}, 1.0 / a}},
                                   EcStable{a, c.sigma})};
                 }});

    v.push_back({"scale-mixed-normal-mixture", "U^{1/a} s S(a,0) = sqrt(2 Y_{a/2,1}) s X, U = V G_nu, V = F(a_v, b_v)",
                 {{"alpha", 1.4}, {"nu", 2.0}, {"a_v", 1.5}, {"b_v", 3.0}, {"scale", 1.0}}, false,
                 [](const CaseContext& c) {
                   need(c.p("alpha") > 0 && c.p("alpha") < 2 && c.p("nu") > 0 && c.p("a_v") > 0 && c.p("b_v") > 0 && c.p("scale") > 0,
                        "scale-mixed-normal-mixture", "0 < alpha < 2, nu, a_v, b_v, scale > 0");
                 },
                 [](const CaseContext& c) {
                   const double a = c.p("alpha"), nu = c.p("nu"), s = c.p("scale");
                   const SnedecorFisher v{c.p("a_v"), c.p("b_v")};
                   return std::pair{
                       make_recipe("(V G_nu)^{1/a} s S(a,0)", {{v, 1.0 / a}, {Gamma{nu}, 1.0 / a}, {SymmetricStable{a}, 1.0, s}}),
                       make_recipe("sqrt(2 (V G_nu)^{2/a} S(a/2,1)) s X",
                                   {{v, 1.0 / a}, {Gamma{nu}, 1.0 / a}, {OneSidedStable{a / 2.0}, 0.5, 2.0}, {Normal{}, 1.0, s}})};
                 }});

    v.push_back({"mv-gen-linnik-laplace-mixture", "L_{a,Sigma,nu} = Z_{nu,1}^{-1/a} sqrt(R_{a/2}) Lambda_Sigma", {{"alpha", 1.5}, {"nu", 0.6}}, true,
                 [](const CaseContext& c) {
                   need(c.p("alpha") > 0 && c.p("alpha") <= 2 && c.p("nu") > 0 && c.p("nu") <= 1, "mv-gen-linnik-laplace-mixture",
                        "0 < alpha <= 2, 0 < nu <= 1");
                 },
                 [](const CaseContext& c) {
                   const double a = c.p("alpha"), nu = c.p("nu");
                   return std::pair{make_recipe("L_{a,Sigma,nu}", {}, MvGenLinnik{a, c.sigma, nu}),
                                    make_recipe("Z_{nu,1}^{-1/a} sqrt(R_{a/2}) Lambda_Sigma",
                                                {z_power(nu, -1.0 / a), {StableRatio{a / 2.0}, 0.5}}, MvLaplace{c.sigma})};
                 }});

    v.push_back({"mv-gen-linnik-ml-mixture", "L_{a,Sigma,nu} = Z_{nu,1}^{-1/a} sqrt(2 M_{a/2}) X", {{"alpha", 1.5}, {"nu", 0.6}}, true,
                 [](const CaseContext& c) {
                   need(c.p("alpha") > 0 && c.p("alpha") <= 2 && c.p("nu") > 0 && c.p("nu") <= 1, "mv-gen-linnik-ml-mixture",
                        "0 < alpha <= 2, 0 < nu <= 1");
                 },
                 [](const CaseContext& c) {
                   const double a = c.p("alpha"), nu = c.p("nu");
                   return std::pair{make_recipe("L_{a,Sigma,nu}", {}, MvGenLinnik{a, c.sigma, nu, Route::StableRoute}),
                                    make_recipe("Z_{nu,1}^{-1/a} sqrt(2 M_{a/2}) X",
                                                {z_power(nu, -1.0 / a), {MittagLeffler{a / 2.0}, 0.5, 2.0}}, MvNormal{c.sigma})};
                 }});
    return v;
  }();
  return cases;
}

inline const IdentityCase& find_case(const std::string& id) {
  for (const auto& c : identity_registry())
    if (c.id == id) return c;
  throw UnknownIdentityError("unknown identity case '" + id + "'");
}

/// Shell-style pattern match ('*', '?', '[...]').
inline bool matches(const std::string& pattern, const std::string& id) {
  return ::fnmatch(pattern.c_str(), id.c_str(), 0) == 0;
}

inline std::vector<std::string> list_cases(const std::string& pattern = "*") {
  std::vector<std::string> ids;
  for (const auto& c : identity_registry())
    if (matches(pattern, c.id)) ids.push_back(c.id);
  return ids;
}

namespace detail {

inline CaseContext make_context(const IdentityCase& c, const RunOptions& opt, const Params& extra) {
  CaseContext ctx{c.defaults, opt.sigma.value_or(default_case_sigma())};
  for (const auto& [k, val] : opt.params) {
    if (!ctx.params.contains(k)) throw ConfigError(c.id + ": unknown parameter '" + k + "'");
    ctx.params[k] = val;
  }
  for (const auto& [k, val] : extra) {
    if (!ctx.params.contains(k)) throw ConfigError(c.id + ": unknown parameter '" + k + "'");
    ctx.params[k] = val;
  }
  c.guard(ctx);
  return ctx;
}

}  // namespace detail

/// Samples both recipes of a case on disjoint streams and tests equality in law.
inline TestReport run_identity(const IdentityCase& c, const RunOptions& opt = {}) {
  const auto ctx = detail::make_context(c, opt, {});
  auto [lhs, rhs] = c.build(ctx);
  if (!opt.corrupt_lhs.empty()) lhs = c.build(detail::make_context(c, opt, opt.corrupt_lhs)).first;
  if (lhs.dim() != rhs.dim()) throw DimensionMismatchError(c.id + ": recipes differ in dimension");
  const std::size_t n = opt.n ? opt.n : (lhs.dim() == 1 ? kDefaultUnivariateN : kDefaultMultivariateN);
  const std::uint64_t base = detail::fnv1a(c.id);
  const RngStream left(opt.seed, base * 2), right(opt.seed, base * 2 + 1);
  const auto a = sample(lhs, n, left, opt.threads);
  const auto b = sample(rhs, n, right, opt.threads);

  TestMethod method = opt.method;
  if (method == TestMethod::Auto) method = lhs.dim() == 1 ? TestMethod::Ks : TestMethod::Energy;
  EnergyOptions eopt;
  eopt.permutations = opt.permutations;
  eopt.seed = opt.seed ^ base;

  TestReport r;
  if (method == TestMethod::Ks || method == TestMethod::Both) {
    const SampleBatch a1(a.column(0), 1), b1(b.column(0), 1);
    r = ks_two_sample(a1, b1);
    if (lhs.dim() > 1) r.note = "KS on the first coordinate";
  }
  if (method == TestMethod::Energy) r = energy_test(a, b, eopt);
  if (method == TestMethod::Both) {
    const auto e = energy_test(a, b, eopt);
    r.method = "ks+energy";
    r.permutation_p_value = e.permutation_p_value;
    r.p_value = std::min(1.0, 2.0 * std::min(r.p_value, e.p_value));
    r.note = "Bonferroni over KS and energy (energy statistic " + std::to_string(e.statistic) + ")";
  }
  r.id = c.id;
  r.n_a = a.size();
  r.n_b = b.size();
  r.seed = opt.seed;
  r.level = opt.level;
  r.params = ctx.params;
  for (const auto& [k, val] : opt.corrupt_lhs) r.params["lhs:" + k] = val;
  r.decide();
  return r;
}

inline TestReport run_identity(const std::string& id, const RunOptions& opt = {}) { return run_identity(find_case(id), opt); }

struct RegistrySummary {
  std::vector<TestReport> reports;  // ordered by case id
  std::size_t passed = 0;
  std::size_t failed = 0;
  bool all_pass() const { return failed == 0; }
};

/// Runs every case matching `pattern` and applies Holm's correction across them.
inline RegistrySummary run_registry(const std::string& pattern, const RunOptions& opt = {}) {
  RegistrySummary s;
  for (const auto& id : list_cases(pattern)) s.reports.push_back(run_identity(id, opt));
  holm_adjust(s.reports);
  std::sort(s.reports.begin(), s.reports.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (const auto& r : s.reports) (r.pass ? s.passed : s.failed)++;
  return s;
}

}  // namespace mixstable
