// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [criterion numbers...]

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mixstable/cli.hpp"
#include "mixstable/mixstable.hpp"

using namespace mixstable;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures.push_back(what);
    }
  }
};

const SpdMatrix& sigma_for(std::size_t d) {
  static const std::vector<SpdMatrix> s{make_spd({{2.0}}), make_spd({{4, 2}, {2, 3}}),
                                        make_spd({{4, 2, 1}, {2, 3, 0.5}, {1, 0.5, 2}})};
  return s[d - 1];
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome identity_registry_criterion() {
  Outcome o;
  RunOptions opt;
  opt.permutations = 500;
  const auto s = run_registry("*", opt);
  double min_adj = 1.0;
  for (const auto& r : s.reports) {
    o.check(r.pass, r.id + " adjusted p = " + fmt("%.3g", r.adjusted_p_value.value_or(r.p_value)));
    min_adj = std::min(min_adj, r.adjusted_p_value.value_or(r.p_value));
  }
  o.check(s.reports.size() == identity_registry().size(), "not every case ran");
  o.detail = std::to_string(s.passed) + "/" + std::to_string(s.reports.size()) + " cases pass, smallest Holm-adjusted p " +
             fmt("%.3g", min_adj);
  return o;
}

std::vector<std::vector<double>> cf_grid(std::size_t d) {
  std::vector<std::vector<double>> g;
  const double radii[] = {0.1, 0.25, 0.4, 0.6, 0.8, 1.0, 1.3, 1.7};
  for (int k = 0; k < 8; ++k) {
    std::vector<double> t(d);
    if (d == 1) {
      t[0] = radii[k];
    } else {
      // directions spread over the sphere, one per radius
      double norm = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        t[j] = std::cos(0.9 * k + 1.7 * static_cast<double>(j));
        norm += t[j] * t[j];
      }
      for (auto& v : t) v *= radii[k] / std::sqrt(norm);
    }
    g.push_back(t);
  }
  return g;
}

Outcome cf_agreement_criterion() {
  Outcome o;
  std::vector<TestReport> reports;
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto& s = sigma_for(d);
    const std::vector<std::pair<std::string, MultivariateSpec>> specs{
        {"ec-stable", EcStable{1.3, s}},
        {"mv-laplace", MvLaplace{s}},
        {"mv-linnik", MvLinnik{1.5, s}},
        {"mv-gen-linnik", MvGenLinnik{1.4, s, 2.0}},
        {"scale-mixed-stable(W1)", ScaleMixedStable{1.5, s, MixerSpec::of(Exponential{})}},
        {"scale-mixed-stable(G)", ScaleMixedStable{1.2, s, MixerSpec::of(Gamma{2.5})}},
        {"scale-mixed-stable(const)", ScaleMixedStable{1.7, s, MixerSpec::constant(2.0)}},
    };
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const auto& [name, spec] = specs[i];
      const auto batch = sample(spec, 1000000, RngStream(0xC0FFEE, 10 * d + i));
      std::function<Complex(std::span<const double>)> f;
      if (const auto* m = std::get_if<ScaleMixedStable>(&spec)) {
        f = [m](std::span<const double> t) { return Complex(cf_scale_mixed(m->alpha, m->sigma, m->mixer, t), 0.0); };
      } else {
        f = [&spec](std::span<const double> t) { return cf(spec, t); };
      }
      auto r = cf_distance_test(batch, f, cf_grid(d));
      r.id = name + " d=" + std::to_string(d);
      reports.push_back(r);
    }
  }
  // across-family correction on top of the per-grid Bonferroni bound
  holm_adjust(reports);
  double zmax = 0.0;
  for (const auto& r : reports) {
    o.check(r.pass, r.id + " max |z| = " + fmt("%.2f", r.statistic));
    zmax = std::max(zmax, r.statistic);
  }
  o.detail = std::to_string(reports.size()) + " law/dimension pairs, n = 1e6, largest |z| " + fmt("%.2f", zmax) +
             " (per-grid critical " + fmt("%.2f", cf_critical_value(16)) + ")";
  return o;
}

Outcome density_criterion() {
  Outcome o;
  const std::vector<UnivariateSpec> laws{Gamma{0.6, 2.0},      Gamma{3.0, 0.5},          GeneralizedGamma{1.5, 0.7, 1.2},
                                         GeneralizedGamma{2.0, 2.5}, Weibull{0.8},           Weibull{2.5},
                                         MittagLeffler{0.3},   MittagLeffler{0.6},       MittagLeffler{0.9},
                                         MixedExpMixer{0.4, 1.0}, MixedExpMixer{0.8, 3.0}, SnedecorFisher{0.5, 0.5},
                                         SnedecorFisher{3.0, 5.0}, StableRatio{0.3},      StableRatio{0.75}};
  double worst_mass = 0.0;
  for (const auto& u : laws) {
    const double err = std::abs(density_total_mass(u) - 1.0);
    worst_mass = std::max(worst_mass, err);
    o.check(err <= 1e-6, describe(u) + " mass error " + fmt("%.2e", err));
  }
  double worst_rec = 0.0;
  boost::math::quadrature::exp_sinh<double> es;
  boost::math::quadrature::tanh_sinh<double> ts;
  for (auto [r, mu, x] : {std::tuple{0.4, 1.0, 0.7}, {0.1, 1.0, 1.5}, {0.5, 2.0, 0.3}, {0.9, 0.5, 3.0}, {0.25, 4.0, 0.05}}) {
    // integrate in u = z - mu: the mixer density is singular at z = mu
    const auto f = [&](double u) { return (mu + u) * std::exp(-(mu + u) * x) * mixed_exp_mixer_density_above({r, mu}, u); };
    const double lhs = ts.integrate(f, 0.0, 1.0, 1e-13) + es.integrate([&](double u) { return f(1.0 + u); }, 1e-13);
    const double rhs = density(Gamma{r, mu}, x);
    const double err = std::abs(lhs / rhs - 1.0);
    worst_rec = std::max(worst_rec, err);
    o.check(err <= 1e-6, "mixed-exponential reconstruction at r=" + fmt("%g", r) + " error " + fmt("%.2e", err));
  }
  double worst_ml = 0.0;
  for (int i = 0; i <= 500; ++i) {
    const double x = 0.01 * i;
    const double ref = std::exp(x * x) * std::erfc(x);
    const double err = std::abs(mittag_leffler_function(0.5, -x) / ref - 1.0);
    worst_ml = std::max(worst_ml, err);
  }
  o.check(worst_ml <= 1e-10, "E_{1/2}(-x) relative error " + fmt("%.2e", worst_ml));
  o.detail = std::to_string(laws.size()) + " densities, worst mass error " + fmt("%.1e", worst_mass) + "; reconstruction " +
             fmt("%.1e", worst_rec) + "; E_1/2 vs erfc " + fmt("%.1e", worst_ml);
  return o;
}

Outcome moment_criterion() {
  Outcome o;
  // orders below half the tail index keep the Monte Carlo variance finite
  const std::vector<std::pair<UnivariateSpec, double>> cases{
      {OneSidedStable{0.6}, 0.25},     {OneSidedStable{0.8}, 0.3},  {SymmetricStable{1.5}, 0.5},
      {SymmetricStable{1.9}, 0.9},     {SymmetricStable{2.0}, 2.0}, {GenMittagLeffler{0.7, 2.0}, 0.3},
      {GenMittagLeffler{0.5, 0.5}, 0.2}, {MittagLeffler{0.8}, 0.35},  {GeneralizedGamma{2.0, 2.0}, 1.0},
      {Gamma{0.7}, 0.5},               {Gamma{2.0}, 3.0}};
  double worst = 0.0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& [u, b] = cases[i];
    const auto est = empirical_abs_moment(sample(u, 1000000, RngStream(0x3011, i)), b);
    const double z = std::abs(est.value - analytic_moment(u, b).value) / est.se;
    worst = std::max(worst, z);
    o.check(z <= 3.0, describe(u) + " order " + fmt("%g", b) + " |z| = " + fmt("%.2f", z));
  }
  // S(1/2,1) is 1/(2 Z^2): E X^{1/4} = Gamma(1/4) / sqrt(2 pi)
  const double levy = std::tgamma(0.25) / std::sqrt(2.0 * std::numbers::pi);
  const double implemented = analytic_moment(OneSidedStable{0.5}, 0.25).value;
  const auto diag = moment_diagnostics(OneSidedStable{0.5}, 0.25);
  o.check(std::abs(implemented - levy) <= 1e-12, "one-sided stable moment disagrees with the Levy closed form");
  o.check(std::abs(implemented - 1.4465) <= 1e-4, "E S(1/2,1)^{1/4} is not 1.4465");
  o.check(diag.alternative && std::abs(*diag.alternative - levy) > 0.1, "alternative form unexpectedly matches");
  o.detail = std::to_string(cases.size()) + " Monte Carlo checks, largest |z| " + fmt("%.2f", worst) + "; E S(1/2,1)^{1/4} = " +
             fmt("%.6f", implemented) + " (alternative form " + fmt("%.6f", diag.alternative.value_or(0.0)) + ")";
  return o;
}

Outcome limit_criterion() {
  Outcome o;
  std::ostringstream detail;
  auto line = [&](const ConvergenceReport& r) {
    std::ostringstream s;
    s << r.name << " [";
    for (std::size_t i = 0; i < r.points.size(); ++i)
      s << (i ? " " : "") << "n=" << r.points[i].n << ":E=" << fmt("%.2e", r.points[i].energy_distance)
        << ",p=" << fmt("%.2g", r.points[i].p_value) << ",ks=" << fmt("%.3f", r.points[i].ks_index_distance);
    s << "]";
    return s.str();
  };
  const RngStream rng(0x11A17, 5);
  std::size_t k = 0;
  for (const auto& c : shipped_configs()) {
    const auto r = run_random_sum(c, rng.child(k++));
    std::printf("  %s -> %s\n", line(r).c_str(), r.pass ? "pass" : "fail");
    o.check(r.pass, c.name + " did not converge");
    o.check(r.points.size() == 3 && r.points.back().ks_index_p_value >= 1e-3, c.name + " index condition rejected at the top");
  }
  for (const auto& c : probe_configs()) {
    const auto r = necessity_probe(c, rng.child(k++));
    std::printf("  %s -> %s\n", line(r).c_str(), r.pass ? "pass" : "fail");
    o.check(!r.pass, c.name + " passed although its target is wrong");
  }
  o.detail = "3 shipped configs converge on {1e2, 1e3, 1e4} with m = 5000; 2 probes rejected";
  return o;
}

Outcome calibration_criterion() {
  Outcome o;
  constexpr int kRuns = 2000;
  // Binomial(2000, 1e-3): mean 2, 3 SE bound 2 + 3 * 1.41
  const int bound = static_cast<int>(std::floor(2.0 + 3.0 * std::sqrt(kRuns * 1e-3 * (1.0 - 1e-3))));
  int ks_rej = 0, en_rej = 0;
  for (int i = 0; i < kRuns; ++i) {
    const auto a = sample(GenLinnik{1.5, 2.0}, 100000, RngStream(0xCA11, 2 * i));
    const auto b = sample(GenLinnik{1.5, 2.0}, 100000, RngStream(0xCA11, 2 * i + 1));
    ks_rej += ks_two_sample(a, b).p_value < 1e-3;
  }
  for (int i = 0; i < kRuns; ++i) {
    const auto a = sample(MvGenLinnik{1.5, sigma_for(2), 2.0}, 500, RngStream(0xCA12, 2 * i));
    const auto b = sample(MvGenLinnik{1.5, sigma_for(2), 2.0}, 500, RngStream(0xCA12, 2 * i + 1));
    EnergyOptions eo;
    eo.permutations = 200;
    eo.seed = static_cast<std::uint64_t>(i);
    en_rej += energy_test(a, b, eo).p_value < 1e-3;
  }
  o.check(ks_rej <= bound, "KS rejected " + std::to_string(ks_rej) + " of " + std::to_string(kRuns));
  o.check(en_rej <= bound, "energy rejected " + std::to_string(en_rej) + " of " + std::to_string(kRuns));
  o.detail = "rejections at 1e-3 over " + std::to_string(kRuns) + " runs: KS " + std::to_string(ks_rej) + ", energy " +
             std::to_string(en_rej) + " (bound " + std::to_string(bound) + ")";
  return o;
}

std::string run_cli_capture(std::vector<std::string> args, int& code) {
  std::ostringstream out, err;
  code = cli::run_cli(std::move(args), out, err);
  return out.str() + err.str();
}

Outcome determinism_criterion() {
  Outcome o;
  const std::vector<std::vector<std::string>> commands{
      {"sample", "--family", "mv-gen-linnik", "--alpha", "1.4", "--nu", "2", "--sigma-diag", "4,3", "--n", "50000", "--seed", "7"},
      {"sample", "--family", "stable-ratio", "--delta", "0.6", "--n", "50000", "--seed", "8", "--format", "json"},
      {"verify", "--id", "mv-gen-linnik-ml-mixture", "--n", "5000", "--permutations", "200", "--seed", "3"},
      {"verify", "--filter", "gen-ml-*", "--n", "20000", "--seed", "3"},
      {"limit", "--experiment", "negative-binomial", "--ladder", "10,100", "--replicates", "2000", "--permutations", "200",
       "--seed", "4"},
      {"cf", "--family", "gen-linnik", "--alpha", "1.4", "--nu", "2", "--sigma-diag", "4,3", "--t", "1,0", "--t", "0.3,0.2"},
  };
  for (const auto& cmd : commands) {
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "4", "4", "1"}) {
      auto args = cmd;
      args.insert(args.end(), {"--threads", threads});
      int code = 0;
      outputs.push_back(run_cli_capture(args, code));
      o.check(code == 0, cmd[0] + " exited with " + std::to_string(code));
    }
    bool same = true;
    for (const auto& s : outputs) same = same && s == outputs.front();
    o.check(same, cmd[0] + " " + cmd[2] + " output differs between runs or thread counts");
  }
  o.detail = std::to_string(commands.size()) + " commands byte-identical over 4 runs (threads 1, 4, 4, 1)";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"identity registry", identity_registry_criterion}, {"CF agreement", cf_agreement_criterion},
      {"densities and quadrature", density_criterion},    {"moment oracles", moment_criterion},
      {"random-sum limits", limit_criterion},             {"null calibration", calibration_criterion},
      {"determinism", determinism_criterion},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.contains(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d (%s): %s - %s [%.1f s]\n", id, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    for (const auto& f : o.failures) std::printf("    %s\n", f.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
