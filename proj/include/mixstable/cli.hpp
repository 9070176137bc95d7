#pragma once

// Command-line front end. run_cli is the whole program minus argv handling,
// so it can be driven from tests.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mixstable/analytics.hpp"
#include "mixstable/error.hpp"
#include "mixstable/io.hpp"
#include "mixstable/limit_lab.hpp"
#include "mixstable/multivariate.hpp"
#include "mixstable/parallel.hpp"
#include "mixstable/registry.hpp"
#include "mixstable/spd.hpp"
#include "mixstable/univariate.hpp"
#include "mixstable/version.hpp"

namespace mixstable::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kFailure = 2 };

class UsageError : public Error {
 public:
  using Error::Error;
};

/// Everything a distribution can be parameterized by; unused fields stay empty.
struct FamilyArgs {
  std::string family;
  std::map<std::string, double> values;
  std::optional<std::string> sigma_file;
  std::vector<double> sigma_diag;
  std::string route = "normal-mixture";
  std::string mixer;  // scale-mixed-stable: exponential | gamma | constant | snedecor-fisher
  std::map<std::string, double> mixer_values;

  double get(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) throw UsageError("family '" + family + "' needs --" + key);
    return it->second;
  }
  double get_or(const std::string& key, double fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  }
  bool has_sigma() const { return sigma_file || !sigma_diag.empty(); }
};

inline const std::vector<std::string>& parameter_names() {
  static const std::vector<std::string> names{"alpha", "nu", "delta", "r", "mu", "a", "b", "p", "shape", "rate", "power"};
  return names;
}

inline UnivariateSpec univariate_family(const FamilyArgs& f) {
  const std::string& n = f.family;
  if (n == "normal") return Normal{};
  if (n == "exponential") return Exponential{};
  if (n == "gamma") return Gamma{f.get("shape"), f.get_or("rate", 1.0)};
  if (n == "gen-gamma") return GeneralizedGamma{f.get("shape"), f.get("power"), f.get_or("rate", 1.0)};
  if (n == "weibull") return Weibull{f.get("shape")};
  if (n == "one-sided-stable") return OneSidedStable{f.get("alpha")};
  if (n == "symmetric-stable" || n == "stable") return SymmetricStable{f.get("alpha")};
  if (n == "mittag-leffler") return MittagLeffler{f.get("delta")};
  if (n == "gen-mittag-leffler") return GenMittagLeffler{f.get("delta"), f.get("nu")};
  if (n == "mixed-exp-mixer") return MixedExpMixer{f.get("r"), f.get_or("mu", 1.0)};
  if (n == "stable-ratio") return StableRatio{f.get("delta")};
  if (n == "snedecor-fisher") return SnedecorFisher{f.get("a"), f.get("b")};
  if (n == "geometric") return Geometric{f.get("p")};
  if (n == "negative-binomial") return NegativeBinomial{f.get("nu"), f.get("p")};
  if (n == "laplace") return Laplace{};
  if (n == "linnik") return Linnik{f.get("alpha")};
  if (n == "gen-linnik") return GenLinnik{f.get("alpha"), f.get("nu")};
  throw UsageError("--family: unknown univariate family '" + n + "'");
}

inline bool multivariate_only(const std::string& family) {
  return family == "mv-normal" || family == "ec-stable" || family == "scale-mixed-stable" || family == "mv-laplace" ||
         family == "mv-linnik" || family == "mv-gen-linnik";
}

inline SpdMatrix sigma_from(const FamilyArgs& f) {
  if (f.sigma_file && !f.sigma_diag.empty()) throw UsageError("--sigma and --sigma-diag are exclusive");
  if (f.sigma_file) return io::read_sigma_file(*f.sigma_file);
  if (!f.sigma_diag.empty()) return SpdMatrix::diagonal(f.sigma_diag);
  return SpdMatrix::identity(1);
}

inline MixerSpec mixer_from(const FamilyArgs& f) {
  auto get = [&](const std::string& k) {
    auto it = f.mixer_values.find(k);
    if (it == f.mixer_values.end()) throw UsageError("mixer '" + f.mixer + "' needs --mixer-param " + k + "=<value>");
    return it->second;
  };
  if (f.mixer == "exponential") return MixerSpec::of(Exponential{});
  if (f.mixer == "gamma") return MixerSpec::of(Gamma{get("nu")});
  if (f.mixer == "constant") return MixerSpec::constant(get("c"));
  if (f.mixer == "snedecor-fisher") return MixerSpec::gamma_scale_mixture(SnedecorFisher{get("a"), get("b")}, get("nu"));
  throw UsageError("--mixer: unknown mixer '" + f.mixer + "'");
}

inline Route route_from(const std::string& s) {
  if (s == "stable") return Route::StableRoute;
  if (s == "normal-mixture") return Route::NormalMixtureRoute;
  throw UsageError("--route: expected 'stable' or 'normal-mixture'");
}

/// A vector family when Sigma is given or the name is vector-only.
inline std::optional<MultivariateSpec> multivariate_family(const FamilyArgs& f) {
  if (!f.has_sigma() && !multivariate_only(f.family)) return std::nullopt;
  const SpdMatrix s = sigma_from(f);
  const std::string& n = f.family;
  if (n == "normal" || n == "mv-normal") return MvNormal{s};
  if (n == "stable" || n == "symmetric-stable" || n == "ec-stable") return EcStable{f.get("alpha"), s};
  if (n == "scale-mixed-stable") return ScaleMixedStable{f.get("alpha"), s, mixer_from(f)};
  if (n == "laplace" || n == "mv-laplace") return MvLaplace{s};
  if (n == "linnik" || n == "mv-linnik") return MvLinnik{f.get("alpha"), s, route_from(f.route)};
  if (n == "gen-linnik" || n == "mv-gen-linnik") return MvGenLinnik{f.get("alpha"), s, f.get("nu"), route_from(f.route)};
  throw UsageError("--family: '" + n + "' has no multivariate form");
}

inline bool has_cf(const UnivariateSpec& u) {
  return std::visit(overloaded{[](const Normal&) { return true; }, [](const Exponential&) { return true; }, [](const Gamma&) { return true; },
                               [](const OneSidedStable&) { return true; }, [](const SymmetricStable&) { return true; },
                               [](const Laplace&) { return true; }, [](const Linnik&) { return true; }, [](const GenLinnik&) { return true; },
                               [](const auto&) { return false; }},
                    u);
}

inline constexpr std::uint64_t kLimitStream = 0x11A17;

namespace detail {

inline std::vector<double> parse_list(const std::string& s, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw UsageError(flag + ": cannot parse '" + cell + "'");
    }
  }
  if (out.empty()) throw UsageError(flag + ": empty list");
  return out;
}

inline std::map<std::string, double> parse_assignments(const std::vector<std::string>& items, const std::string& flag) {
  std::map<std::string, double> out;
  for (const auto& it : items) {
    const auto eq = it.find('=');
    if (eq == std::string::npos) throw UsageError(flag + ": expected key=value, got '" + it + "'");
    out[it.substr(0, eq)] = parse_list(it.substr(eq + 1), flag).front();
  }
  return out;
}

/// Turns a flat JSON object into "--key value" tokens.
inline std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("--config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw UsageError("--config: " + std::string(e.what()));
  }
  if (!j.is_object()) throw UsageError("--config: expected a flat JSON object");
  std::vector<std::string> out;
  for (const auto& [k, v] : j.items()) {
    auto push = [&](const nlohmann::json& x) {
      out.push_back("--" + k);
      if (x.is_string()) out.push_back(x.get<std::string>());
      else if (x.is_number_integer() || x.is_number_unsigned()) out.push_back(x.dump());
      else if (x.is_number()) out.push_back(io::num(x.get<double>()));
      else if (x.is_boolean()) {
        if (!x.get<bool>()) out.pop_back();
      } else throw UsageError("--config: key '" + k + "' must be a scalar or an array of scalars");
    };
    if (v.is_array()) {
      for (const auto& x : v) push(x);
    } else {
      push(v);
    }
  }
  return out;
}

}  // namespace detail

struct Output {
  std::ostream& out;
  std::optional<std::ofstream> file;
  std::ostream& stream() { return file ? *file : out; }
};

/// Runs one command line (without the program name).
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mixed stable and Linnik-type laws: sampling, transforms, identity checks, random-sum limits", "mixstable"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::optional<std::uint64_t> seed_flag;
  int threads = 0;
  std::string out_path, format = "csv", config_path;
  app.add_option("--config", config_path, "flat JSON file of flag values; command-line flags win");

  FamilyArgs fam;
  std::map<std::string, std::optional<double>> raw;
  std::optional<std::string> sigma_path;
  std::vector<std::string> mixer_params, params, corrupt;
  std::size_t n = 0;
  std::string t_list, x_list, id, filter = "*", method = "auto", in_path, config_name, ladder;
  std::vector<std::string> t_points;
  double order = 0.0, level = kDefaultLevel;
  std::size_t permutations = 500, replicates = 5000;
  bool against_spec = false, diagnostics = false;

  auto common = [&](CLI::App* sub) {
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->add_option("--seed", seed_flag, "64-bit seed (default: $MIXSTABLE_SEED, else 0)");
    sub->add_option("--threads", threads, "worker cap (0 = all cores)")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", out_path, "write the payload here instead of stdout");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  auto family = [&](CLI::App* sub, bool required) {
    auto* f = sub->add_option("--family", fam.family, "distribution family");
    if (required) f->required();
    for (const auto& p : parameter_names()) sub->add_option("--" + p, raw[p], "parameter " + p);
    sub->add_option("--sigma", sigma_path, "CSV file holding the scale matrix");
    sub->add_option("--sigma-diag", fam.sigma_diag, "diagonal scale matrix, comma separated")
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sub->add_option("--route", fam.route, "stable or normal-mixture");
    sub->add_option("--mixer", fam.mixer, "scale-mixed-stable mixer: exponential, gamma, constant, snedecor-fisher");
    sub->add_option("--mixer-param", mixer_params, "mixer parameter key=value (nu, c, a, b)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  };

  auto* sample_cmd = app.add_subcommand("sample", "draw a batch");
  common(sample_cmd);
  family(sample_cmd, true);
  sample_cmd->add_option("--n", n, "number of draws")->required()->check(CLI::PositiveNumber);

  auto* cf_cmd = app.add_subcommand("cf", "characteristic function or, for nonnegative laws, the LST");
  common(cf_cmd);
  family(cf_cmd, true);
  cf_cmd->add_option("--t", t_points, "argument; comma-separated vector for multivariate laws (repeatable)")
      ->required()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

  auto* density_cmd = app.add_subcommand("density", "closed-form density");
  common(density_cmd);
  family(density_cmd, true);
  density_cmd->add_option("--x", x_list, "comma-separated points")->required();

  auto* moment_cmd = app.add_subcommand("moment", "analytic absolute moment E|X|^order");
  common(moment_cmd);
  family(moment_cmd, true);
  moment_cmd->add_option("--order", order, "moment order")->required();
  moment_cmd->add_option("--n", n, "also estimate by Monte Carlo from n draws");
  moment_cmd->add_flag("--diagnostics", diagnostics, "report alternative closed forms side by side");

  auto* verify_cmd = app.add_subcommand("verify", "run identity cases, or test a sample file against a family");
  common(verify_cmd);
  verify_cmd->add_option("--id", id, "identity case id");
  verify_cmd->add_option("--filter", filter, "glob over case ids; runs all matches with Holm's correction");
  verify_cmd->add_option("--n", n, "draws per side");
  verify_cmd->add_option("--method", method, "auto, ks, energy or both")->check(CLI::IsMember({"auto", "ks", "energy", "both"}));
  verify_cmd->add_option("--permutations", permutations, "energy-test permutations");
  verify_cmd->add_option("--level", level, "significance level");
  verify_cmd->add_option("--param", params, "override key=value")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  verify_cmd->add_option("--corrupt", corrupt, "left-side-only override key=value")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  verify_cmd->add_flag("--against-spec", against_spec, "test --in against fresh draws of --family");
  verify_cmd->add_option("--in", in_path, "sample file written by 'sample'");
  family(verify_cmd, false);

  auto* limit_cmd = app.add_subcommand("limit", "random-sum convergence experiment");
  common(limit_cmd);
  limit_cmd->add_option("--experiment", config_name,
                        "negative-binomial, ml-index, finite-covariance, fixed-index, probe-fixed-index, probe-wrong-nu")
      ->required();
  limit_cmd->add_option("--ladder", ladder, "comma-separated increasing n");
  limit_cmd->add_option("--replicates", replicates, "replicates per ladder point");
  limit_cmd->add_option("--permutations", permutations, "energy-test permutations");

  auto* list_cmd = app.add_subcommand("registry-list", "list identity cases");
  common(list_cmd);
  list_cmd->add_option("--filter", filter, "glob over case ids");

  // config file tokens go right after the subcommand name, so later explicit flags win
  const std::vector<std::string> subcommands{"sample", "cf", "density", "moment", "verify", "limit", "registry-list"};
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] != "--config" && !args[i].starts_with("--config=")) continue;
    const bool inline_value = args[i].starts_with("--config=");
    if (!inline_value && i + 1 == args.size()) break;
    std::vector<std::string> toks;
    try {
      toks = detail::config_tokens(inline_value ? args[i].substr(9) : args[i + 1]);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kUsage;
    }
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + (inline_value ? 1 : 2)));
    const auto sub = std::find_first_of(args.begin(), args.end(), subcommands.begin(), subcommands.end());
    if (sub != args.end()) args.insert(sub + 1, toks.begin(), toks.end());
    break;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  std::uint64_t seed = seed_flag.value_or(0);
  if (!seed_flag) {
    if (const char* env = std::getenv("MIXSTABLE_SEED")) {
      try {
        seed = std::stoull(env);
      } catch (const std::exception&) {
        err << "error: MIXSTABLE_SEED is not an unsigned integer\n";
        return kUsage;
      }
    }
  }

  Output sink{out, std::nullopt};
  const bool json = format == "json";
  std::string command;
  for (auto* s : app.get_subcommands()) command = s->get_name();

  try {
    fam.mixer_values = detail::parse_assignments(mixer_params, "--mixer-param");
    for (const auto& [k, v] : raw)
      if (v) fam.values[k] = *v;
    fam.sigma_file = sigma_path;
    if (threads > 0) default_thread_count() = threads;
    if (!out_path.empty()) {
      sink.file.emplace(out_path);
      if (!*sink.file) throw UsageError("--out: cannot open '" + out_path + "'");
    }
    std::ostream& os = sink.stream();
    io::Metadata meta{{"command", command}, {"version", kVersion}, {"seed", std::to_string(seed)}};

    if (command == "sample") {
      const RngStream rng(seed, 0);
      SampleBatch batch;
      if (auto mv = multivariate_family(fam)) {
        meta.emplace_back("spec", describe(*mv));
        batch = sample(*mv, n, rng);
      } else {
        const auto u = univariate_family(fam);
        meta.emplace_back("spec", describe(u));
        batch = sample(u, n, rng);
      }
      meta.emplace_back("n", std::to_string(n));
      meta.emplace_back("dim", std::to_string(batch.dim()));
      if (batch.meta.redraws) meta.emplace_back("redraws", std::to_string(batch.meta.redraws));
      json ? io::write_json(os, batch, meta) : io::write_csv(os, batch, meta);
      return kOk;
    }

    if (command == "cf") {
      io::Json rows = io::Json::array();
      std::vector<std::string> csv;
      std::string spec;
      const auto mv = multivariate_family(fam);
      std::optional<UnivariateSpec> u;
      if (!mv) u = univariate_family(fam);
      spec = mv ? describe(*mv) : describe(*u);
      // laws without a closed-form CF but with a closed-form LST report the LST
      const bool transform = u && !has_cf(*u) && is_nonnegative(*u);
      for (const auto& tp : t_points) {
        const auto t = detail::parse_list(tp, "--t");
        Complex v;
        if (mv) {
          if (t.size() != dim_of(*mv)) throw UsageError("--t: expected " + std::to_string(dim_of(*mv)) + " components");
          v = cf(*mv, t);
        } else {
          if (t.size() != 1) throw UsageError("--t: univariate families take a scalar");
          v = transform ? Complex(lst(*u, t[0]), 0.0) : cf(*u, t[0]);
        }
        std::string ts;
        for (std::size_t i = 0; i < t.size(); ++i) ts += (i ? " " : "") + io::num12(t[i]);
        csv.push_back(ts + "," + io::num12(v.real()) + "," + io::num12(v.imag()));
        rows.push_back({{"t", t}, {"re", std::stod(io::num12(v.real()))}, {"im", std::stod(io::num12(v.imag()))}});
      }
      meta.emplace_back("spec", spec);
      meta.emplace_back("transform", transform ? "laplace-stieltjes" : "characteristic-function");
      if (json) {
        os << io::Json{{"meta", io::metadata_json(meta)}, {"values", rows}}.dump() << '\n';
      } else {
        io::write_metadata(os, meta);
        os << "t,re,im\n";
        for (const auto& l : csv) os << l << '\n';
      }
      return kOk;
    }

    if (command == "density") {
      const auto u = univariate_family(fam);
      meta.emplace_back("spec", describe(u));
      const auto xs = detail::parse_list(x_list, "--x");
      if (json) {
        io::Json rows = io::Json::array();
        for (double x : xs) rows.push_back({{"x", x}, {"density", density(u, x)}});
        os << io::Json{{"meta", io::metadata_json(meta)}, {"values", rows}}.dump() << '\n';
      } else {
        io::write_metadata(os, meta);
        os << "x,density\n";
        for (double x : xs) os << io::num(x) << ',' << io::num(density(u, x)) << '\n';
      }
      return kOk;
    }

    if (command == "moment") {
      const auto u = univariate_family(fam);
      meta.emplace_back("spec", describe(u));
      meta.emplace_back("order", io::num(order));
      const auto d = moment_diagnostics(u, order);
      io::Json j{{"meta", io::metadata_json(meta)}};
      j["analytic"] = d.implemented.infinite ? io::Json("inf") : io::Json(d.implemented.value);
      if (diagnostics && d.alternative) {
        j["alternative"] = *d.alternative;
        j["alternative_formula"] = d.alternative_formula;
      }
      if (n > 0) {
        const auto e = empirical_abs_moment(sample(u, n, RngStream(seed, 0)), order);
        j["monte_carlo"] = e.value;
        j["monte_carlo_se"] = e.se;
        j["n"] = n;
      }
      if (json) {
        os << j.dump() << '\n';
      } else {
        io::write_metadata(os, meta);
        os << "quantity,value\n";
        for (const auto& [k, v] : j.items())
          if (k != "meta") os << k << ',' << (v.is_number() ? io::num(v.get<double>()) : v.get<std::string>()) << '\n';
      }
      return kOk;
    }

    if (command == "verify") {
      if (against_spec) {
        if (in_path.empty() || fam.family.empty()) throw UsageError("--against-spec needs --in and --family");
        const auto data = io::read_csv_file(in_path);
        const RngStream fresh(seed, 0xA6A1257ULL);
        SampleBatch ref;
        std::string spec;
        if (auto mv = multivariate_family(fam)) {
          spec = describe(*mv);
          ref = sample(*mv, n ? n : data.size(), fresh);
        } else {
          const auto u = univariate_family(fam);
          spec = describe(u);
          ref = sample(u, n ? n : data.size(), fresh);
        }
        if (ref.dim() != data.dim()) throw UsageError("--in: file has dimension " + std::to_string(data.dim()));
        TestReport r;
        if (data.dim() == 1 && method != "energy") {
          r = ks_two_sample(data, ref);
        } else {
          EnergyOptions eo;
          eo.permutations = permutations;
          eo.seed = seed;
          r = energy_test(data, ref, eo);
        }
        r.id = "against-spec:" + spec;
        r.seed = seed;
        r.level = level;
        r.decide();
        meta.emplace_back("spec", spec);
        meta.emplace_back("input", in_path);
        auto j = io::to_json(r);
        j["meta"] = io::metadata_json(meta);
        os << j.dump(2) << '\n';
        return r.pass ? kOk : kFailure;
      }
      RunOptions opt;
      opt.n = n;
      opt.seed = seed;
      opt.permutations = permutations;
      opt.level = level;
      opt.method = method == "ks" ? TestMethod::Ks : method == "energy" ? TestMethod::Energy : method == "both" ? TestMethod::Both : TestMethod::Auto;
      opt.params = detail::parse_assignments(params, "--param");
      opt.corrupt_lhs = detail::parse_assignments(corrupt, "--corrupt");
      if (!id.empty()) {
        const auto r = run_identity(id, opt);
        meta.emplace_back("spec", id + ": " + find_case(id).statement);
        auto j = io::to_json(r);
        j["meta"] = io::metadata_json(meta);
        os << j.dump(2) << '\n';
        return r.pass ? kOk : kFailure;
      }
      if (list_cases(filter).empty()) throw UsageError("--filter: no case matches '" + filter + "'");
      meta.emplace_back("spec", "filter " + filter);
      const auto s = run_registry(filter, opt);
      io::Json arr = io::Json::array();
      for (const auto& r : s.reports) arr.push_back(io::registry_entry(r));
      os << io::Json{{"meta", io::metadata_json(meta)}, {"passed", s.passed}, {"failed", s.failed}, {"cases", arr}}.dump(2) << '\n';
      return s.all_pass() ? kOk : kFailure;
    }

    if (command == "limit") {
      ExperimentConfig c = [&] {
        if (config_name == "negative-binomial") return negative_binomial_config();
        if (config_name == "ml-index") return ml_index_config();
        if (config_name == "finite-covariance") return finite_covariance_config();
        if (config_name == "fixed-index") return fixed_index_config();
        if (config_name == "probe-fixed-index") return fixed_index_probe();
        if (config_name == "probe-wrong-nu") return wrong_shape_probe();
        throw UsageError("--experiment: unknown experiment '" + config_name + "'");
      }();
      if (!ladder.empty()) {
        c.ladder.clear();
        for (double v : detail::parse_list(ladder, "--ladder")) {
          if (!(v >= 1.0) || v != std::floor(v)) throw UsageError("--ladder: entries must be positive integers");
          c.ladder.push_back(static_cast<std::size_t>(v));
        }
      }
      c.replicates = replicates;
      c.permutations = permutations;
      const auto r = run_random_sum(c, RngStream(seed, kLimitStream));
      meta.emplace_back("experiment", c.name);
      meta.emplace_back("target", r.target);
      meta.emplace_back("verdict", r.pass ? "pass" : "fail");
      if (json) {
        auto j = io::to_json(r);
        j["meta"] = io::metadata_json(meta);
        os << j.dump(2) << '\n';
      } else {
        io::write_csv(os, r, meta);
      }
      return r.pass ? kOk : kFailure;
    }

    if (command == "registry-list") {
      const auto ids = list_cases(filter);
      meta.emplace_back("spec", "filter " + filter);
      if (json) {
        io::Json arr = io::Json::array();
        for (const auto& i : ids) {
          const auto& c = find_case(i);
          arr.push_back({{"id", c.id}, {"statement", c.statement}, {"params", io::to_json(c.defaults)}, {"multivariate", c.multivariate}});
        }
        os << io::Json{{"meta", io::metadata_json(meta)}, {"cases", arr}}.dump(2) << '\n';
      } else {
        io::write_metadata(os, meta);
        os << "id,statement\n";
        for (const auto& i : ids) os << i << ",\"" << find_case(i).statement << "\"\n";
      }
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParameterDomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const UnsupportedFamilyError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const UnknownIdentityError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NotPositiveDefiniteError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace mixstable::cli
