#include <gtest/gtest.h>

#include <set>

#include "mixstable/registry.hpp"

using namespace mixstable;

TEST(Registry, CasesAreUniqueAndComplete) {
  const auto& reg = identity_registry();
  EXPECT_EQ(reg.size(), 23u);
  std::set<std::string> ids;
  for (const auto& c : reg) {
    EXPECT_TRUE(ids.insert(c.id).second) << c.id;
    EXPECT_FALSE(c.statement.empty()) << c.id;
    EXPECT_TRUE(c.build) << c.id;
  }
}

TEST(Registry, EveryCaseBuildsRecipesOfEqualDimension) {
  for (const auto& c : identity_registry()) {
    CaseContext ctx{c.defaults, default_case_sigma()};
    if (c.guard) c.guard(ctx);
    const auto [l, r] = c.build(ctx);
    EXPECT_EQ(l.dim(), r.dim()) << c.id;
  }
}

TEST(Registry, Filtering) {
  const auto ids = list_cases("gen-linnik-*");
  EXPECT_EQ(ids.size(), 5u);
  for (const auto& id : ids) EXPECT_EQ(id.rfind("gen-linnik-", 0), 0u);
  EXPECT_EQ(list_cases("*").size(), 23u);
  EXPECT_TRUE(list_cases("no-such-*").empty());
  EXPECT_TRUE(matches("mv-*", "mv-linnik-laplace-mixture"));
}

TEST(Registry, UnknownId) { EXPECT_THROW(find_case("bogus"), UnknownIdentityError); }

TEST(Registry, GuardsRejectOutOfRangeParameters) {
  RunOptions o;
  o.n = 1000;
  o.params = {{"nu", 1.5}};
  EXPECT_THROW(run_identity("gen-ml-mixer", o), ParameterDomainError);
  EXPECT_THROW(run_identity("mv-gen-linnik-linnik-mixture", o), ParameterDomainError);
  o.params = {{"nu", 2.5}};
  EXPECT_THROW(run_identity("gen-linnik-product", o), ParameterDomainError);
  o.params = {{"alpha", 2.5}};
  EXPECT_THROW(run_identity("linnik-normal-mixture", o), ParameterDomainError);
  o.params = {{"undeclared", 1.0}};
  EXPECT_THROW(run_identity("weibull-power", o), ConfigError);
}

TEST(Registry, SelectedCasesPass) {
  for (const char* id : {"weibull-power", "linnik-normal-mixture", "gen-ml-stable-mixture"}) {
    const auto r = run_identity(id);
    EXPECT_TRUE(r.pass) << id << " p=" << r.p_value;
    EXPECT_EQ(r.method, "ks");
    EXPECT_EQ(r.n_a, 100000u);
  }
}

TEST(Registry, MultivariateCasePasses) {
  RunOptions o;
  o.n = 5000;
  o.permutations = 200;
  const auto r = run_identity("mv-gen-linnik-ml-mixture", o);
  EXPECT_EQ(r.method, "energy");
  EXPECT_TRUE(r.pass) << r.p_value;
}

TEST(Registry, CorruptedCaseFails) {
  RunOptions o;
  o.corrupt_lhs = {{"alpha", 1.9}};
  const auto r = run_identity("linnik-normal-mixture", o);
  EXPECT_FALSE(r.pass) << r.p_value;
  EXPECT_EQ(r.params.at("lhs:alpha"), 1.9);
}

TEST(Registry, ReportsAreDeterministic) {
  RunOptions o;
  o.n = 20000;
  const auto a = run_identity("gamma-mixed-exponential", o);
  const auto b = run_identity("gamma-mixed-exponential", o);
  EXPECT_EQ(a.statistic, b.statistic);
  EXPECT_EQ(a.p_value, b.p_value);
  o.seed += 1;
  EXPECT_NE(run_identity("gamma-mixed-exponential", o).statistic, a.statistic);
}

TEST(Registry, BothMethodsOnMultivariate) {
  RunOptions o;
  o.n = 2000;
  o.permutations = 200;
  o.method = TestMethod::Both;
  const auto r = run_identity("mv-linnik-laplace-mixture", o);
  EXPECT_EQ(r.method, "ks+energy");
  EXPECT_TRUE(r.permutation_p_value.has_value());
  EXPECT_TRUE(r.pass);
}

TEST(Registry, RunRegistryAppliesHolm) {
  RunOptions o;
  o.n = 20000;
  const auto s = run_registry("gen-ml-*", o);
  ASSERT_EQ(s.reports.size(), 3u);
  for (const auto& r : s.reports) {
    ASSERT_TRUE(r.adjusted_p_value.has_value());
    EXPECT_GE(*r.adjusted_p_value, r.p_value);
  }
  EXPECT_TRUE(std::is_sorted(s.reports.begin(), s.reports.end(), [](const auto& a, const auto& b) { return a.id < b.id; }));
  EXPECT_EQ(s.passed + s.failed, 3u);
  EXPECT_TRUE(s.all_pass());
}
