// Runs a few registered identities and one deliberately broken variant.

#include <cstdio>

#include "mixstable/mixstable.hpp"

using namespace mixstable;

int main(int argc, char** argv) {
  const std::string pattern = argc > 1 ? argv[1] : "gen-linnik-*";
  RunOptions opt;
  opt.n = 20000;
  const auto summary = run_registry(pattern, opt);
  for (const auto& r : summary.reports)
    std::printf("%-32s %-6s p = %-10.3g adjusted %-10.3g %s\n", r.id.c_str(), r.method.c_str(), r.p_value, *r.adjusted_p_value,
                r.pass ? "pass" : "FAIL");

  opt.corrupt_lhs = {{"alpha", 1.9}};
  const auto broken = run_identity("linnik-normal-mixture", opt);
  std::printf("\nlinnik-normal-mixture with alpha 1.9 on the left only: p = %.3g, %s\n", broken.p_value,
              broken.pass ? "pass" : "rejected");
}
