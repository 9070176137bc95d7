// Negative binomial random sums of elliptically contoured stable vectors
// approach the generalized Linnik law; a mismatched target does not.

#include <cstdio>

#include "mixstable/mixstable.hpp"

using namespace mixstable;

namespace {

void show(const ConvergenceReport& r) {
  std::printf("%s -> %s\n", r.name.c_str(), r.target.c_str());
  for (const auto& p : r.points)
    std::printf("  n = %-6zu energy %.3e (null sd %.1e)  p = %-9.3g  index KS %.4f  literal %.0f%%\n", p.n, p.energy_distance,
                p.distance_se, p.p_value, p.ks_index_distance, 100.0 * p.literal_fraction);
  std::printf("  verdict: %s\n\n", r.pass ? "pass" : "fail");
}

}  // namespace

int main() {
  auto matched = negative_binomial_config();
  matched.ladder = {10, 100, 1000};
  matched.replicates = 2000;
  matched.permutations = 200;
  show(run_random_sum(matched, RngStream(11)));

  auto probe = wrong_shape_probe();
  probe.ladder = matched.ladder;
  probe.replicates = matched.replicates;
  probe.permutations = matched.permutations;
  show(necessity_probe(probe, RngStream(12)));
}
