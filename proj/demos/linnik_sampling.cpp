// Draws a bivariate generalized Linnik batch both ways and compares the
// empirical characteristic function with the closed form.

#include <cstdio>

#include "mixstable/mixstable.hpp"

using namespace mixstable;

int main() {
  const auto sigma = make_spd({{4, 2}, {2, 3}});
  const double alpha = 1.4, nu = 2.0;
  const RngStream rng(7);

  for (Route route : {Route::StableRoute, Route::NormalMixtureRoute}) {
    const auto batch = sample_mv_gen_linnik(alpha, sigma, nu, route, 200000, rng.child(route == Route::StableRoute));
    std::printf("route %s\n", to_string(route));
    for (double r : {0.2, 0.5, 1.0}) {
      const std::vector<double> t{r, -0.5 * r};
      const auto e = empirical_cf(batch, t);
      const double exact = cf(MultivariateSpec{MvGenLinnik{alpha, sigma, nu}}, t).real();
      std::printf("  t = (%.2f, %.2f)  empirical %.5f +- %.5f  exact %.5f\n", t[0], t[1], e.value.real(), e.se_re, exact);
    }
  }

  // the scalar mixer behind the normal-mixture route
  const auto m = sample_gen_mittag_leffler(alpha / 2, nu, 200000, rng.child(2));
  for (double s : {0.5, 2.0}) {
    const auto e = empirical_lst(m, s);
    std::printf("E exp(-%.1f M) = %.5f +- %.5f, closed form %.5f\n", s, e.value, e.se, lst(GenMittagLeffler{alpha / 2, nu}, s));
  }
}
