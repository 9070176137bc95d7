#pragma once

// Library umbrella. The command-line layer (cli.hpp, io.hpp) additionally
// needs CLI11 and nlohmann/json on the include path.

#include "mixstable/analytics.hpp"
#include "mixstable/batch.hpp"
#include "mixstable/error.hpp"
#include "mixstable/limit_lab.hpp"
#include "mixstable/multivariate.hpp"
#include "mixstable/parallel.hpp"
#include "mixstable/recipe.hpp"
#include "mixstable/registry.hpp"
#include "mixstable/rng.hpp"
#include "mixstable/special.hpp"
#include "mixstable/spd.hpp"
#include "mixstable/tests.hpp"
#include "mixstable/univariate.hpp"
#include "mixstable/version.hpp"
