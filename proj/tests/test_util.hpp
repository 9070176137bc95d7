#pragma once

#include <gtest/gtest.h>

#include <cmath>

#include "mixstable/analytics.hpp"

// |estimate - target| <= k SE
#define EXPECT_WITHIN_SE(est, target, k)                                                                  \
  do {                                                                                                    \
    const auto _e = (est);                                                                                \
    const double _t = (target);                                                                           \
    EXPECT_LE(std::abs(_e.value - _t), (k) * _e.se) << "estimate " << _e.value << " se " << _e.se << " target " << _t; \
  } while (0)

inline double fraction_below(const mixstable::SampleBatch& b, double x) {
  double c = 0.0;
  for (double v : b.values()) c += v < x;
  return c / static_cast<double>(b.size());
}

// binomial standard error of a proportion estimate
inline mixstable::Estimate proportion(const mixstable::SampleBatch& b, double x) {
  const double p = fraction_below(b, x);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(b.size()))};
}
