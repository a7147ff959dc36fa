#pragma once

#include "ofw/core.hpp"
#include "ofw/lmo.hpp"

#include <vector>

namespace ofw::testsupport {

// Two-sided critical value at significance 1e-3.
inline constexpr double kZCrit1e3 = 3.2905267314919255;

struct MeanStats {
  double mean = 0.0;
  double stderr_ = 0.0;
};

inline MeanStats mean_and_stderr(const std::vector<double>& xs) {
  MeanStats out;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) out.mean += x;
  out.mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.stderr_ = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

inline Vector random_direction(int dim, Rng& rng, double scale = 1.0) {
  Vector d(dim);
  for (int i = 0; i < dim; ++i)
    d[i] = scale * (2.0 * core::rand_uniform(rng) - 1.0);
  return d;
}

// Random feasible point: a convex combination of a few LMO vertices (always
// feasible by convexity); for zero-containing sets the origin joins the mix.
inline Vector random_feasible(const core::ConstraintSet& set, Rng& rng) {
  const int mixes = 3;
  Vector x = Vector::Zero(set.dimension());
  double total = 0.0;
  std::vector<double> weights(mixes + 1);
  for (double& w : weights) {
    w = core::rand_uniform(rng);
    total += w;
  }
  if (!set.zero_feasible()) {
    total -= weights.back();
    weights.back() = 0.0;
  }
  for (int m = 0; m < mixes; ++m) {
    const Vector v =
        set.lmo(random_direction(set.dimension(), rng),
                core::rand_uniform(rng) < 0.5 ? core::LinearSense::Maximize
                                              : core::LinearSense::Minimize);
    x += (weights[m] / total) * v;
  }
  return x;
}

}  // namespace ofw::testsupport
