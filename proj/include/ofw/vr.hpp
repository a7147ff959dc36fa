#pragma once

#include "ofw/core.hpp"

namespace ofw::vr {

// Momentum averager d_k = (1 - rho_k) d_{k-1} + rho_k a~_k with
// rho_k = 2/(k+3)^{2/3}. The estimate is always a convex combination of the
// initial d0 and the fed samples. The caller owns the index semantics: k may
// be an inner step or a round. With variance reduction disabled the averager
// degenerates to the raw latest sample (rho = 1).
class Averager {
 public:
  explicit Averager(int dim, core::Schedule rho = core::Schedule::rho_vr(),
                    bool variance_reduction = true);

  // Advances the step count and returns the updated estimate.
  const Vector& feed(const Vector& sample);
  const Vector& feed(const core::GradientSample& sample) { return feed(sample.vector); }

  void reset(const Vector& d0);
  void reset() { reset(Vector::Zero(d_.size())); }

  const Vector& estimate() const { return d_; }
  int step_count() const { return steps_; }
  bool variance_reduction() const { return vr_; }

 private:
  Vector d_;
  int steps_ = 0;
  core::Schedule rho_;
  bool vr_;
};

}  // namespace ofw::vr
