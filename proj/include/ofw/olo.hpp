#pragma once

#include "ofw/core.hpp"

namespace ofw::olo {

// Follow the Perturbed Leader over a constraint set, lazy variant: the
// perturbation (entries uniform on [0, 1/eps]) is drawn exactly once at
// construction, so a seed pins the whole decision sequence. next() plays
// lmo(cumulative + perturbation) under the oracle's sense and never mutates
// state; feedback() accumulates the observed linear objective.
class FplOracle {
 public:
  FplOracle(const core::ConstraintSet& set, core::LinearSense sense,
            double perturbation_rate, std::uint64_t seed);

  Vector next() const;
  void feedback(const Vector& objective);

  const Vector& cumulative() const { return cumulative_; }
  const Vector& perturbation() const { return perturbation_; }
  double perturbation_rate() const { return rate_; }
  core::LinearSense sense() const { return sense_; }

 private:
  const core::ConstraintSet* set_;
  core::LinearSense sense_;
  double rate_;
  Vector cumulative_;
  Vector perturbation_;
};

}  // namespace ofw::olo
