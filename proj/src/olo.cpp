#include "ofw/olo.hpp"

namespace ofw::olo {

FplOracle::FplOracle(const core::ConstraintSet& set, core::LinearSense sense,
                     double perturbation_rate, std::uint64_t seed)
    : set_(&set),
      sense_(sense),
      rate_(perturbation_rate),
      cumulative_(Vector::Zero(set.dimension())),
      perturbation_(set.dimension()) {
  if (!(rate_ > 0.0)) throw std::invalid_argument("perturbation rate must be positive");
  Rng rng(seed);
  for (int i = 0; i < perturbation_.size(); ++i)
    perturbation_[i] = core::rand_uniform(rng) / rate_;
}

Vector FplOracle::next() const {
  return set_->lmo(cumulative_ + perturbation_, sense_);
}

void FplOracle::feedback(const Vector& objective) {
  if (objective.size() != cumulative_.size())
    throw std::invalid_argument("feedback dimension does not match the oracle");
  cumulative_ += objective;
}

}  // namespace ofw::olo
