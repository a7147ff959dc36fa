#include "ofw/vr.hpp"

namespace ofw::vr {

Averager::Averager(int dim, core::Schedule rho, bool variance_reduction)
    : d_(Vector::Zero(dim)), rho_(rho), vr_(variance_reduction) {
  if (dim <= 0) throw std::invalid_argument("averager dimension must be positive");
  if (rho_.kind != core::ScheduleKind::RhoVR)
    throw std::invalid_argument("averager requires a RhoVR schedule");
}

const Vector& Averager::feed(const Vector& sample) {
  if (sample.size() != d_.size())
    throw std::invalid_argument("sample dimension does not match averager state");
  ++steps_;
  const double rho = vr_ ? core::schedule_value(rho_, steps_) : 1.0;
  d_ = (1.0 - rho) * d_ + rho * sample;
  return d_;
}

void Averager::reset(const Vector& d0) {
  if (d0.size() != d_.size())
    throw std::invalid_argument("reset dimension does not match averager state");
  if (!d0.allFinite()) throw std::invalid_argument("reset point must be finite");
  d_ = d0;
  steps_ = 0;
}

}  // namespace ofw::vr
