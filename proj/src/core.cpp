#include "ofw/core.hpp"

namespace ofw::core {

double rand_uniform(Rng& rng) {
  // 53-bit mantissa fill, value in [0, 1).
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double rand_normal(Rng& rng) {
  // Box-Muller, cosine branch only. Deterministic draw count (two words).
  double u1 = rand_uniform(rng);
  double u2 = rand_uniform(rng);
  while (u1 <= 0.0) u1 = rand_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::uint64_t rand_below(Rng& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("rand_below: n must be positive");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();  // rejection keeps the draw unbiased
  return x % n;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Vector gaussian_noise(int dim, double sigma, Rng& rng) {
  Vector z(dim);
  for (int i = 0; i < dim; ++i) z[i] = rand_normal(rng);
  return (sigma / std::sqrt(static_cast<double>(dim))) * z;
}

namespace {

class FiniteSumOracle final : public StochasticGradientOracle {
 public:
  FiniteSumOracle(std::vector<GradientFn> components, Rng rng)
      : components_(std::move(components)), rng_(rng) {}

 protected:
  Vector sample(const Vector& x) override {
    const std::size_t i = rand_below(rng_, components_.size());
    return components_[i](x);
  }

 private:
  std::vector<GradientFn> components_;
  Rng rng_;
};

class NoisyOracle final : public StochasticGradientOracle {
 public:
  NoisyOracle(GradientFn gradient, double sigma, Rng rng)
      : gradient_(std::move(gradient)), sigma_(sigma), rng_(rng) {}

  std::optional<double> noise_level() const override { return sigma_; }

 protected:
  Vector sample(const Vector& x) override {
    Vector g = gradient_(x);
    if (sigma_ > 0.0) g += gaussian_noise(static_cast<int>(g.size()), sigma_, rng_);
    return g;
  }

 private:
  GradientFn gradient_;
  double sigma_;
  Rng rng_;
};

}  // namespace

std::unique_ptr<StochasticGradientOracle> make_finite_sum_oracle(
    std::vector<GradientFn> component_gradients, Rng rng) {
  if (component_gradients.empty())
    throw std::invalid_argument("finite-sum oracle needs at least one component");
  return std::make_unique<FiniteSumOracle>(std::move(component_gradients), rng);
}

std::unique_ptr<StochasticGradientOracle> make_noisy_oracle(GradientFn gradient,
                                                            double sigma, Rng rng) {
  if (sigma < 0.0) throw std::invalid_argument("noise level must be nonnegative");
  return std::make_unique<NoisyOracle>(std::move(gradient), sigma, rng);
}

double schedule_value(const Schedule& schedule, int k, int horizon) {
  if (k <= 0) throw std::invalid_argument("schedule index k must be positive");
  switch (schedule.kind) {
    case ScheduleKind::RhoVR:
      return 2.0 / std::pow(static_cast<double>(k + schedule.shift), 2.0 / 3.0);
    case ScheduleKind::EtaConvex:
      return 1.0 / static_cast<double>(k + schedule.shift);
    case ScheduleKind::EtaSubmodular:
      if (horizon <= 0)
        throw std::invalid_argument("EtaSubmodular requires a positive horizon K");
      return 1.0 / static_cast<double>(horizon);
    case ScheduleKind::EtaProjectedGradient:
      return std::min(1.0, schedule.constant / std::sqrt(static_cast<double>(k)));
  }
  throw std::logic_error("unknown schedule kind");
}

}  // namespace ofw::core
