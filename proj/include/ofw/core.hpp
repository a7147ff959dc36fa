#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ofw {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

// Error taxonomy shared by all modules. Precondition violations use
// std::invalid_argument directly.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedOperation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SizeLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace core {

enum class ObjectiveSense { MinimizeConvex, MaximizeDRSubmodular };
enum class LinearSense { Minimize, Maximize };

// Portable samplers on top of mt19937_64 so that a seed pins the whole
// trajectory regardless of the standard library's distribution internals.
double rand_uniform(Rng& rng);                        // [0, 1)
double rand_normal(Rng& rng);                         // standard normal
std::uint64_t rand_below(Rng& rng, std::uint64_t n);  // uniform on {0..n-1}

// Derive an independent stream from (seed, tag); splitmix64-based.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

// Isotropic Gaussian with E||noise||^2 = sigma^2.
Vector gaussian_noise(int dim, double sigma, Rng& rng);

struct GradientSample {
  Vector vector;
  int round = 0;
  int inner_step = 0;
};

class StochasticGradientOracle {
 public:
  virtual ~StochasticGradientOracle() = default;

  GradientSample query(const Vector& x, int round = 0, int inner_step = 0) {
    ++queries_;
    return GradientSample{sample(x), round, inner_step};
  }

  // Declared variance bound sigma^2 on E||grad - estimate||^2, when known.
  virtual std::optional<double> noise_level() const { return std::nullopt; }

  long query_count() const { return queries_; }

 protected:
  virtual Vector sample(const Vector& x) = 0;

 private:
  long queries_ = 0;
};

using GradientFn = std::function<Vector(const Vector&)>;

// Uniformly samples one component gradient per query; unbiased for the
// average of the components.
std::unique_ptr<StochasticGradientOracle> make_finite_sum_oracle(
    std::vector<GradientFn> component_gradients, Rng rng);

// Exact gradient plus additive Gaussian noise with E||noise||^2 = sigma^2.
// sigma = 0 gives the exact oracle.
std::unique_ptr<StochasticGradientOracle> make_noisy_oracle(
    GradientFn gradient, double sigma, Rng rng);

// A differentiable objective with exact value and gradient evaluators.
struct SmoothObjective {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

enum class ScheduleKind { RhoVR, EtaConvex, EtaSubmodular, EtaProjectedGradient };

struct Schedule {
  ScheduleKind kind = ScheduleKind::RhoVR;
  int shift = 3;          // s in the rho/eta formulas
  double constant = 1.0;  // c for EtaProjectedGradient

  static Schedule rho_vr(int shift = 3) { return {ScheduleKind::RhoVR, shift, 1.0}; }
  static Schedule eta_convex(int shift = 3) { return {ScheduleKind::EtaConvex, shift, 1.0}; }
  static Schedule eta_submodular() { return {ScheduleKind::EtaSubmodular, 3, 1.0}; }
  static Schedule eta_projected_gradient(double c) {
    return {ScheduleKind::EtaProjectedGradient, 3, c};
  }
};

// RhoVR: 2/(k+s)^{2/3}; EtaConvex: 1/(k+s); EtaSubmodular: 1/K;
// EtaProjectedGradient: c/sqrt(k), clamped to 1. Always in (0, 1].
double schedule_value(const Schedule& schedule, int k, int horizon = 0);

// Feasible region abstraction: exact linear optimization, membership, and
// (where supported) Euclidean projection. Implementations are immutable and
// safe to share; the lmo call counter is atomic.
class ConstraintSet {
 public:
  virtual ~ConstraintSet() = default;
  ConstraintSet(const ConstraintSet&) = delete;
  ConstraintSet& operator=(const ConstraintSet&) = delete;

  int dimension() const { return dim_; }
  double diameter() const { return diameter_; }
  double radius() const { return radius_; }

  Vector lmo(const Vector& direction, LinearSense sense) const {
    check_dimension(direction);
    ++lmo_calls_;
    return do_lmo(direction, sense);
  }

  bool contains(const Vector& x, double tol = 1e-9) const {
    if (x.size() != dim_) return false;
    return do_contains(x, tol);
  }

  virtual bool supports_projection() const { return false; }

  Vector project(const Vector& y) const {
    check_dimension(y);
    if (!supports_projection())
      throw UnsupportedOperation("constraint set does not expose projection");
    return do_project(y);
  }

  bool zero_feasible(double tol = 1e-9) const {
    return contains(Vector::Zero(dim_), tol);
  }

  long lmo_call_count() const { return lmo_calls_.load(); }

 protected:
  ConstraintSet(int dim, double diameter, double radius)
      : dim_(dim), diameter_(diameter), radius_(radius) {
    if (dim <= 0) throw std::invalid_argument("constraint dimension must be positive");
    if (diameter_ > 2.0 * radius_ + 1e-12)
      throw std::logic_error("constraint invariant D <= 2R violated");
  }

  virtual Vector do_lmo(const Vector& direction, LinearSense sense) const = 0;
  virtual bool do_contains(const Vector& x, double tol) const = 0;
  virtual Vector do_project(const Vector& y) const {
    throw UnsupportedOperation("projection not implemented");
  }

  void check_dimension(const Vector& v) const {
    if (v.size() != dim_)
      throw std::invalid_argument("vector dimension " + std::to_string(v.size()) +
                                  " does not match constraint dimension " +
                                  std::to_string(dim_));
  }

 private:
  int dim_;
  double diameter_;
  double radius_;
  mutable std::atomic<long> lmo_calls_{0};
};

}  // namespace core
}  // namespace ofw
