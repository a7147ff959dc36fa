#include "ofw/core.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace ofw;
using core::Schedule;
using core::ScheduleKind;

TEST_CASE("schedule values match the stated formulas") {
  CHECK(core::schedule_value(Schedule::rho_vr(), 1) ==
        doctest::Approx(0.7937005259840998).epsilon(1e-12));
  CHECK(core::schedule_value(Schedule::eta_submodular(), 7, 10) == doctest::Approx(0.1));
  CHECK(core::schedule_value(Schedule::eta_convex(), 1) == doctest::Approx(0.25));
  CHECK(core::schedule_value(Schedule::eta_projected_gradient(0.5), 4) ==
        doctest::Approx(0.25));
  // Projected-gradient steps are clamped into (0, 1].
  CHECK(core::schedule_value(Schedule::eta_projected_gradient(3.0), 1) == 1.0);
}

TEST_CASE("schedule argument validation") {
  CHECK_THROWS_AS(core::schedule_value(Schedule::rho_vr(), 0), std::invalid_argument);
  CHECK_THROWS_AS(core::schedule_value(Schedule::rho_vr(), -3), std::invalid_argument);
  CHECK_THROWS_AS(core::schedule_value(Schedule::eta_submodular(), 1, 0),
                  std::invalid_argument);
}

TEST_CASE("schedules stay in (0,1] and decay monotonically") {
  double prev_rho = 1.0, prev_eta = 1.0;
  for (int k = 1; k <= 1000; ++k) {
    const double rho = core::schedule_value(Schedule::rho_vr(), k);
    const double eta = core::schedule_value(Schedule::eta_convex(), k);
    CHECK(rho > 0.0);
    CHECK(rho <= 1.0);
    CHECK(eta > 0.0);
    CHECK(eta <= 1.0);
    CHECK(rho <= prev_rho);
    CHECK(eta <= prev_eta);
    prev_rho = rho;
    prev_eta = eta;
  }
  for (int k : {10'000, 100'000, 1'000'000}) {
    CHECK(core::schedule_value(Schedule::rho_vr(), k) > 0.0);
    CHECK(core::schedule_value(Schedule::eta_convex(), k) > 0.0);
  }
}

TEST_CASE("finite-sum oracle with one component is exact") {
  auto oracle = core::make_finite_sum_oracle(
      {[](const Vector& x) { return Vector(2.0 * x); }}, Rng(7));
  Vector x(2);
  x << 1.5, -2.0;
  const auto sample = oracle->query(x, 3, 1);
  CHECK(sample.vector.isApprox(2.0 * x));
  CHECK(sample.round == 3);
  CHECK(sample.inner_step == 1);
  CHECK(oracle->query_count() == 1);
}

TEST_CASE("finite-sum oracle is empirically unbiased") {
  // Components with gradients (1,0) and (0,1); the average is (0.5, 0.5).
  auto oracle = core::make_finite_sum_oracle(
      {[](const Vector&) {
         Vector g(2);
         g << 1.0, 0.0;
         return g;
       },
       [](const Vector&) {
         Vector g(2);
         g << 0.0, 1.0;
         return g;
       }},
      Rng(11));
  const int samples = 10'000;
  std::vector<double> first, second;
  const Vector x = Vector::Zero(2);
  for (int s = 0; s < samples; ++s) {
    const Vector g = oracle->query(x).vector;
    first.push_back(g[0]);
    second.push_back(g[1]);
  }
  for (const auto& coords : {first, second}) {
    const auto stats = testsupport::mean_and_stderr(coords);
    CHECK(std::abs(stats.mean - 0.5) <= 3.0 * stats.stderr_);
    CHECK(std::abs(stats.mean - 0.5) <= testsupport::kZCrit1e3 * stats.stderr_);
  }
}

TEST_CASE("finite-sum oracle rejects an empty component list") {
  CHECK_THROWS_AS(core::make_finite_sum_oracle({}, Rng(1)), std::invalid_argument);
}

TEST_CASE("noisy oracle noise level and determinism") {
  auto grad = [](const Vector& x) { return Vector(x); };
  auto a = core::make_noisy_oracle(grad, 2.0, Rng(5));
  auto b = core::make_noisy_oracle(grad, 2.0, Rng(5));
  const Vector x = Vector::Ones(4);
  CHECK(a->noise_level() == 2.0);
  for (int i = 0; i < 10; ++i)
    CHECK(a->query(x).vector.isApprox(b->query(x).vector));

  // E||noise||^2 = sigma^2 regardless of dimension.
  Rng rng(3);
  std::vector<double> sq;
  for (int s = 0; s < 20'000; ++s)
    sq.push_back(core::gaussian_noise(7, 2.0, rng).squaredNorm());
  const auto stats = testsupport::mean_and_stderr(sq);
  CHECK(std::abs(stats.mean - 4.0) <= 4.0 * stats.stderr_);
}

TEST_CASE("portable samplers are deterministic per seed") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(core::rand_uniform(a) == core::rand_uniform(b));
  }
  Rng c(42);
  Rng d(43);
  bool any_diff = false;
  for (int i = 0; i < 10; ++i)
    any_diff |= core::rand_uniform(c) != core::rand_uniform(d);
  CHECK(any_diff);
}
