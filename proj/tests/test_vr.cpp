#include "ofw/vr.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace ofw;

TEST_CASE("first feed from zero scales the sample by rho_1") {
  vr::Averager avg(2);
  Vector sample(2);
  sample << 1.0, 2.0;
  const Vector d = avg.feed(sample);
  const double rho1 = core::schedule_value(core::Schedule::rho_vr(), 1);
  CHECK(d[0] == doctest::Approx(rho1).epsilon(1e-12));
  CHECK(d[1] == doctest::Approx(2.0 * rho1).epsilon(1e-12));
  CHECK(avg.step_count() == 1);
}

TEST_CASE("constant samples contract toward the constant at the product rate") {
  vr::Averager avg(3);
  Vector c(3);
  c << 4.0, -1.0, 0.5;
  double shrink = 1.0;
  for (int k = 1; k <= 100; ++k) {
    avg.feed(c);
    shrink *= 1.0 - core::schedule_value(core::Schedule::rho_vr(), k);
  }
  const double gap = (avg.estimate() - c).lpNorm<Eigen::Infinity>();
  CHECK(gap <= c.lpNorm<Eigen::Infinity>() * shrink + 1e-12);
}

TEST_CASE("dimension mismatch is rejected") {
  vr::Averager avg(2);
  CHECK_THROWS_AS(avg.feed(Vector::Ones(3)), std::invalid_argument);
  CHECK_THROWS_AS(avg.reset(Vector::Ones(4)), std::invalid_argument);
}

TEST_CASE("reset semantics") {
  vr::Averager avg(2);
  Vector sample(2);
  sample << 1.0, 2.0;
  avg.feed(sample);
  avg.feed(sample);
  avg.reset();
  CHECK(avg.step_count() == 0);
  const Vector d = avg.feed(sample);
  const double rho1 = core::schedule_value(core::Schedule::rho_vr(), 1);
  CHECK(d.isApprox(rho1 * sample, 1e-12));

  Vector d0(2);
  d0 << -3.0, 7.0;
  avg.reset(d0);
  CHECK(avg.estimate().isApprox(d0));
  CHECK(avg.step_count() == 0);
}

TEST_CASE("identical streams produce identical estimates") {
  vr::Averager a(4), b(4);
  Rng rng(9);
  for (int k = 0; k < 50; ++k) {
    const Vector s = testsupport::random_direction(4, rng, 5.0);
    const Vector da = a.feed(s);
    const Vector db = b.feed(s);
    CHECK(da == db);
  }
}

TEST_CASE("estimate stays a convex combination of d0 and the samples") {
  Rng rng(21);
  vr::Averager avg(5);
  Vector d0 = testsupport::random_direction(5, rng, 2.0);
  avg.reset(d0);
  double bound = d0.lpNorm<Eigen::Infinity>();
  for (int k = 0; k < 200; ++k) {
    const Vector s = testsupport::random_direction(5, rng, 5.0);
    bound = std::max(bound, s.lpNorm<Eigen::Infinity>());
    const Vector& d = avg.feed(s);
    CHECK(d.lpNorm<Eigen::Infinity>() <= bound + 1e-12);
  }
}

TEST_CASE("disabled variance reduction returns the raw latest sample") {
  vr::Averager avg(2, core::Schedule::rho_vr(), /*variance_reduction=*/false);
  Rng rng(3);
  for (int k = 0; k < 10; ++k) {
    const Vector s = testsupport::random_direction(2, rng);
    CHECK(avg.feed(s) == s);
  }
}

TEST_CASE("tracking error matches the variance-reduction rate empirically") {
  // Drifting targets ||a_t - a_{t-1}|| <= G/(t+3), noisy observations with
  // E||noise||^2 = sigma^2; checked at a reduced horizon here, in full in the
  // acceptance suite.
  const int dim = 5, trials = 200;
  const double G = 1.0, sigma = 1.0;
  const std::vector<int> checkpoints{50, 200};
  std::vector<double> err_sum(checkpoints.size(), 0.0);
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(1000 + trial);
    Vector a = Vector::Zero(dim);
    vr::Averager avg(dim);
    for (int t = 1; t <= checkpoints.back(); ++t) {
      Vector dir = testsupport::random_direction(dim, rng);
      dir.normalize();
      a += (G / (t + 3.0)) * dir;
      avg.feed(a + core::gaussian_noise(dim, sigma, rng));
      for (std::size_t c = 0; c < checkpoints.size(); ++c)
        if (t == checkpoints[c])
          err_sum[c] += (a - avg.estimate()).squaredNorm();
    }
  }
  const double q = std::max(0.0 * std::pow(4.0, 2.0 / 3.0),
                            4.0 * sigma * sigma + 1.5 * G * G);
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    const double mean_err = err_sum[c] / trials;
    const double bound = q / std::pow(checkpoints[c] + 4.0, 2.0 / 3.0);
    CHECK(mean_err <= 1.5 * bound);
  }
}
