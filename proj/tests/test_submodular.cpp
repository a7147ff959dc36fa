#include "ofw/submodular.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace ofw;
using submodular::IndexSet;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Matrix one_user_5_3() {
  Matrix r(1, 2);
  r << 5.0, 3.0;
  return r;
}

Matrix random_coverage(int docs, int topics, Rng& rng) {
  Matrix p(docs, topics);
  for (int i = 0; i < p.size(); ++i) p.data()[i] = core::rand_uniform(rng);
  return p;
}

Vector random_box_point(int n, Rng& rng) {
  Vector x(n);
  for (int i = 0; i < n; ++i) x[i] = core::rand_uniform(rng);
  return x;
}

}  // namespace

TEST_CASE("set function counts evaluations") {
  auto f = submodular::make_modular(vec({1, 2, 3}));
  CHECK(f.evaluate({0, 2}) == doctest::Approx(4.0));
  CHECK(f.evaluate({}) == doctest::Approx(0.0));
  CHECK(f.evaluation_count() == 2);
}

TEST_CASE("facility and coverage set functions are monotone and submodular") {
  Rng rng(3);
  Matrix ratings(4, 6);
  for (int i = 0; i < ratings.size(); ++i)
    ratings.data()[i] = 20.0 * core::rand_uniform(rng);
  auto fl = submodular::make_facility_location(ratings);
  auto cov = submodular::make_coverage(random_coverage(6, 3, rng));
  for (const auto& f : {fl, cov}) {
    CHECK(f.evaluate({}) >= 0.0);
    // Monotone on sampled chains.
    for (int trial = 0; trial < 50; ++trial) {
      IndexSet chain;
      double prev = f.evaluate(chain);
      for (int i = 0; i < f.ground_size(); ++i) {
        if (core::rand_uniform(rng) < 0.5) continue;
        chain.push_back(i);
        const double cur = f.evaluate(chain);
        CHECK(cur >= prev - 1e-12);
        prev = cur;
      }
    }
    // Diminishing returns on sampled triples A subset B, i not in B.
    for (int trial = 0; trial < 200; ++trial) {
      IndexSet a, b;
      for (int i = 0; i < f.ground_size(); ++i) {
        const double u = core::rand_uniform(rng);
        if (u < 0.25) {
          a.push_back(i);
          b.push_back(i);
        } else if (u < 0.5) {
          b.push_back(i);
        }
      }
      const int i = static_cast<int>(core::rand_below(rng, f.ground_size()));
      if (std::binary_search(b.begin(), b.end(), i)) continue;
      IndexSet ai = a, bi = b;
      ai.insert(std::lower_bound(ai.begin(), ai.end(), i), i);
      bi.insert(std::lower_bound(bi.begin(), bi.end(), i), i);
      CHECK(f.evaluate(ai) - f.evaluate(a) >=
            f.evaluate(bi) - f.evaluate(b) - 1e-9);
    }
  }
}

TEST_CASE("one-sample gradient degenerate cases are exact") {
  Rng rng(7);
  Matrix ratings(2, 3);
  ratings << 5, 3, 1, 2, 6, 4;
  auto f = submodular::make_facility_location(ratings);
  // x = 0: R is always empty.
  for (int i = 0; i < 3; ++i) {
    const double g = submodular::grad_one_sample(f, Vector::Zero(3), i, rng);
    CHECK(g == doctest::Approx(f.evaluate({i}) - f.evaluate({})));
  }
  // x = 1 off-coordinate: R is always everything else.
  Vector ones = Vector::Ones(3);
  const double g0 = submodular::grad_one_sample(f, ones, 0, rng);
  CHECK(g0 == doctest::Approx(f.evaluate({0, 1, 2}) - f.evaluate({1, 2})));
}

TEST_CASE("one-sample gradient is unbiased on the two-item facility example") {
  // Enumerating R over {1}: 0.5 (5 - 0) + 0.5 (5 - 3) = 3.5.
  auto f = submodular::make_facility_location(one_user_5_3());
  Rng rng(13);
  const Vector x = vec({0.0, 0.5});
  std::vector<double> draws;
  for (int s = 0; s < 100'000; ++s)
    draws.push_back(submodular::grad_one_sample(f, x, 0, rng));
  const auto stats = testsupport::mean_and_stderr(draws);
  CHECK(std::abs(stats.mean - 3.5) <= 3.0 * stats.stderr_);
}

TEST_CASE("shared-sample gradient vector properties") {
  Rng rng(17);
  // Modular functions have constant marginals: the estimator is exact.
  const Vector w = vec({2, -0.0, 3, 1});
  auto modular = submodular::make_modular(w);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = random_box_point(4, rng);
    CHECK(submodular::grad_one_sample_vector(modular, x, rng).isApprox(w));
  }
  // x = 0 gives the singleton marginals with n+1 evaluations.
  Matrix ratings(3, 4);
  for (int i = 0; i < ratings.size(); ++i)
    ratings.data()[i] = 10.0 * core::rand_uniform(rng);
  auto f = submodular::make_facility_location(ratings);
  const long before = f.evaluation_count();
  const Vector g = submodular::grad_one_sample_vector(f, Vector::Zero(4), rng);
  CHECK(f.evaluation_count() - before <= 5);
  for (int i = 0; i < 4; ++i)
    CHECK(g[i] == doctest::Approx(f.evaluate({i}) - f.evaluate({})));
}

TEST_CASE("shared-sample gradient matches the brute-force gradient in mean") {
  Rng rng(19);
  auto p = random_coverage(8, 4, rng);
  auto f = std::make_shared<submodular::SetFunction>(submodular::make_coverage(p));
  const Vector x = random_box_point(8, rng);
  const Vector truth = submodular::brute_multilinear_grad(*f, x);
  const int samples = 100'000;
  Matrix draws(samples, 8);
  for (int s = 0; s < samples; ++s)
    draws.row(s) = submodular::grad_one_sample_vector(*f, x, rng).transpose();
  for (int i = 0; i < 8; ++i) {
    std::vector<double> coord(draws.col(i).data(), draws.col(i).data() + samples);
    const auto stats = testsupport::mean_and_stderr(coord);
    CHECK(std::abs(stats.mean - truth[i]) <= 3.0 * stats.stderr_);
  }
}

TEST_CASE("brute multilinear basics") {
  auto f = submodular::make_facility_location(one_user_5_3());
  // Agreement on vertices.
  CHECK(submodular::brute_multilinear(f, vec({1, 0})) == doctest::Approx(5.0));
  CHECK(submodular::brute_multilinear(f, vec({0, 1})) == doctest::Approx(3.0));
  // (0 + 5 + 3 + 5) / 4 over the four subsets.
  CHECK(submodular::brute_multilinear(f, vec({0.5, 0.5})) == doctest::Approx(3.25));

  auto modular = submodular::make_modular(vec({1, 2, 3}));
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = random_box_point(3, rng);
    CHECK(submodular::brute_multilinear(modular, x) ==
          doctest::Approx(vec({1, 2, 3}).dot(x)));
  }
  auto big = submodular::make_modular(Vector::Ones(21));
  CHECK_THROWS_AS(submodular::brute_multilinear(big, Vector::Zero(21)),
                  SizeLimitError);
}

TEST_CASE("facility extension matches brute enumeration") {
  submodular::FacilityLocationExtension ext(one_user_5_3());
  CHECK(ext.value(vec({1, 0})) == doctest::Approx(5.0));
  CHECK(ext.value(vec({0.5, 0.5})) == doctest::Approx(3.25));
  CHECK(ext.value(vec({0, 0})) == doctest::Approx(0.0));

  Matrix bad(1, 2);
  bad << -1.0, 2.0;
  CHECK_THROWS_AS(submodular::FacilityLocationExtension{bad}, std::invalid_argument);

  Rng rng(29);
  Matrix ratings(5, 7);
  for (int i = 0; i < ratings.size(); ++i)
    ratings.data()[i] = 20.0 * core::rand_uniform(rng);
  submodular::FacilityLocationExtension rich(ratings);
  auto f = rich.set_function();
  for (int trial = 0; trial < 100; ++trial) {
    const Vector x = random_box_point(7, rng);
    CHECK(rich.value(x) ==
          doctest::Approx(submodular::brute_multilinear(f, x)).epsilon(1e-10));
    CHECK(rich.gradient(x).isApprox(submodular::brute_multilinear_grad(f, x), 1e-9));
  }
}

TEST_CASE("coverage extension matches brute enumeration") {
  Matrix p(2, 1);
  p << 1.0, 0.5;
  submodular::CoverageExtension ext(p);
  CHECK(ext.value(vec({1, 0})) == doctest::Approx(1.0));
  CHECK(ext.value(vec({0, 1})) == doctest::Approx(0.5));

  Matrix bad(1, 2);
  bad << 0.5, 1.5;
  CHECK_THROWS_AS(submodular::CoverageExtension{bad}, std::invalid_argument);

  Rng rng(31);
  const Matrix probs = random_coverage(4, 2, rng);
  submodular::CoverageExtension rich(probs);
  auto f = rich.set_function();
  for (int trial = 0; trial < 100; ++trial) {
    const Vector x = random_box_point(4, rng);
    CHECK(rich.value(x) ==
          doctest::Approx(submodular::brute_multilinear(f, x)).epsilon(1e-10));
    CHECK(rich.gradient(x).isApprox(submodular::brute_multilinear_grad(f, x), 1e-9));
  }
}

TEST_CASE("extensions agree with the set function on every vertex") {
  Rng rng(37);
  const Matrix probs = random_coverage(10, 3, rng);
  submodular::CoverageExtension ext(probs);
  auto f = ext.set_function();
  for (std::uint32_t mask = 0; mask < (1u << 10); ++mask) {
    IndexSet s;
    Vector x = Vector::Zero(10);
    for (int i = 0; i < 10; ++i)
      if (mask & (1u << i)) {
        s.push_back(i);
        x[i] = 1.0;
      }
    CHECK(ext.value(x) == doctest::Approx(f.evaluate(s)).epsilon(1e-12));
  }
}

TEST_CASE("extension gradients are antitone (DR property)") {
  Rng rng(41);
  Matrix ratings(4, 6);
  for (int i = 0; i < ratings.size(); ++i)
    ratings.data()[i] = 20.0 * core::rand_uniform(rng);
  submodular::FacilityLocationExtension fac(ratings);
  submodular::CoverageExtension cov(random_coverage(6, 4, rng));
  for (int trial = 0; trial < 100; ++trial) {
    const Vector x = random_box_point(6, rng);
    Vector y(6);
    for (int i = 0; i < 6; ++i)
      y[i] = x[i] + (1.0 - x[i]) * core::rand_uniform(rng);  // y >= x
    CHECK(((fac.gradient(x) - fac.gradient(y)).minCoeff()) >= -1e-9);
    CHECK(((cov.gradient(x) - cov.gradient(y)).minCoeff()) >= -1e-9);
  }
}

TEST_CASE("pipage leaves integral points unchanged") {
  lmo::BudgetedBox box(4, 2.0);
  submodular::FacilityLocationExtension ext(Matrix::Ones(1, 4));
  const Vector x = vec({1, 0, 1, 0});
  CHECK(submodular::pipage_round(x, box, [&](const Vector& v) {
          return ext.value(v);
        }) == x);
}

TEST_CASE("pipage on the two-item facility example picks the better item") {
  lmo::BudgetedBox box(2, 1.0);
  submodular::FacilityLocationExtension ext(one_user_5_3());
  std::vector<double> trace;
  const Vector rounded = submodular::pipage_round(
      vec({0.5, 0.5}), box, [&](const Vector& v) { return ext.value(v); }, &trace);
  CHECK(rounded == vec({1, 0}));
  CHECK(ext.value(rounded) == doctest::Approx(5.0));
  CHECK(trace.front() == doctest::Approx(3.25));
  CHECK(trace.back() >= trace.front() - 1e-9);
}

TEST_CASE("pipage produces feasible integral sets and never loses value") {
  Rng rng(43);
  lmo::BudgetedBox box(8, 3.0);
  for (int instance = 0; instance < 10; ++instance) {
    submodular::CoverageExtension ext(random_coverage(8, 5, rng));
    auto value = [&](const Vector& v) { return ext.value(v); };
    for (int trial = 0; trial < 20; ++trial) {
      Vector x = random_box_point(8, rng);
      x = box.contains(x, 1e-12) ? x : box.project(x);
      std::vector<double> trace;
      const Vector rounded = submodular::pipage_round(x, box, value, &trace);
      for (int i = 0; i < 8; ++i)
        CHECK((rounded[i] == 0.0 || rounded[i] == 1.0));
      CHECK(box.contains(rounded, 1e-12));
      CHECK(ext.value(rounded) >= ext.value(x) - 1e-9);
      for (std::size_t s = 1; s < trace.size(); ++s)
        CHECK(trace[s] >= trace[s - 1] - 1e-9);
    }
  }
}

TEST_CASE("pipage respects partition matroid blocks") {
  Rng rng(47);
  lmo::PartitionMatroid matroid(6, {{0, 1, 2}, {3, 4, 5}}, {1, 2});
  submodular::CoverageExtension ext(random_coverage(6, 4, rng));
  auto value = [&](const Vector& v) { return ext.value(v); };
  for (int trial = 0; trial < 50; ++trial) {
    Vector x(6);
    // Random feasible fractional point: scale each block under its capacity.
    x << 0.4, 0.3, 0.2, 0.9, 0.6, 0.4;
    for (int i = 0; i < 6; ++i) x[i] *= core::rand_uniform(rng);
    const Vector rounded = submodular::pipage_round(x, matroid, value);
    CHECK(matroid.contains(rounded, 1e-12));
    for (int i = 0; i < 6; ++i)
      CHECK((rounded[i] == 0.0 || rounded[i] == 1.0));
    CHECK(ext.value(rounded) >= ext.value(x) - 1e-9);
  }
}

TEST_CASE("pipage rejects infeasible input and fractional budgets") {
  lmo::BudgetedBox box(3, 1.0);
  auto value = [](const Vector& v) { return v.sum(); };
  CHECK_THROWS_AS(submodular::pipage_round(vec({1, 1, 1}), box, value),
                  std::invalid_argument);
  lmo::BudgetedBox frac_box(3, 1.5);
  CHECK_THROWS_AS(submodular::pipage_round(vec({0.5, 0.5, 0.2}), frac_box, value),
                  std::invalid_argument);
}

TEST_CASE("monte-carlo extension replays common random numbers") {
  Rng rng(53);
  auto f = std::make_shared<submodular::SetFunction>(
      submodular::make_coverage(random_coverage(6, 3, rng)));
  auto mc = submodular::make_monte_carlo_extension(f, 200, 99);
  const Vector x = random_box_point(6, rng);
  CHECK(mc(x) == mc(x));
  // 200 common-seeded samples track the exact extension loosely.
  const double exact = submodular::brute_multilinear(*f, x);
  CHECK(std::abs(mc(x) - exact) <= 0.15 * std::max(1.0, std::abs(exact)));
}
