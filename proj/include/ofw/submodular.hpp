#pragma once

#include "ofw/core.hpp"
#include "ofw/lmo.hpp"

namespace ofw::submodular {

// Strictly increasing element indices.
using IndexSet = std::vector<int>;

// A monotone submodular set function over [n], evaluated through an oracle
// that counts calls. Evaluators must be safe for concurrent read-only use.
class SetFunction {
 public:
  SetFunction(int ground_size, std::function<double(const IndexSet&)> evaluator);
  SetFunction(const SetFunction& other)
      : n_(other.n_), evaluator_(other.evaluator_), count_(other.count_.load()) {}
  SetFunction& operator=(const SetFunction& other) {
    n_ = other.n_;
    evaluator_ = other.evaluator_;
    count_ = other.count_.load();
    return *this;
  }

  int ground_size() const { return n_; }
  double evaluate(const IndexSet& set) const;
  long evaluation_count() const { return count_.load(); }

 private:
  int n_;
  std::function<double(const IndexSet&)> evaluator_;
  mutable std::atomic<long> count_{0};
};

// f(S) = sum_i in S w_i.
SetFunction make_modular(const Vector& weights);
// f(S) = sum_u max_{j in S} R(u, j); R users x items, nonnegative.
SetFunction make_facility_location(const Matrix& ratings);
// f(S) = (1/J) sum_j [1 - prod_{a in S} (1 - P(a, j))]; P docs x topics in [0,1].
SetFunction make_coverage(const Matrix& doc_topics);

// One-sample estimate of d/dx_i of the multilinear extension at x:
// draws R from [n]\{i} with inclusion probabilities x, returns f(R+i) - f(R).
double grad_one_sample(const SetFunction& f, const Vector& x, int i, Rng& rng);

// Full-gradient variant sharing a single base sample across coordinates;
// unbiased per coordinate, at most n+1 evaluations.
Vector grad_one_sample_vector(const SetFunction& f, const Vector& x, Rng& rng);

// Exact multilinear extension by subset enumeration, n <= 20.
double brute_multilinear(const SetFunction& f, const Vector& x);
Vector brute_multilinear_grad(const SetFunction& f, const Vector& x);

// Closed-form multilinear extension of a facility location objective:
// F(x) = sum_u sum_l R(u, o_l) x_{o_l} prod_{m<l} (1 - x_{o_m}) with each
// user's items ordered by descending rating.
class FacilityLocationExtension {
 public:
  explicit FacilityLocationExtension(Matrix ratings);

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  core::SmoothObjective objective() const;
  SetFunction set_function() const { return make_facility_location(ratings_); }

  int dimension() const { return static_cast<int>(ratings_.cols()); }
  const Matrix& ratings() const { return ratings_; }

 private:
  Matrix ratings_;
  std::vector<std::vector<int>> order_;  // per-user descending-rating order
};

// Closed-form multilinear extension of probabilistic coverage:
// F(x) = (1/J) sum_j [1 - prod_a (1 - P(a, j) x_a)].
class CoverageExtension {
 public:
  explicit CoverageExtension(Matrix doc_topics);

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  core::SmoothObjective objective() const;
  SetFunction set_function() const { return make_coverage(probs_); }

  int dimension() const { return static_cast<int>(probs_.rows()); }
  const Matrix& doc_topics() const { return probs_; }

 private:
  Matrix probs_;
};

// Monte-Carlo extension evaluator with common random numbers: every call
// replays the same `samples` subsets drawn from a fixed seed, which keeps
// pipage direction comparisons consistent.
std::function<double(const Vector&)> make_monte_carlo_extension(
    std::shared_ptr<const SetFunction> f, int samples, std::uint64_t seed);

// Pipage rounding over an integral budgeted box or partition matroid
// polytope. Moves mass along two-coordinate directions in the
// F-nondecreasing sense until the point is integral; lossless for multilinear
// extensions. value_trace, when given, records F before rounding and after
// every move.
Vector pipage_round(const Vector& x, const lmo::BudgetedBox& set,
                    const std::function<double(const Vector&)>& extension_value,
                    std::vector<double>* value_trace = nullptr);
Vector pipage_round(const Vector& x, const lmo::PartitionMatroid& set,
                    const std::function<double(const Vector&)>& extension_value,
                    std::vector<double>* value_trace = nullptr);

// Support set {i : x_i > 0.5} of an integral point.
IndexSet support_set(const Vector& x);
Vector indicator(const IndexSet& set, int n);

}  // namespace ofw::submodular
