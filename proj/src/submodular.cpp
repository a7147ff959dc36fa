#include "ofw/submodular.hpp"

#include <algorithm>
#include <numeric>

namespace ofw::submodular {

SetFunction::SetFunction(int ground_size, std::function<double(const IndexSet&)> evaluator)
    : n_(ground_size), evaluator_(std::move(evaluator)) {
  if (n_ <= 0) throw std::invalid_argument("ground set must be nonempty");
  if (!evaluator_) throw std::invalid_argument("evaluator required");
}

double SetFunction::evaluate(const IndexSet& set) const {
  ++count_;
  return evaluator_(set);
}

SetFunction make_modular(const Vector& weights) {
  Vector w = weights;
  return SetFunction(static_cast<int>(w.size()), [w](const IndexSet& s) {
    double total = 0.0;
    for (int i : s) total += w[i];
    return total;
  });
}

SetFunction make_facility_location(const Matrix& ratings) {
  if (ratings.size() == 0) throw std::invalid_argument("empty ratings matrix");
  if (ratings.minCoeff() < 0.0)
    throw std::invalid_argument("facility location needs nonnegative ratings");
  Matrix r = ratings;
  return SetFunction(static_cast<int>(r.cols()), [r](const IndexSet& s) {
    double total = 0.0;
    for (int u = 0; u < r.rows(); ++u) {
      double best = 0.0;
      for (int j : s) best = std::max(best, r(u, j));
      total += best;
    }
    return total;
  });
}

SetFunction make_coverage(const Matrix& doc_topics) {
  if (doc_topics.size() == 0) throw std::invalid_argument("empty topic matrix");
  if (doc_topics.minCoeff() < -1e-12 || doc_topics.maxCoeff() > 1.0 + 1e-12)
    throw std::invalid_argument("coverage probabilities must lie in [0,1]");
  Matrix p = doc_topics;
  return SetFunction(static_cast<int>(p.rows()), [p](const IndexSet& s) {
    const int topics = static_cast<int>(p.cols());
    double total = 0.0;
    for (int j = 0; j < topics; ++j) {
      double miss = 1.0;
      for (int a : s) miss *= 1.0 - p(a, j);
      total += 1.0 - miss;
    }
    return total / topics;
  });
}

double grad_one_sample(const SetFunction& f, const Vector& x, int i, Rng& rng) {
  const int n = f.ground_size();
  if (x.size() != n) throw std::invalid_argument("point dimension mismatch");
  if (i < 0 || i >= n) throw std::invalid_argument("coordinate out of range");
  IndexSet base;
  base.reserve(n);
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    if (core::rand_uniform(rng) < x[j]) base.push_back(j);
  }
  IndexSet with = base;
  with.insert(std::lower_bound(with.begin(), with.end(), i), i);
  return f.evaluate(with) - f.evaluate(base);
}

Vector grad_one_sample_vector(const SetFunction& f, const Vector& x, Rng& rng) {
  const int n = f.ground_size();
  if (x.size() != n) throw std::invalid_argument("point dimension mismatch");
  std::vector<bool> in(n);
  IndexSet base;
  for (int j = 0; j < n; ++j) {
    in[j] = core::rand_uniform(rng) < x[j];
    if (in[j]) base.push_back(j);
  }
  const double f_base = f.evaluate(base);
  Vector g(n);
  for (int i = 0; i < n; ++i) {
    if (in[i]) {
      IndexSet without;
      without.reserve(base.size());
      for (int j : base)
        if (j != i) without.push_back(j);
      g[i] = f_base - f.evaluate(without);
    } else {
      IndexSet with = base;
      with.insert(std::lower_bound(with.begin(), with.end(), i), i);
      g[i] = f.evaluate(with) - f_base;
    }
  }
  return g;
}

namespace {

std::vector<double> evaluate_all_subsets(const SetFunction& f) {
  const int n = f.ground_size();
  if (n > 20) throw SizeLimitError("brute-force enumeration limited to n <= 20");
  std::vector<double> values(std::size_t{1} << n);
  IndexSet set;
  for (std::uint32_t mask = 0; mask < values.size(); ++mask) {
    set.clear();
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) set.push_back(i);
    values[mask] = f.evaluate(set);
  }
  return values;
}

}  // namespace

double brute_multilinear(const SetFunction& f, const Vector& x) {
  const int n = f.ground_size();
  if (x.size() != n) throw std::invalid_argument("point dimension mismatch");
  const std::vector<double> fv = evaluate_all_subsets(f);
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < fv.size(); ++mask) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) w *= (mask & (1u << i)) ? x[i] : 1.0 - x[i];
    total += w * fv[mask];
  }
  return total;
}

Vector brute_multilinear_grad(const SetFunction& f, const Vector& x) {
  const int n = f.ground_size();
  if (x.size() != n) throw std::invalid_argument("point dimension mismatch");
  const std::vector<double> fv = evaluate_all_subsets(f);
  Vector g = Vector::Zero(n);
  for (std::uint32_t mask = 0; mask < fv.size(); ++mask) {
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) continue;
      double w = 1.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        w *= (mask & (1u << j)) ? x[j] : 1.0 - x[j];
      }
      g[i] += w * (fv[mask | (1u << i)] - fv[mask]);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Closed-form extensions

FacilityLocationExtension::FacilityLocationExtension(Matrix ratings)
    : ratings_(std::move(ratings)) {
  if (ratings_.size() == 0) throw std::invalid_argument("empty ratings matrix");
  if (ratings_.minCoeff() < 0.0)
    throw std::invalid_argument("facility location needs nonnegative ratings");
  order_.resize(ratings_.rows());
  for (int u = 0; u < ratings_.rows(); ++u) {
    order_[u].resize(ratings_.cols());
    std::iota(order_[u].begin(), order_[u].end(), 0);
    std::stable_sort(order_[u].begin(), order_[u].end(),
                     [&](int a, int b) { return ratings_(u, a) > ratings_(u, b); });
  }
}

double FacilityLocationExtension::value(const Vector& x) const {
  if (x.size() != ratings_.cols()) throw std::invalid_argument("dimension mismatch");
  double total = 0.0;
  for (int u = 0; u < ratings_.rows(); ++u) {
    double alive = 1.0;  // probability no better item has been picked yet
    for (int item : order_[u]) {
      total += ratings_(u, item) * x[item] * alive;
      alive *= 1.0 - x[item];
    }
  }
  return total;
}

Vector FacilityLocationExtension::gradient(const Vector& x) const {
  if (x.size() != ratings_.cols()) throw std::invalid_argument("dimension mismatch");
  const int items = static_cast<int>(ratings_.cols());
  Vector g = Vector::Zero(items);
  std::vector<double> prefix(items + 1);
  for (int u = 0; u < ratings_.rows(); ++u) {
    const auto& ord = order_[u];
    prefix[0] = 1.0;
    for (int l = 0; l < items; ++l) prefix[l + 1] = prefix[l] * (1.0 - x[ord[l]]);
    // tail[l] = sum_{l'>l} R_{l'} x_{l'} prod_{l<m<l'} (1 - x_m), built backwards.
    double tail = 0.0;
    for (int l = items - 1; l >= 0; --l) {
      g[ord[l]] += prefix[l] * (ratings_(u, ord[l]) - tail);
      tail = ratings_(u, ord[l]) * x[ord[l]] + (1.0 - x[ord[l]]) * tail;
    }
  }
  return g;
}

core::SmoothObjective FacilityLocationExtension::objective() const {
  auto self = std::make_shared<FacilityLocationExtension>(*this);
  return {[self](const Vector& x) { return self->value(x); },
          [self](const Vector& x) { return self->gradient(x); }};
}

CoverageExtension::CoverageExtension(Matrix doc_topics) : probs_(std::move(doc_topics)) {
  if (probs_.size() == 0) throw std::invalid_argument("empty topic matrix");
  if (probs_.minCoeff() < -1e-12 || probs_.maxCoeff() > 1.0 + 1e-12)
    throw std::invalid_argument("coverage probabilities must lie in [0,1]");
}

double CoverageExtension::value(const Vector& x) const {
  if (x.size() != probs_.rows()) throw std::invalid_argument("dimension mismatch");
  const int topics = static_cast<int>(probs_.cols());
  double total = 0.0;
  for (int j = 0; j < topics; ++j) {
    double miss = 1.0;
    for (int a = 0; a < probs_.rows(); ++a) miss *= 1.0 - probs_(a, j) * x[a];
    total += 1.0 - miss;
  }
  return total / topics;
}

Vector CoverageExtension::gradient(const Vector& x) const {
  if (x.size() != probs_.rows()) throw std::invalid_argument("dimension mismatch");
  const int docs = static_cast<int>(probs_.rows());
  const int topics = static_cast<int>(probs_.cols());
  Vector g = Vector::Zero(docs);
  std::vector<double> suffix(docs + 1);
  for (int j = 0; j < topics; ++j) {
    suffix[docs] = 1.0;
    for (int a = docs - 1; a >= 0; --a)
      suffix[a] = suffix[a + 1] * (1.0 - probs_(a, j) * x[a]);
    double prefix = 1.0;
    for (int a = 0; a < docs; ++a) {
      g[a] += probs_(a, j) * prefix * suffix[a + 1];
      prefix *= 1.0 - probs_(a, j) * x[a];
    }
  }
  return g / topics;
}

core::SmoothObjective CoverageExtension::objective() const {
  auto self = std::make_shared<CoverageExtension>(*this);
  return {[self](const Vector& x) { return self->value(x); },
          [self](const Vector& x) { return self->gradient(x); }};
}

std::function<double(const Vector&)> make_monte_carlo_extension(
    std::shared_ptr<const SetFunction> f, int samples, std::uint64_t seed) {
  if (!f) throw std::invalid_argument("set function required");
  if (samples <= 0) throw std::invalid_argument("sample count must be positive");
  const int n = f->ground_size();
  // Fixed thresholds = common random numbers across evaluations.
  auto thresholds = std::make_shared<Matrix>(samples, n);
  Rng rng(seed);
  for (int s = 0; s < samples; ++s)
    for (int j = 0; j < n; ++j) (*thresholds)(s, j) = core::rand_uniform(rng);
  return [f, thresholds, samples, n](const Vector& x) {
    if (x.size() != n) throw std::invalid_argument("dimension mismatch");
    double total = 0.0;
    IndexSet set;
    for (int s = 0; s < samples; ++s) {
      set.clear();
      for (int j = 0; j < n; ++j)
        if ((*thresholds)(s, j) < x[j]) set.push_back(j);
      total += f->evaluate(set);
    }
    return total / samples;
  };
}

// ---------------------------------------------------------------------------
// Pipage rounding

namespace {

constexpr double kIntTol = 1e-9;

void snap(Vector& y, int i) {
  if (y[i] <= kIntTol) y[i] = 0.0;
  else if (y[i] >= 1.0 - kIntTol) y[i] = 1.0;
}

std::vector<int> fractional_coords(const Vector& y, const std::vector<int>& block) {
  std::vector<int> frac;
  for (int i : block)
    if (y[i] > 0.0 && y[i] < 1.0) frac.push_back(i);
  return frac;
}

Vector pipage_impl(const Vector& x, const std::vector<std::vector<int>>& blocks,
                   const std::vector<long>& caps,
                   const std::function<double(const Vector&)>& value,
                   std::vector<double>* trace) {
  Vector y = x;
  for (int i = 0; i < y.size(); ++i) snap(y, i);
  if (trace) {
    trace->clear();
    trace->push_back(value(y));
  }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    std::vector<int> frac = fractional_coords(y, blocks[b]);
    while (frac.size() >= 2) {
      const int i = frac[0];
      const int j = frac[1];
      Vector raised = y;  // push mass from j to i
      const double up = std::min(1.0 - y[i], y[j]);
      raised[i] += up;
      raised[j] -= up;
      snap(raised, i);
      snap(raised, j);
      Vector lowered = y;  // push mass from i to j
      const double down = std::min(y[i], 1.0 - y[j]);
      lowered[i] -= down;
      lowered[j] += down;
      snap(lowered, i);
      snap(lowered, j);
      const double f_raised = value(raised);
      const double f_lowered = value(lowered);
      y = (f_raised >= f_lowered) ? raised : lowered;
      if (trace) trace->push_back(std::max(f_raised, f_lowered));
      frac = fractional_coords(y, blocks[b]);
    }
    if (frac.size() == 1) {
      const int i = frac[0];
      // Integral capacities guarantee rounding up stays feasible, so both
      // directions are available and the better one never loses value.
      long block_units = 0;
      for (int k : blocks[b])
        if (k != i && y[k] > 0.5) ++block_units;
      Vector up = y;
      up[i] = 1.0;
      Vector down = y;
      down[i] = 0.0;
      const bool up_ok = block_units + 1 <= caps[b];
      const double f_up = up_ok ? value(up) : -std::numeric_limits<double>::infinity();
      const double f_down = value(down);
      y = (f_up >= f_down) ? up : down;
      if (trace) trace->push_back(std::max(f_up, f_down));
    }
  }
  return y;
}

long integral_cap(double budget) {
  const long cap = std::lround(budget);
  if (std::abs(budget - static_cast<double>(cap)) > 1e-9)
    throw std::invalid_argument("pipage rounding requires an integral budget");
  return cap;
}

}  // namespace

Vector pipage_round(const Vector& x, const lmo::BudgetedBox& set,
                    const std::function<double(const Vector&)>& extension_value,
                    std::vector<double>* value_trace) {
  if (!set.contains(x, 1e-9)) throw std::invalid_argument("pipage input infeasible");
  std::vector<int> all(set.dimension());
  std::iota(all.begin(), all.end(), 0);
  return pipage_impl(x, {all}, {integral_cap(set.budget())}, extension_value,
                     value_trace);
}

Vector pipage_round(const Vector& x, const lmo::PartitionMatroid& set,
                    const std::function<double(const Vector&)>& extension_value,
                    std::vector<double>* value_trace) {
  if (!set.contains(x, 1e-9)) throw std::invalid_argument("pipage input infeasible");
  std::vector<long> caps(set.capacities().begin(), set.capacities().end());
  return pipage_impl(x, set.blocks(), caps, extension_value, value_trace);
}

IndexSet support_set(const Vector& x) {
  IndexSet s;
  for (int i = 0; i < x.size(); ++i)
    if (x[i] > 0.5) s.push_back(i);
  return s;
}

Vector indicator(const IndexSet& set, int n) {
  Vector x = Vector::Zero(n);
  for (int i : set) {
    if (i < 0 || i >= n) throw std::invalid_argument("index out of range");
    x[i] = 1.0;
  }
  return x;
}

}  // namespace ofw::submodular
