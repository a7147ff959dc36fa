#include "ofw/bench.hpp"

#include <iomanip>
#include <ostream>

namespace ofw::bench {

RegretLedger::RegretLedger(core::ObjectiveSense sense, double alpha)
    : sense_(sense), alpha_(alpha) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("alpha must lie in (0, 1]");
}

double RegretLedger::record_round(double played_value, double comparator_value) {
  sum_played_ += played_value;
  sum_comparator_ += comparator_value;
  const double cum = sense_ == core::ObjectiveSense::MaximizeDRSubmodular
                         ? alpha_ * sum_comparator_ - sum_played_
                         : sum_played_ - sum_comparator_;
  rows_.push_back({static_cast<int>(rows_.size()) + 1, played_value, comparator_value,
                   cum});
  return cum;
}

double RegretLedger::cumulative_regret() const {
  return rows_.empty() ? 0.0 : rows_.back().cum_regret;
}

void RegretLedger::write_csv(std::ostream& out) const {
  out << "t,played,comparator,cum_regret\n";
  out << std::setprecision(17);
  for (const LedgerRow& row : rows_)
    out << row.t << ',' << row.played << ',' << row.comparator << ','
        << row.cum_regret << '\n';
}

Vector offline_fw(const core::SmoothObjective& objective,
                  const core::ConstraintSet& set, int steps,
                  core::ObjectiveSense sense) {
  if (steps < 1) throw std::invalid_argument("offline FW needs at least one step");
  if (sense == core::ObjectiveSense::MaximizeDRSubmodular) {
    if (!set.zero_feasible())
      throw std::invalid_argument("continuous greedy needs 0 in the set");
    Vector x = Vector::Zero(set.dimension());
    for (int k = 0; k < steps; ++k) {
      const Vector v = set.lmo(objective.gradient(x), core::LinearSense::Maximize);
      x += v / static_cast<double>(steps);
    }
    return x;
  }
  Vector x = set.lmo(Vector::Zero(set.dimension()), core::LinearSense::Minimize);
  for (int k = 0; k < steps; ++k) {
    const Vector v = set.lmo(objective.gradient(x), core::LinearSense::Minimize);
    const double gamma = 2.0 / static_cast<double>(k + 2);
    x = (1.0 - gamma) * x + gamma * v;
  }
  return x;
}

BruteForceResult brute_force_opt(const submodular::SetFunction& f,
                                 const core::ConstraintSet& set) {
  const int n = f.ground_size();
  if (n != set.dimension())
    throw std::invalid_argument("ground set and constraint dimension differ");
  if (n > 15) throw SizeLimitError("brute force limited to n <= 15");
  BruteForceResult best;
  best.value = -std::numeric_limits<double>::infinity();
  submodular::IndexSet subset;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    subset.clear();
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) subset.push_back(i);
    if (!set.contains(submodular::indicator(subset, n), 1e-9)) continue;
    const double value = f.evaluate(subset);
    if (value > best.value) {
      best.value = value;
      best.best = subset;
    }
  }
  if (!std::isfinite(best.value))
    throw InfeasibleError("no feasible subset found");
  return best;
}

namespace {

void check_enumeration_size(int n) {
  if (n > 20) throw SizeLimitError("vertex enumeration limited to n <= 20");
}

}  // namespace

std::vector<Vector> enumerate_vertices(const lmo::BudgetedBox& set) {
  const int n = set.dimension();
  check_enumeration_size(n);
  const double b = set.budget();
  const int whole = static_cast<int>(std::floor(b + 1e-12));
  const double frac = b - whole;
  std::vector<Vector> vertices;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const int bits = __builtin_popcount(mask);
    if (bits > std::min(whole, n)) continue;
    Vector v = Vector::Zero(n);
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) v[i] = 1.0;
    vertices.push_back(v);
    if (frac > 1e-12 && bits == whole) {
      for (int j = 0; j < n; ++j) {
        if (mask & (1u << j)) continue;
        Vector w = v;
        w[j] = frac;
        vertices.push_back(w);
      }
    }
  }
  return vertices;
}

std::vector<Vector> enumerate_vertices(const lmo::PartitionMatroid& set) {
  const int n = set.dimension();
  check_enumeration_size(n);
  std::vector<Vector> vertices{Vector::Zero(n)};
  for (std::size_t b = 0; b < set.blocks().size(); ++b) {
    const auto& block = set.blocks()[b];
    const int cap = set.capacities()[b];
    // All subsets of this block up to the capacity, crossed with what we have.
    std::vector<std::vector<int>> choices;
    const int bn = static_cast<int>(block.size());
    for (std::uint32_t mask = 0; mask < (1u << bn); ++mask) {
      if (__builtin_popcount(mask) > cap) continue;
      std::vector<int> chosen;
      for (int i = 0; i < bn; ++i)
        if (mask & (1u << i)) chosen.push_back(block[i]);
      choices.push_back(std::move(chosen));
    }
    std::vector<Vector> extended;
    extended.reserve(vertices.size() * choices.size());
    for (const Vector& v : vertices) {
      for (const auto& chosen : choices) {
        Vector w = v;
        for (int i : chosen) w[i] = 1.0;
        extended.push_back(std::move(w));
      }
    }
    vertices = std::move(extended);
    if (vertices.size() > 2'000'000u)
      throw SizeLimitError("matroid vertex enumeration too large");
  }
  return vertices;
}

std::vector<Vector> enumerate_integral_flows(const lmo::FlowNetwork& network) {
  const int m = network.dimension();
  check_enumeration_size(m);
  const double a = network.flow_value();
  if (std::abs(a - std::round(a)) > 1e-9)
    throw std::invalid_argument("flow enumeration needs an integral flow value");
  std::vector<Vector> flows;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    Vector x = Vector::Zero(m);
    for (int e = 0; e < m; ++e)
      if (mask & (1u << e)) x[e] = 1.0;
    if (network.contains(x, 1e-9)) flows.push_back(std::move(x));
  }
  return flows;
}

core::SmoothObjective sum_objectives(std::vector<core::SmoothObjective> parts) {
  if (parts.empty()) throw std::invalid_argument("no objectives to sum");
  auto shared = std::make_shared<std::vector<core::SmoothObjective>>(std::move(parts));
  return {[shared](const Vector& x) {
            double total = 0.0;
            for (const auto& part : *shared) total += part.value(x);
            return total;
          },
          [shared](const Vector& x) {
            Vector g = shared->front().gradient(x);
            for (std::size_t i = 1; i < shared->size(); ++i)
              g += (*shared)[i].gradient(x);
            return g;
          }};
}

}  // namespace ofw::bench
