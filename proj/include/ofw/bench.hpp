#pragma once

#include "ofw/core.hpp"
#include "ofw/lmo.hpp"
#include "ofw/submodular.hpp"

#include <iosfwd>

namespace ofw::bench {

struct LedgerRow {
  int t = 0;
  double played = 0.0;
  double comparator = 0.0;
  double cum_regret = 0.0;
};

// Per-round regret accounting. Maximization tracks
// alpha * sum(comparator) - sum(played); minimization tracks
// sum(played) - sum(comparator).
class RegretLedger {
 public:
  explicit RegretLedger(core::ObjectiveSense sense, double alpha = 1.0);

  // Appends a row and returns the cumulative alpha-regret.
  double record_round(double played_value, double comparator_value);

  const std::vector<LedgerRow>& rows() const { return rows_; }
  double cumulative_regret() const;
  double alpha() const { return alpha_; }
  core::ObjectiveSense sense() const { return sense_; }

  // CSV schema: t,played,comparator,cum_regret
  void write_csv(std::ostream& out) const;

 private:
  core::ObjectiveSense sense_;
  double alpha_;
  double sum_played_ = 0.0;
  double sum_comparator_ = 0.0;
  std::vector<LedgerRow> rows_;
};

// Constants of the variance-reduction error bound: the averaged estimate of a
// sequence drifting by at most G/(t+s) under noise sigma obeys
// E||a_t - d_t||^2 <= Q/(t+s+1)^{2/3}.
struct AnalysisConstants {
  double drift_bound = 1.0;    // G
  int shift = 3;               // s
  double noise = 1.0;          // sigma
  double initial_gap_sq = 0.0; // ||a_0 - d_0||^2

  double q() const {
    return std::max(initial_gap_sq * std::pow(shift + 1.0, 2.0 / 3.0),
                    4.0 * noise * noise + 1.5 * drift_bound * drift_bound);
  }
  double error_bound(int t) const {
    return q() / std::pow(static_cast<double>(t + shift + 1), 2.0 / 3.0);
  }
};

// Offline Frank-Wolfe. Submodular: continuous greedy from 0 with step 1/K,
// a (1 - 1/e)-approximate maximizer of a monotone DR-submodular objective.
// Convex: standard FW with step 2/(k+2) from the canonical vertex.
Vector offline_fw(const core::SmoothObjective& objective,
                  const core::ConstraintSet& set, int steps,
                  core::ObjectiveSense sense);

struct BruteForceResult {
  double value = 0.0;
  submodular::IndexSet best;
};

// Exhaustive search over feasible subsets (integral indicators), n <= 15.
BruteForceResult brute_force_opt(const submodular::SetFunction& f,
                                 const core::ConstraintSet& set);

// Vertex/flow enumeration oracles for exactness tests (small instances only).
std::vector<Vector> enumerate_vertices(const lmo::BudgetedBox& set);
std::vector<Vector> enumerate_vertices(const lmo::PartitionMatroid& set);
std::vector<Vector> enumerate_integral_flows(const lmo::FlowNetwork& network);

core::SmoothObjective sum_objectives(std::vector<core::SmoothObjective> parts);

}  // namespace ofw::bench
