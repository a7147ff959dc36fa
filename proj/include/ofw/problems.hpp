#pragma once

#include "ofw/core.hpp"
#include "ofw/lmo.hpp"
#include "ofw/submodular.hpp"

namespace ofw::problems {

// One revealed round: exact objective handle, stochastic gradient oracle, and
// the underlying discrete set function when the objective is a lifted one.
struct StreamRound {
  core::SmoothObjective objective;
  std::shared_ptr<core::StochasticGradientOracle> oracle;
  std::shared_ptr<const submodular::SetFunction> set_function;
};

// A replayable sequence of rounds over a fixed constraint set: round(t) is a
// pure function of (seed, t), so identical parameters replay identically.
class ExperimentStream {
 public:
  ExperimentStream(std::shared_ptr<const core::ConstraintSet> constraint, int horizon,
                   core::ObjectiveSense sense, std::function<StreamRound(int)> factory,
                   std::optional<core::SmoothObjective> expected_objective = {});

  const core::ConstraintSet& constraint() const { return *constraint_; }
  std::shared_ptr<const core::ConstraintSet> constraint_ptr() const { return constraint_; }
  int horizon() const { return horizon_; }
  core::ObjectiveSense sense() const { return sense_; }
  StreamRound round(int t) const;

  // Known expected objective of i.i.d. streams (stochastic-regret comparator).
  const std::optional<core::SmoothObjective>& expected_objective() const {
    return expected_;
  }

 private:
  std::shared_ptr<const core::ConstraintSet> constraint_;
  int horizon_;
  core::ObjectiveSense sense_;
  std::function<StreamRound(int)> factory_;
  std::optional<core::SmoothObjective> expected_;
};

// Comma-separated numeric grid; values affinely rescaled from [input_lo,
// input_hi] to [0, 20] and clamped; empty cells map to 0.
Matrix load_ratings_csv(const std::string& path, double input_lo, double input_hi);
// Comma-separated docs x topics grid (no missing cells).
Matrix load_topics_csv(const std::string& path);

Matrix synthetic_ratings(int users, int items, int rank, std::uint64_t seed);
Matrix synthetic_topics(int docs, int topics, double alpha, std::uint64_t seed);
Matrix synthetic_low_rank(int rows, int cols, int rank, std::uint64_t seed);

// Facility location over disjoint user batches (falls back to sampling with
// replacement, with a warning, when batch * horizon exceeds the user count).
ExperimentStream facility_stream(const Matrix& ratings, int batch, int horizon,
                                 double budget, std::uint64_t seed);

// Probabilistic coverage over per-round random document batches.
ExperimentStream coverage_stream(const Matrix& doc_topics, int batch, int horizon,
                                 double budget, std::uint64_t seed);

// Quadratic edge costs sum_e w_e x_e^2 with w_e ~ Unif[100, 120] drawn fresh
// each round; `sigma` adds Gaussian noise to the otherwise exact gradient.
ExperimentStream flow_stream(std::shared_ptr<const lmo::FlowNetwork> network,
                             int horizon, double sigma, std::uint64_t seed);

// Squared error on per-round observed entry batches over a nuclear-norm ball;
// the stochastic oracle subsamples one observed entry per query (scaled by B).
ExperimentStream matrix_completion_stream(const Matrix& target, int batch, int horizon,
                                          double trace_radius, std::uint64_t seed);
ExperimentStream matrix_completion_stream(
    const Matrix& target, std::vector<std::vector<std::pair<int, int>>> batches,
    double trace_radius, std::uint64_t seed);

// Losses ||x - theta_t||^2 with theta_t ~ Unif[0,1]^n per round. Separate
// seeds let a fixed objective sequence be replayed under fresh oracle noise.
ExperimentStream quadratic_stream(std::shared_ptr<const core::ConstraintSet> set,
                                  int horizon, double sigma,
                                  std::uint64_t objective_seed,
                                  std::uint64_t noise_seed);

}  // namespace ofw::problems
