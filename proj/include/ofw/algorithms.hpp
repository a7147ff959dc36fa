#pragma once

#include "ofw/core.hpp"
#include "ofw/olo.hpp"
#include "ofw/submodular.hpp"
#include "ofw/vr.hpp"

namespace ofw::algorithms {

struct RoundOutcome {
  Vector point;
  double value = std::numeric_limits<double>::quiet_NaN();
  long grad_queries = 0;
};

// Common play/feedback protocol for the continuous online optimizers. play()
// commits the round's decision; feedback() consumes the revealed gradient
// oracle and advances the state.
class OnlineAlgorithm {
 public:
  virtual ~OnlineAlgorithm() = default;

  virtual Vector play() = 0;
  virtual void feedback(core::StochasticGradientOracle& oracle) = 0;
  virtual long grad_queries() const = 0;
  virtual int round() const = 0;  // 1-based index of the round being played

  RoundOutcome step(const core::SmoothObjective& objective,
                    core::StochasticGradientOracle& oracle) {
    RoundOutcome out;
    out.point = play();
    out.value = objective.value(out.point);
    const long before = grad_queries();
    feedback(oracle);
    out.grad_queries = grad_queries() - before;
    return out;
  }
};

struct MetaFwOptions {
  int inner_steps = 1;  // K
  core::ObjectiveSense sense = core::ObjectiveSense::MaximizeDRSubmodular;
  std::uint64_t seed = 1;
  double perturbation_rate = 0.1;  // FPL epsilon; drivers pass 1/sqrt(T)
  bool variance_reduction = true;
  std::optional<Vector> initial_point;  // convex runs only
};

// K FPL oracles supply the Frank-Wolfe vertices of each round; gradient
// estimates taken along the inner iterates are chained through the averager
// (reset to zero every round) and fed back as the oracles' linear objectives.
class MetaFrankWolfe : public OnlineAlgorithm {
 public:
  MetaFrankWolfe(const core::ConstraintSet& set, MetaFwOptions options);

  Vector play() override;
  void feedback(core::StochasticGradientOracle& oracle) override;
  long grad_queries() const override { return queries_; }
  int round() const override { return round_; }

  const std::vector<olo::FplOracle>& oracles() const { return oracles_; }
  const std::vector<Vector>& inner_points() const { return inner_points_; }
  const std::vector<Vector>& inner_vertices() const { return inner_vertices_; }
  const Vector& initial_point() const { return x1_; }

 private:
  const core::ConstraintSet* set_;
  MetaFwOptions opt_;
  Vector x1_;
  std::vector<olo::FplOracle> oracles_;
  vr::Averager averager_;
  std::vector<Vector> inner_points_;
  std::vector<Vector> inner_vertices_;
  long queries_ = 0;
  int round_ = 1;
  bool played_ = false;
};

struct OneShotOptions {
  core::ObjectiveSense sense = core::ObjectiveSense::MaximizeDRSubmodular;
  int horizon = 1;  // T; the submodular step size is 1/T
  bool variance_reduction = true;
  std::optional<Vector> initial_point;  // convex runs only
};

// One gradient sample per round, persistent averaging across rounds, one
// Frank-Wolfe step on the averaged estimate.
class OneShotFrankWolfe : public OnlineAlgorithm {
 public:
  OneShotFrankWolfe(const core::ConstraintSet& set, OneShotOptions options);

  Vector play() override;
  void feedback(core::StochasticGradientOracle& oracle) override;
  long grad_queries() const override { return queries_; }
  int round() const override { return round_; }

  const vr::Averager& averager() const { return averager_; }
  const Vector& last_vertex() const { return last_vertex_; }

 private:
  const core::ConstraintSet* set_;
  OneShotOptions opt_;
  Vector x_;
  vr::Averager averager_;
  Vector last_vertex_;
  long queries_ = 0;
  int round_ = 1;
  bool played_ = false;
};

struct RegularizedOfwOptions {
  core::ObjectiveSense sense = core::ObjectiveSense::MinimizeConvex;
  double lambda = 1.0;       // regularizer weight; drivers default to sqrt(T)
  int surrogate_steps = 50;  // inner Frank-Wolfe iterations on the surrogate
  std::optional<Vector> initial_point;
};

// Online conditional gradient baseline: cumulative gradient estimates define
// a quadratically regularized surrogate whose approximate minimizer is the
// step target; x_{t+1} = (1 - t^{-3/4}) x_t + t^{-3/4} v_t.
class RegularizedOnlineFw : public OnlineAlgorithm {
 public:
  RegularizedOnlineFw(const core::ConstraintSet& set, RegularizedOfwOptions options);

  Vector play() override;
  void feedback(core::StochasticGradientOracle& oracle) override;
  long grad_queries() const override { return queries_; }
  int round() const override { return round_; }

  // Inner Frank-Wolfe (exact line search) on <g, v> + lambda ||v - x1||^2.
  Vector surrogate_argmin() const;
  const Vector& cumulative_gradient() const { return cumulative_; }

 private:
  const core::ConstraintSet* set_;
  RegularizedOfwOptions opt_;
  Vector x1_;
  Vector x_;
  Vector cumulative_;
  long queries_ = 0;
  int round_ = 1;
};

struct ProjectedGradientOptions {
  core::ObjectiveSense sense = core::ObjectiveSense::MinimizeConvex;
  double step_constant = 0.0;  // c in eta_t = c/sqrt(t); 0 -> D/sqrt(2)
  std::optional<Vector> initial_point;
};

// OGA/OGD baseline; requires the constraint set to expose projection.
class ProjectedGradient : public OnlineAlgorithm {
 public:
  ProjectedGradient(const core::ConstraintSet& set, ProjectedGradientOptions options);

  Vector play() override;
  void feedback(core::StochasticGradientOracle& oracle) override;
  long grad_queries() const override { return queries_; }
  int round() const override { return round_; }

 private:
  const core::ConstraintSet* set_;
  ProjectedGradientOptions opt_;
  core::Schedule eta_;
  Vector x_;
  long queries_ = 0;
  int round_ = 1;
};

struct OnlineGreedyOptions {
  int budget = 1;                  // cardinality constraint b
  double perturbation_rate = 0.1;  // FPL epsilon per slot expert
  std::uint64_t seed = 1;
};

// Meta-action online greedy: b slot experts, each a lazy FPL over ground-set
// singletons rewarded with the marginal gain of its element given the earlier
// slots' picks of the same round.
class OnlineGreedy {
 public:
  OnlineGreedy(int ground_size, OnlineGreedyOptions options);

  // Plays a set against f_t, applies full-information marginal feedback to
  // every slot expert, and returns the played set with its value.
  std::pair<submodular::IndexSet, double> step(const submodular::SetFunction& f);

  int round() const { return round_; }
  int budget() const { return static_cast<int>(experts_.size()); }

 private:
  struct SlotExpert {
    Vector cumulative;
    Vector perturbation;
  };

  int n_;
  std::vector<SlotExpert> experts_;
  int round_ = 1;
};

}  // namespace ofw::algorithms
