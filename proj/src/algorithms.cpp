#include "ofw/algorithms.hpp"

#include <algorithm>

namespace ofw::algorithms {

namespace {

Vector resolve_initial_point(const core::ConstraintSet& set, core::ObjectiveSense sense,
                             const std::optional<Vector>& requested) {
  if (sense == core::ObjectiveSense::MaximizeDRSubmodular) {
    if (requested)
      throw std::invalid_argument("submodular runs always start at the origin");
    if (!set.zero_feasible())
      throw std::invalid_argument("submodular maximization needs 0 in the set");
    return Vector::Zero(set.dimension());
  }
  Vector x1 = requested ? *requested
                        : set.lmo(Vector::Zero(set.dimension()),
                                  core::LinearSense::Minimize);
  if (!set.contains(x1, 1e-9))
    throw std::invalid_argument("initial point is not feasible");
  return x1;
}

}  // namespace

// ---------------------------------------------------------------------------
// Meta-Frank-Wolfe

MetaFrankWolfe::MetaFrankWolfe(const core::ConstraintSet& set, MetaFwOptions options)
    : set_(&set),
      opt_(std::move(options)),
      x1_(resolve_initial_point(set, opt_.sense, opt_.initial_point)),
      averager_(set.dimension(), core::Schedule::rho_vr(), opt_.variance_reduction) {
  if (opt_.inner_steps < 1) throw std::invalid_argument("K must be at least 1");
  const core::LinearSense oracle_sense =
      opt_.sense == core::ObjectiveSense::MaximizeDRSubmodular
          ? core::LinearSense::Maximize
          : core::LinearSense::Minimize;
  oracles_.reserve(opt_.inner_steps);
  for (int k = 1; k <= opt_.inner_steps; ++k)
    oracles_.emplace_back(set, oracle_sense, opt_.perturbation_rate,
                          core::mix_seed(opt_.seed, static_cast<std::uint64_t>(k)));
  inner_points_.resize(opt_.inner_steps);
  inner_vertices_.resize(opt_.inner_steps);
}

Vector MetaFrankWolfe::play() {
  const int K = opt_.inner_steps;
  Vector x = x1_;
  for (int k = 1; k <= K; ++k) {
    inner_points_[k - 1] = x;
    const Vector v = oracles_[k - 1].next();
    inner_vertices_[k - 1] = v;
    if (opt_.sense == core::ObjectiveSense::MaximizeDRSubmodular) {
      x += v / static_cast<double>(K);
    } else {
      const double eta = core::schedule_value(core::Schedule::eta_convex(), k);
      x = (1.0 - eta) * x + eta * v;
    }
  }
  if (!set_->contains(x, 1e-9))
    throw std::logic_error("meta-fw produced an infeasible iterate");
  played_ = true;
  return x;
}

void MetaFrankWolfe::feedback(core::StochasticGradientOracle& oracle) {
  if (!played_) throw std::logic_error("feedback before play");
  averager_.reset();  // d_t^{(0)} = 0 each round
  for (int k = 1; k <= opt_.inner_steps; ++k) {
    const core::GradientSample sample = oracle.query(inner_points_[k - 1], round_, k);
    const Vector& d = averager_.feed(sample);
    oracles_[k - 1].feedback(d);
  }
  queries_ += opt_.inner_steps;
  played_ = false;
  ++round_;
}

// ---------------------------------------------------------------------------
// One-Shot Frank-Wolfe

OneShotFrankWolfe::OneShotFrankWolfe(const core::ConstraintSet& set,
                                     OneShotOptions options)
    : set_(&set),
      opt_(std::move(options)),
      x_(resolve_initial_point(set, opt_.sense, opt_.initial_point)),
      averager_(set.dimension(), core::Schedule::rho_vr(), opt_.variance_reduction),
      last_vertex_(Vector::Zero(set.dimension())) {
  if (opt_.horizon < 1) throw std::invalid_argument("horizon must be at least 1");
}

Vector OneShotFrankWolfe::play() {
  if (opt_.sense == core::ObjectiveSense::MaximizeDRSubmodular &&
      round_ > opt_.horizon)
    throw std::logic_error("one-shot submodular run driven past its horizon");
  played_ = true;
  return x_;
}

void OneShotFrankWolfe::feedback(core::StochasticGradientOracle& oracle) {
  if (!played_) throw std::logic_error("feedback before play");
  const core::GradientSample sample = oracle.query(x_, round_);
  const Vector& d = averager_.feed(sample);
  if (opt_.sense == core::ObjectiveSense::MaximizeDRSubmodular) {
    last_vertex_ = set_->lmo(d, core::LinearSense::Maximize);
    x_ += last_vertex_ / static_cast<double>(opt_.horizon);
  } else {
    last_vertex_ = set_->lmo(d, core::LinearSense::Minimize);
    const double eta = core::schedule_value(core::Schedule::eta_convex(), round_);
    x_ = (1.0 - eta) * x_ + eta * last_vertex_;
  }
  ++queries_;
  played_ = false;
  ++round_;
}

// ---------------------------------------------------------------------------
// Regularized online Frank-Wolfe

RegularizedOnlineFw::RegularizedOnlineFw(const core::ConstraintSet& set,
                                         RegularizedOfwOptions options)
    : set_(&set),
      opt_(std::move(options)),
      x1_(resolve_initial_point(set, opt_.sense, opt_.initial_point)),
      x_(x1_),
      cumulative_(Vector::Zero(set.dimension())) {
  if (opt_.lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  if (opt_.surrogate_steps < 1)
    throw std::invalid_argument("surrogate needs at least one step");
}

Vector RegularizedOnlineFw::play() { return x_; }

Vector RegularizedOnlineFw::surrogate_argmin() const {
  const Vector g = opt_.sense == core::ObjectiveSense::MinimizeConvex
                       ? cumulative_
                       : Vector(-cumulative_);
  if (opt_.lambda == 0.0) return set_->lmo(g, core::LinearSense::Minimize);
  Vector v = x1_;
  for (int j = 1; j <= opt_.surrogate_steps; ++j) {
    const Vector grad = g + 2.0 * opt_.lambda * (v - x1_);
    const Vector s = set_->lmo(grad, core::LinearSense::Minimize);
    const Vector dir = s - v;
    const double gap = -grad.dot(dir);
    const double curvature = 2.0 * opt_.lambda * dir.squaredNorm();
    if (gap <= 0.0 || curvature <= 0.0) break;  // surrogate optimum reached
    const double step = std::min(1.0, gap / curvature);
    v += step * dir;
  }
  return v;
}

void RegularizedOnlineFw::feedback(core::StochasticGradientOracle& oracle) {
  const core::GradientSample sample = oracle.query(x_, round_);
  cumulative_ += sample.vector;
  const Vector v = surrogate_argmin();
  const double gamma = std::pow(static_cast<double>(round_), -0.75);
  x_ = (1.0 - gamma) * x_ + gamma * v;
  ++queries_;
  ++round_;
}

// ---------------------------------------------------------------------------
// Projected gradient ascent/descent

ProjectedGradient::ProjectedGradient(const core::ConstraintSet& set,
                                     ProjectedGradientOptions options)
    : set_(&set),
      opt_(std::move(options)),
      eta_(core::Schedule::eta_projected_gradient(
          opt_.step_constant > 0.0 ? opt_.step_constant
                                   : set.diameter() / std::sqrt(2.0))),
      x_(resolve_initial_point(set, opt_.sense, opt_.initial_point)) {
  if (!set.supports_projection())
    throw UnsupportedOperation("projected gradient needs a projection oracle");
}

Vector ProjectedGradient::play() { return x_; }

void ProjectedGradient::feedback(core::StochasticGradientOracle& oracle) {
  const core::GradientSample sample = oracle.query(x_, round_);
  const double eta = core::schedule_value(eta_, round_);
  const double sign =
      opt_.sense == core::ObjectiveSense::MaximizeDRSubmodular ? 1.0 : -1.0;
  x_ = set_->project(x_ + sign * eta * sample.vector);
  ++queries_;
  ++round_;
}

// ---------------------------------------------------------------------------
// Online greedy

OnlineGreedy::OnlineGreedy(int ground_size, OnlineGreedyOptions options)
    : n_(ground_size) {
  if (n_ <= 0) throw std::invalid_argument("ground set must be nonempty");
  if (options.budget < 1) throw std::invalid_argument("budget must be at least 1");
  if (!(options.perturbation_rate > 0.0))
    throw std::invalid_argument("perturbation rate must be positive");
  const int b = std::min(options.budget, n_);
  experts_.resize(b);
  for (int j = 0; j < b; ++j) {
    experts_[j].cumulative = Vector::Zero(n_);
    experts_[j].perturbation = Vector(n_);
    Rng rng(core::mix_seed(options.seed, static_cast<std::uint64_t>(j)));
    for (int e = 0; e < n_; ++e)
      experts_[j].perturbation[e] =
          core::rand_uniform(rng) / options.perturbation_rate;
  }
}

std::pair<submodular::IndexSet, double> OnlineGreedy::step(
    const submodular::SetFunction& f) {
  if (f.ground_size() != n_)
    throw std::invalid_argument("set function ground size mismatch");
  submodular::IndexSet played;
  std::vector<bool> picked(n_, false);
  for (auto& expert : experts_) {
    // Pick from past cumulative rewards; restricting to fresh elements only
    // drops zero-marginal repeats.
    int choice = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (int e = 0; e < n_; ++e) {
      if (picked[e]) continue;
      const double score = expert.cumulative[e] + expert.perturbation[e];
      if (score > best) {
        best = score;
        choice = e;
      }
    }
    // Full-information feedback: marginal gain of every element given the
    // earlier slots' picks of this round.
    const double f_prefix = f.evaluate(played);
    for (int e = 0; e < n_; ++e) {
      if (picked[e]) continue;  // marginal of an already-picked element is 0
      submodular::IndexSet with = played;
      with.insert(std::lower_bound(with.begin(), with.end(), e), e);
      expert.cumulative[e] += f.evaluate(with) - f_prefix;
    }
    picked[choice] = true;
    played.insert(std::lower_bound(played.begin(), played.end(), choice), choice);
  }
  ++round_;
  return {played, f.evaluate(played)};
}

}  // namespace ofw::algorithms
