#include "ofw/lmo.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace ofw::lmo {

namespace {

// Indices of strictly positive entries ordered by value descending, ties by
// lowest index.
std::vector<int> positive_order(const Vector& d) {
  std::vector<int> idx;
  idx.reserve(d.size());
  for (int i = 0; i < d.size(); ++i)
    if (d[i] > 0.0) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return d[a] > d[b]; });
  return idx;
}

double box_radius_sq(double budget, int n) {
  const double m = std::min(budget, static_cast<double>(n));
  const double whole = std::floor(m);
  const double frac = m - whole;
  return whole + frac * frac;
}

}  // namespace

// ---------------------------------------------------------------------------
// BudgetedBox

BudgetedBox::BudgetedBox(int n, double budget)
    : ConstraintSet(n, std::sqrt(std::min(static_cast<double>(n),
                                          2.0 * box_radius_sq(budget, n))),
                    std::sqrt(box_radius_sq(budget, n))),
      budget_(budget) {
  if (budget <= 0.0) throw std::invalid_argument("budget must be positive");
}

Vector BudgetedBox::do_lmo(const Vector& direction, core::LinearSense sense) const {
  if (sense == core::LinearSense::Minimize) {
    return do_lmo(-direction, core::LinearSense::Maximize);
  }
  Vector v = Vector::Zero(dimension());
  double remaining = budget_;
  for (int i : positive_order(direction)) {
    if (remaining <= 0.0) break;
    const double mass = std::min(1.0, remaining);
    v[i] = mass;
    remaining -= mass;
  }
  return v;
}

bool BudgetedBox::do_contains(const Vector& x, double tol) const {
  if (x.minCoeff() < -tol || x.maxCoeff() > 1.0 + tol) return false;
  return x.sum() <= budget_ + tol;
}

Vector BudgetedBox::do_project(const Vector& y) const {
  Vector clipped = y.cwiseMax(0.0).cwiseMin(1.0);
  if (clipped.sum() <= budget_) return clipped;
  // Budget is tight: find tau >= 0 with sum clip(y - tau, 0, 1) = b.
  auto clipped_sum = [&](double tau) {
    double s = 0.0;
    for (int i = 0; i < y.size(); ++i)
      s += std::clamp(y[i] - tau, 0.0, 1.0);
    return s;
  };
  double lo = 0.0, hi = y.maxCoeff();
  for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (clipped_sum(mid) > budget_ ? lo : hi) = mid;
  }
  const double tau = 0.5 * (lo + hi);
  Vector out(y.size());
  for (int i = 0; i < y.size(); ++i) out[i] = std::clamp(y[i] - tau, 0.0, 1.0);
  return out;
}

// ---------------------------------------------------------------------------
// PartitionMatroid

namespace {

double matroid_radius_sq(const std::vector<std::vector<int>>& blocks,
                         const std::vector<int>& caps) {
  if (blocks.size() != caps.size()) return 0.0;  // rejected in the constructor body
  double r = 0.0;
  for (std::size_t b = 0; b < blocks.size(); ++b)
    r += std::max(0.0, std::min<double>(caps[b], blocks[b].size()));
  return r;
}

double matroid_diameter_sq(const std::vector<std::vector<int>>& blocks,
                           const std::vector<int>& caps) {
  if (blocks.size() != caps.size()) return 0.0;
  double d = 0.0;
  for (std::size_t b = 0; b < blocks.size(); ++b)
    d += std::max(0.0, std::min<double>(2.0 * caps[b], blocks[b].size()));
  return d;
}

}  // namespace

PartitionMatroid::PartitionMatroid(int n, std::vector<std::vector<int>> blocks,
                                   std::vector<int> capacities)
    : ConstraintSet(n, std::sqrt(matroid_diameter_sq(blocks, capacities)),
                    std::sqrt(matroid_radius_sq(blocks, capacities))),
      blocks_(std::move(blocks)),
      capacities_(std::move(capacities)) {
  if (blocks_.size() != capacities_.size())
    throw std::invalid_argument("one capacity per block required");
  std::vector<bool> seen(n, false);
  for (const auto& block : blocks_) {
    for (int i : block) {
      if (i < 0 || i >= n) throw std::invalid_argument("block index out of range");
      if (seen[i]) throw std::invalid_argument("blocks must be disjoint");
      seen[i] = true;
    }
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
    throw std::invalid_argument("blocks must cover the ground set");
  for (int c : capacities_)
    if (c < 0) throw std::invalid_argument("capacities must be nonnegative");
}

PartitionMatroid PartitionMatroid::uniform(int n, int rank) {
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  return PartitionMatroid(n, {std::move(all)}, {rank});
}

Vector PartitionMatroid::do_lmo(const Vector& direction, core::LinearSense sense) const {
  if (sense == core::LinearSense::Minimize)
    return do_lmo(-direction, core::LinearSense::Maximize);
  Vector v = Vector::Zero(dimension());
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    std::vector<int> idx;
    for (int i : blocks_[b])
      if (direction[i] > 0.0) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int c) { return direction[a] > direction[c]; });
    const int take = std::min<int>(capacities_[b], static_cast<int>(idx.size()));
    for (int j = 0; j < take; ++j) v[idx[j]] = 1.0;
  }
  return v;
}

bool PartitionMatroid::do_contains(const Vector& x, double tol) const {
  if (x.minCoeff() < -tol || x.maxCoeff() > 1.0 + tol) return false;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    double s = 0.0;
    for (int i : blocks_[b]) s += x[i];
    if (s > capacities_[b] + tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// FlowNetwork

namespace {

constexpr double kCapEps = 1e-12;

struct Residual {
  // Arc 2i is the forward copy of input arc i, arc 2i+1 its reverse.
  std::vector<double> cap;
  std::vector<double> cost;
  std::vector<int> to;
  std::vector<std::vector<int>> out;  // arc ids leaving each vertex

  Residual(int n, const std::vector<FlowNetwork::Arc>& arcs, const Vector& costs)
      : cap(2 * arcs.size()), cost(2 * arcs.size()), to(2 * arcs.size()), out(n) {
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      cap[2 * i] = 1.0;
      cost[2 * i] = costs.size() ? costs[static_cast<int>(i)] : 0.0;
      to[2 * i] = arcs[i].to;
      cap[2 * i + 1] = 0.0;
      cost[2 * i + 1] = -cost[2 * i];
      to[2 * i + 1] = arcs[i].from;
      out[arcs[i].from].push_back(static_cast<int>(2 * i));
      out[arcs[i].to].push_back(static_cast<int>(2 * i + 1));
    }
  }

  int tail(int arc) const { return to[arc ^ 1]; }
};

// SPFA shortest path; fills parent arcs. Returns false if t unreachable.
bool spfa(const Residual& r, int s, int t, std::vector<int>& parent_arc) {
  const int n = static_cast<int>(r.out.size());
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<bool> queued(n, false);
  parent_arc.assign(n, -1);
  std::deque<int> queue;
  dist[s] = 0.0;
  queue.push_back(s);
  queued[s] = true;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    queued[u] = false;
    for (int arc : r.out[u]) {
      if (r.cap[arc] <= kCapEps) continue;
      const int v = r.to[arc];
      if (dist[u] + r.cost[arc] < dist[v] - 1e-15) {
        dist[v] = dist[u] + r.cost[arc];
        parent_arc[v] = arc;
        if (!queued[v]) {
          queue.push_back(v);
          queued[v] = true;
        }
      }
    }
  }
  return parent_arc[t] >= 0 || s == t;
}

// Cancels residual negative cycles in place (Bellman-Ford detection).
void cancel_negative_cycles(Residual& r) {
  const int n = static_cast<int>(r.out.size());
  const int max_rounds = 4 * static_cast<int>(r.cap.size()) + 8;
  for (int round = 0; round < max_rounds; ++round) {
    std::vector<double> dist(n, 0.0);
    std::vector<int> parent_arc(n, -1);
    int marked = -1;
    for (int pass = 0; pass < n; ++pass) {
      marked = -1;
      for (int arc = 0; arc < static_cast<int>(r.cap.size()); ++arc) {
        if (r.cap[arc] <= kCapEps) continue;
        const int u = r.tail(arc);
        const int v = r.to[arc];
        if (dist[u] + r.cost[arc] < dist[v] - 1e-12) {
          dist[v] = dist[u] + r.cost[arc];
          parent_arc[v] = arc;
          marked = v;
        }
      }
      if (marked < 0) break;
    }
    if (marked < 0) return;
    // Walk n parent steps to guarantee landing on the cycle, then extract it.
    int v = marked;
    for (int i = 0; i < n; ++i) v = r.tail(parent_arc[v]);
    std::vector<int> cycle;
    double bottleneck = std::numeric_limits<double>::infinity();
    double cycle_cost = 0.0;
    int u = v;
    do {
      const int arc = parent_arc[u];
      cycle.push_back(arc);
      bottleneck = std::min(bottleneck, r.cap[arc]);
      cycle_cost += r.cost[arc];
      u = r.tail(arc);
    } while (u != v);
    if (cycle_cost >= -1e-12 || bottleneck <= kCapEps) return;
    for (int arc : cycle) {
      r.cap[arc] -= bottleneck;
      r.cap[arc ^ 1] += bottleneck;
    }
  }
}

double unit_capacity_max_flow(int n, const std::vector<FlowNetwork::Arc>& arcs,
                              int s, int t) {
  Residual r(n, arcs, Vector());
  double total = 0.0;
  std::vector<int> parent_arc;
  while (true) {
    // BFS augmenting path (all costs zero, SPFA degenerates to BFS-like search).
    if (!spfa(r, s, t, parent_arc) || (s != t && parent_arc[t] < 0)) break;
    double delta = std::numeric_limits<double>::infinity();
    for (int v = t; v != s; v = r.tail(parent_arc[v]))
      delta = std::min(delta, r.cap[parent_arc[v]]);
    if (!(delta > kCapEps)) break;
    for (int v = t; v != s; v = r.tail(parent_arc[v])) {
      r.cap[parent_arc[v]] -= delta;
      r.cap[parent_arc[v] ^ 1] += delta;
    }
    total += delta;
  }
  return total;
}

}  // namespace

FlowNetwork::FlowNetwork(int num_vertices, std::vector<Arc> arcs, int source,
                         int sink, double flow_value)
    : ConstraintSet(static_cast<int>(arcs.size()),
                    std::sqrt(static_cast<double>(arcs.size())),
                    std::sqrt(static_cast<double>(arcs.size()))),
      num_vertices_(num_vertices),
      arcs_(std::move(arcs)),
      source_(source),
      sink_(sink),
      flow_value_(flow_value) {
  if (num_vertices_ < 2) throw std::invalid_argument("network needs >= 2 vertices");
  if (source_ < 0 || source_ >= num_vertices_ || sink_ < 0 || sink_ >= num_vertices_ ||
      source_ == sink_)
    throw std::invalid_argument("bad source/sink");
  for (const Arc& a : arcs_) {
    if (a.from < 0 || a.from >= num_vertices_ || a.to < 0 || a.to >= num_vertices_ ||
        a.from == a.to)
      throw std::invalid_argument("bad arc endpoints");
  }
  if (flow_value_ < 0.0) throw std::invalid_argument("flow value must be nonnegative");
  max_flow_ = unit_capacity_max_flow(num_vertices_, arcs_, source_, sink_);
  if (flow_value_ > max_flow_ + 1e-9)
    throw InfeasibleError("required flow value exceeds the max flow (" +
                          std::to_string(flow_value_) + " > " +
                          std::to_string(max_flow_) + ")");
}

FlowNetwork FlowNetwork::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open network file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty network file: " + path);
  std::istringstream header(line);
  int n = 0, m = 0, s = 0, t = 0;
  double a = 0.0;
  if (!(header >> n >> m >> s >> t >> a))
    throw ParseError("bad header (want \"n m s t a\"): " + path);
  std::vector<Arc> arcs;
  arcs.reserve(m);
  for (int i = 0; i < m; ++i) {
    if (!std::getline(in, line))
      throw ParseError("network file truncated at arc " + std::to_string(i + 1));
    std::istringstream row(line);
    Arc arc;
    if (!(row >> arc.from >> arc.to))
      throw ParseError("bad arc on line " + std::to_string(i + 2));
    arcs.push_back(arc);
  }
  return FlowNetwork(n, std::move(arcs), s, t, a);
}

Vector FlowNetwork::do_lmo(const Vector& direction, core::LinearSense sense) const {
  const Vector costs = (sense == core::LinearSense::Maximize)
                           ? Vector(-direction)
                           : direction;
  // All-zero directions take unit costs so the answer is a fixed canonical flow.
  const bool zero_dir = costs.isZero(0.0);
  Residual r(num_vertices_, arcs_,
             zero_dir ? Vector(Vector::Ones(dimension())) : costs);
  double remaining = flow_value_;
  std::vector<int> parent_arc;
  while (remaining > kCapEps) {
    if (!spfa(r, source_, sink_, parent_arc))
      throw InfeasibleError("no augmenting path; flow value infeasible");
    double delta = remaining;
    for (int v = sink_; v != source_; v = r.tail(parent_arc[v]))
      delta = std::min(delta, r.cap[parent_arc[v]]);
    for (int v = sink_; v != source_; v = r.tail(parent_arc[v])) {
      r.cap[parent_arc[v]] -= delta;
      r.cap[parent_arc[v] ^ 1] += delta;
    }
    remaining -= delta;
  }
  if (!zero_dir) cancel_negative_cycles(r);
  Vector x(dimension());
  for (int i = 0; i < dimension(); ++i) x[i] = r.cap[2 * i + 1];
  return x;
}

bool FlowNetwork::do_contains(const Vector& x, double tol) const {
  if (x.minCoeff() < -tol || x.maxCoeff() > 1.0 + tol) return false;
  Vector net = Vector::Zero(num_vertices_);
  for (int i = 0; i < dimension(); ++i) {
    net[arcs_[i].from] += x[i];
    net[arcs_[i].to] -= x[i];
  }
  for (int z = 0; z < num_vertices_; ++z) {
    const double target = (z == source_) ? flow_value_ : (z == sink_ ? -flow_value_ : 0.0);
    if (std::abs(net[z] - target) > tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// NuclearBall

NuclearBall::NuclearBall(int rows, int cols, double radius)
    : ConstraintSet(rows * cols, 2.0 * radius, radius),
      rows_(rows),
      cols_(cols),
      radius_(radius) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("bad matrix shape");
  if (radius <= 0.0) throw std::invalid_argument("nuclear radius must be positive");
}

Matrix NuclearBall::to_matrix(const Vector& x, int rows, int cols) {
  return Eigen::Map<const Matrix>(x.data(), rows, cols);
}

Vector NuclearBall::to_vector(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

SingularTriple power_iteration_top_singular(const Matrix& g, double rel_tol,
                                            int max_iters) {
  SingularTriple triple;
  triple.u = Vector::Zero(g.rows());
  triple.v = Vector::Zero(g.cols());
  if (g.norm() == 0.0) return triple;
  const int n = static_cast<int>(g.cols());
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = 1.0 + static_cast<double>(i) / (n + 1);
  v.normalize();
  double sigma_prev = -1.0;
  for (int iter = 0; iter < max_iters; ++iter) {
    const Vector w = g * v;
    const double sigma = w.norm();
    if (sigma == 0.0) return triple;
    const Vector z = g.transpose() * w;
    const double nz = z.norm();
    if (nz == 0.0) return triple;
    v = z / nz;
    if (std::abs(sigma - sigma_prev) <= rel_tol * std::max(sigma, 1e-300)) {
      sigma_prev = sigma;
      break;
    }
    sigma_prev = sigma;
  }
  const Vector w = g * v;
  triple.sigma = w.norm();
  triple.v = v;
  triple.u = (triple.sigma > 0.0) ? Vector(w / triple.sigma) : Vector::Zero(g.rows());
  return triple;
}

Vector NuclearBall::do_lmo(const Vector& direction, core::LinearSense sense) const {
  const Matrix g = to_matrix(direction, rows_, cols_);
  if (g.norm() == 0.0) return Vector::Zero(dimension());
  const SingularTriple top = power_iteration_top_singular(g);
  Matrix x = radius_ * top.u * top.v.transpose();
  if (sense == core::LinearSense::Minimize) x = -x;
  return to_vector(x);
}

bool NuclearBall::do_contains(const Vector& x, double tol) const {
  const Matrix m = to_matrix(x, rows_, cols_);
  const double nuclear = Eigen::BDCSVD<Matrix>(m).singularValues().sum();
  return nuclear <= radius_ + tol;
}

Vector NuclearBall::do_project(const Vector& y) const {
  const Matrix m = to_matrix(y, rows_, cols_);
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector sigma = svd.singularValues();
  if (sigma.sum() <= radius_) return y;
  // Project the spectrum onto the simplex {s >= 0, sum s = radius}.
  std::vector<double> sorted(sigma.data(), sigma.data() + sigma.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double prefix = 0.0, tau = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    prefix += sorted[j];
    const double candidate = (prefix - radius_) / static_cast<double>(j + 1);
    if (j + 1 == sorted.size() || sorted[j + 1] <= candidate) {
      tau = candidate;
      break;
    }
  }
  sigma = (sigma.array() - tau).max(0.0);
  return to_vector(svd.matrixU() * sigma.asDiagonal() * svd.matrixV().transpose());
}

}  // namespace ofw::lmo
