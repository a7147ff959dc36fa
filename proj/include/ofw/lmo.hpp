#pragma once

#include "ofw/core.hpp"

namespace ofw::lmo {

// {x in [0,1]^n : 1'x <= b}. Exact greedy LMO, Euclidean projection via
// clipping plus a bisection on the budget multiplier.
class BudgetedBox final : public core::ConstraintSet {
 public:
  BudgetedBox(int n, double budget);

  double budget() const { return budget_; }
  bool supports_projection() const override { return true; }

 protected:
  Vector do_lmo(const Vector& direction, core::LinearSense sense) const override;
  bool do_contains(const Vector& x, double tol) const override;
  Vector do_project(const Vector& y) const override;

 private:
  double budget_;
};

// Independent-set polytope of a partition matroid: blocks partition [n],
// per-block cardinality capacities. One block = uniform matroid.
class PartitionMatroid final : public core::ConstraintSet {
 public:
  PartitionMatroid(int n, std::vector<std::vector<int>> blocks,
                   std::vector<int> capacities);
  static PartitionMatroid uniform(int n, int rank);

  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  const std::vector<int>& capacities() const { return capacities_; }

 protected:
  Vector do_lmo(const Vector& direction, core::LinearSense sense) const override;
  bool do_contains(const Vector& x, double tol) const override;

 private:
  std::vector<std::vector<int>> blocks_;
  std::vector<int> capacities_;
};

// Unit-capacity s-t flows of a fixed value in a directed graph. The LMO is a
// min-cost flow computed by successive shortest paths (SPFA label correcting,
// negative edge costs allowed) followed by residual negative-cycle
// cancellation, so it is exact on general digraphs, not only DAGs.
class FlowNetwork final : public core::ConstraintSet {
 public:
  struct Arc {
    int from = 0;
    int to = 0;
  };

  FlowNetwork(int num_vertices, std::vector<Arc> arcs, int source, int sink,
              double flow_value);

  // File format: header line "n m s t a", then m lines "u v" (0-indexed).
  static FlowNetwork load(const std::string& path);

  int num_vertices() const { return num_vertices_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  int source() const { return source_; }
  int sink() const { return sink_; }
  double flow_value() const { return flow_value_; }
  double max_flow() const { return max_flow_; }

 protected:
  Vector do_lmo(const Vector& direction, core::LinearSense sense) const override;
  bool do_contains(const Vector& x, double tol) const override;

 private:
  int num_vertices_;
  std::vector<Arc> arcs_;
  int source_;
  int sink_;
  double flow_value_;
  double max_flow_;
};

// Matrices of shape rows x cols with nuclear norm at most radius, flattened
// column-major. LMO via power iteration on G'G (top singular triple);
// projection via a full SVD and spectrum projection onto the l1 ball.
class NuclearBall final : public core::ConstraintSet {
 public:
  NuclearBall(int rows, int cols, double radius);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double nuclear_radius() const { return radius_; }
  bool supports_projection() const override { return true; }

  static Matrix to_matrix(const Vector& x, int rows, int cols);
  static Vector to_vector(const Matrix& m);

 protected:
  Vector do_lmo(const Vector& direction, core::LinearSense sense) const override;
  bool do_contains(const Vector& x, double tol) const override;
  Vector do_project(const Vector& y) const override;

 private:
  int rows_;
  int cols_;
  double radius_;
};

// Top singular triple (sigma, u, v) of G by power iteration to relative
// tolerance 1e-8, at most 1000 iterations.
struct SingularTriple {
  double sigma = 0.0;
  Vector u;
  Vector v;
};
SingularTriple power_iteration_top_singular(const Matrix& g, double rel_tol = 1e-8,
                                            int max_iters = 1000);

}  // namespace ofw::lmo
