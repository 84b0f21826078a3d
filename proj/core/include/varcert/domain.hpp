#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "varcert/errors.hpp"
#include "varcert/expr.hpp"

namespace varcert {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
};

// An open box Omega compactly contained in an open box B0: per axis,
// B0.lo < Omega.lo < Omega.hi < B0.hi (strict on every side).
class BoxDomain {
 public:
  BoxDomain(std::vector<Interval> b0, std::vector<Interval> omega);
  int dim() const { return static_cast<int>(b0_.size()); }
  const std::vector<Interval>& b0() const { return b0_; }
  const std::vector<Interval>& omega() const { return omega_; }

 private:
  std::vector<Interval> b0_, omega_;
};

// Uniform tensor grid on a closed box, endpoints included exactly.
// Node ordering is row-major over axes (the last axis varies fastest);
// "lexicographic order" below always means ascending linear index.
class Grid {
 public:
  Grid(std::vector<Interval> box, std::vector<int> resolution);  // every m_k >= 3

  int dim() const { return static_cast<int>(box_.size()); }
  const std::vector<Interval>& box() const { return box_; }
  int res(int axis) const { return res_[static_cast<std::size_t>(axis)]; }
  double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }
  double max_spacing() const;
  std::size_t num_nodes() const { return num_nodes_; }

  double coord(int axis, int i) const;  // exact endpoints at i = 0 and i = m-1
  void node_coords(std::size_t node, std::span<double> out) const;
  std::size_t linear_index(std::span<const int> multi) const;
  void multi_index(std::size_t node, std::span<int> out) const;
  bool is_boundary(std::size_t node) const;
  // at least two layers away from every face (where centered interior
  // stencils of composed quantities are fully second-order)
  bool is_deep_interior(std::size_t node) const;

 private:
  std::vector<Interval> box_;
  std::vector<int> res_;
  std::vector<double> spacing_;
  std::vector<std::size_t> stride_;
  std::size_t num_nodes_ = 0;
};

// Node values of an R^N-valued function, one contiguous array per component.
class GridFunction {
 public:
  GridFunction(Grid grid, int components);

  const Grid& grid() const { return grid_; }
  int components() const { return components_; }
  double value(int comp, std::size_t node) const { return values_[static_cast<std::size_t>(comp)][node]; }
  double& value(int comp, std::size_t node) { return values_[static_cast<std::size_t>(comp)][node]; }
  std::span<const double> component(int comp) const { return values_[static_cast<std::size_t>(comp)]; }
  std::span<double> component(int comp) { return values_[static_cast<std::size_t>(comp)]; }

  double sup_norm() const;
  GridFunction operator+(const GridFunction& other) const;  // same grid shape required

 private:
  Grid grid_;
  int components_;
  std::vector<std::vector<double>> values_;
};

// Per-node N x n array of partial derivatives.
class GradientField {
 public:
  GradientField(Grid grid, int components);
  const Grid& grid() const { return grid_; }
  int components() const { return components_; }
  double value(std::size_t node, int j, int k) const {
    return values_[(node * static_cast<std::size_t>(components_) + static_cast<std::size_t>(j)) *
                       static_cast<std::size_t>(grid_.dim()) +
                   static_cast<std::size_t>(k)];
  }
  double& value(std::size_t node, int j, int k) {
    return values_[(node * static_cast<std::size_t>(components_) + static_cast<std::size_t>(j)) *
                       static_cast<std::size_t>(grid_.dim()) +
                   static_cast<std::size_t>(k)];
  }
  // all N*n entries at one node, row-major by component (EvalEnv layout)
  std::span<const double> at(std::size_t node) const {
    std::size_t w = static_cast<std::size_t>(components_) * static_cast<std::size_t>(grid_.dim());
    return {values_.data() + node * w, w};
  }

 private:
  Grid grid_;
  int components_;
  std::vector<double> values_;
};

// Evaluate expressions (over x only) at every node.  Evaluation errors
// are annotated with the offending node index.
GridFunction sample(const Grid& grid, std::span<const Expr> components);

// Derivative of per-node values along one axis: centered second-order
// differences at interior nodes, one-sided three-point stencils on the
// boundary faces (exact on per-axis quadratics).
std::vector<double> axis_derivative(std::span<const double> values, const Grid& grid, int axis);

GradientField discrete_gradient(const GridFunction& u);

// Tensor-product composite trapezoid rule; summation in ascending node
// order so results are bit-reproducible.
double quadrature(std::span<const double> node_values, const Grid& grid);

// Product-of-sines perturbation: component j is
//   amplitude[j] * prod_k sin(modes[k] * pi * (x_k - a_k)/(b_k - a_k)).
// Boundary nodes are set to exactly zero.
GridFunction make_bubble(const Grid& grid, std::span<const int> modes, std::span<const double> amplitude);

}  // namespace varcert
