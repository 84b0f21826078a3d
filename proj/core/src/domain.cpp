#include "varcert/domain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace varcert {

namespace {

std::string axis_msg(const char* what, int axis) { return std::string(what) + " on axis " + std::to_string(axis + 1); }

}  // namespace

BoxDomain::BoxDomain(std::vector<Interval> b0, std::vector<Interval> omega)
    : b0_(std::move(b0)), omega_(std::move(omega)) {
  if (b0_.empty()) throw ValidationError("domain must have at least one axis");
  if (b0_.size() != omega_.size()) throw ValidationError("b0 and omega must have the same number of axes");
  for (std::size_t k = 0; k < b0_.size(); ++k) {
    int axis = static_cast<int>(k);
    if (!(b0_[k].lo < b0_[k].hi)) throw ValidationError(axis_msg("b0 interval is empty", axis));
    if (!(omega_[k].lo < omega_[k].hi)) throw ValidationError(axis_msg("omega interval is empty", axis));
    if (!(b0_[k].lo < omega_[k].lo && omega_[k].hi < b0_[k].hi))
      throw ValidationError(axis_msg("omega is not strictly inside b0", axis));
  }
}

Grid::Grid(std::vector<Interval> box, std::vector<int> resolution) : box_(std::move(box)), res_(std::move(resolution)) {
  if (box_.empty()) throw ValidationError("grid must have at least one axis");
  if (box_.size() != res_.size()) throw ValidationError("grid resolution must list one count per axis");
  spacing_.resize(box_.size());
  stride_.resize(box_.size());
  num_nodes_ = 1;
  for (std::size_t k = 0; k < box_.size(); ++k) {
    if (!(box_[k].lo < box_[k].hi)) throw ValidationError(axis_msg("grid interval is empty", static_cast<int>(k)));
    if (res_[k] < 3) throw ValidationError(axis_msg("grid needs at least 3 nodes", static_cast<int>(k)));
    spacing_[k] = box_[k].length() / static_cast<double>(res_[k] - 1);
    num_nodes_ *= static_cast<std::size_t>(res_[k]);
  }
  std::size_t s = 1;
  for (std::size_t k = box_.size(); k-- > 0;) {
    stride_[k] = s;
    s *= static_cast<std::size_t>(res_[k]);
  }
}

double Grid::max_spacing() const { return *std::max_element(spacing_.begin(), spacing_.end()); }

double Grid::coord(int axis, int i) const {
  const Interval& iv = box_[static_cast<std::size_t>(axis)];
  int m = res_[static_cast<std::size_t>(axis)];
  // convex combination keeps both endpoints exact
  return (static_cast<double>(m - 1 - i) * iv.lo + static_cast<double>(i) * iv.hi) / static_cast<double>(m - 1);
}

void Grid::node_coords(std::size_t node, std::span<double> out) const {
  for (std::size_t k = 0; k < box_.size(); ++k) {
    std::size_t i = (node / stride_[k]) % static_cast<std::size_t>(res_[k]);
    out[k] = coord(static_cast<int>(k), static_cast<int>(i));
  }
}

std::size_t Grid::linear_index(std::span<const int> multi) const {
  std::size_t node = 0;
  for (std::size_t k = 0; k < box_.size(); ++k) node += static_cast<std::size_t>(multi[k]) * stride_[k];
  return node;
}

void Grid::multi_index(std::size_t node, std::span<int> out) const {
  for (std::size_t k = 0; k < box_.size(); ++k)
    out[k] = static_cast<int>((node / stride_[k]) % static_cast<std::size_t>(res_[k]));
}

bool Grid::is_boundary(std::size_t node) const {
  for (std::size_t k = 0; k < box_.size(); ++k) {
    int i = static_cast<int>((node / stride_[k]) % static_cast<std::size_t>(res_[k]));
    if (i == 0 || i == res_[k] - 1) return true;
  }
  return false;
}

bool Grid::is_deep_interior(std::size_t node) const {
  for (std::size_t k = 0; k < box_.size(); ++k) {
    int i = static_cast<int>((node / stride_[k]) % static_cast<std::size_t>(res_[k]));
    if (i < 2 || i > res_[k] - 3) return false;
  }
  return true;
}

GridFunction::GridFunction(Grid grid, int components) : grid_(std::move(grid)), components_(components) {
  if (components_ < 1) throw ValidationError("grid function needs at least one component");
  values_.assign(static_cast<std::size_t>(components_), std::vector<double>(grid_.num_nodes(), 0.0));
}

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (const auto& comp : values_)
    for (double v : comp) m = std::max(m, std::fabs(v));
  return m;
}

GridFunction GridFunction::operator+(const GridFunction& other) const {
  if (components_ != other.components_ || grid_.num_nodes() != other.grid_.num_nodes())
    throw ValidationError("grid function shapes do not match");
  GridFunction out(grid_, components_);
  for (int j = 0; j < components_; ++j)
    for (std::size_t i = 0; i < grid_.num_nodes(); ++i) out.value(j, i) = value(j, i) + other.value(j, i);
  return out;
}

GradientField::GradientField(Grid grid, int components) : grid_(std::move(grid)), components_(components) {
  values_.assign(grid_.num_nodes() * static_cast<std::size_t>(components_) * static_cast<std::size_t>(grid_.dim()),
                 0.0);
}

GridFunction sample(const Grid& grid, std::span<const Expr> components) {
  if (components.empty()) throw ValidationError("sample needs at least one component");
  GridFunction out(grid, static_cast<int>(components.size()));
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  for (std::size_t node = 0; node < grid.num_nodes(); ++node) {
    grid.node_coords(node, x);
    EvalEnv env;
    env.x = x;
    for (std::size_t j = 0; j < components.size(); ++j) {
      try {
        out.value(static_cast<int>(j), node) = components[j].eval(env);
      } catch (const EvalError& e) {
        throw EvalError(std::string(e.what()) + " while sampling component " + std::to_string(j + 1) + " at node " +
                        std::to_string(node));
      }
    }
  }
  return out;
}

std::vector<double> axis_derivative(std::span<const double> values, const Grid& grid, int axis) {
  if (values.size() != grid.num_nodes()) throw ValidationError("value array does not match grid");
  std::vector<double> out(values.size());
  int m = grid.res(axis);
  double h = grid.spacing(axis);
  std::vector<int> multi(static_cast<std::size_t>(grid.dim()));
  for (std::size_t node = 0; node < grid.num_nodes(); ++node) {
    grid.multi_index(node, multi);
    int i = multi[static_cast<std::size_t>(axis)];
    auto neighbor = [&](int ii) {
      std::vector<int> idx = multi;
      idx[static_cast<std::size_t>(axis)] = ii;
      return values[grid.linear_index(idx)];
    };
    if (i == 0) {
      out[node] = (-3.0 * values[node] + 4.0 * neighbor(1) - neighbor(2)) / (2.0 * h);
    } else if (i == m - 1) {
      out[node] = (3.0 * values[node] - 4.0 * neighbor(m - 2) + neighbor(m - 3)) / (2.0 * h);
    } else {
      out[node] = (neighbor(i + 1) - neighbor(i - 1)) / (2.0 * h);
    }
  }
  return out;
}

GradientField discrete_gradient(const GridFunction& u) {
  const Grid& grid = u.grid();
  GradientField out(grid, u.components());
  for (int j = 0; j < u.components(); ++j) {
    for (int k = 0; k < grid.dim(); ++k) {
      std::vector<double> d = axis_derivative(u.component(j), grid, k);
      for (std::size_t node = 0; node < grid.num_nodes(); ++node) out.value(node, j, k) = d[node];
    }
  }
  return out;
}

double quadrature(std::span<const double> node_values, const Grid& grid) {
  if (node_values.size() != grid.num_nodes()) throw ValidationError("value array does not match grid");
  std::vector<int> multi(static_cast<std::size_t>(grid.dim()));
  double sum = 0.0;
  for (std::size_t node = 0; node < grid.num_nodes(); ++node) {
    grid.multi_index(node, multi);
    double w = 1.0;
    for (int k = 0; k < grid.dim(); ++k) {
      int i = multi[static_cast<std::size_t>(k)];
      double wk = grid.spacing(k);
      if (i == 0 || i == grid.res(k) - 1) wk *= 0.5;
      w *= wk;
    }
    sum += w * node_values[node];
  }
  return sum;
}

GridFunction make_bubble(const Grid& grid, std::span<const int> modes, std::span<const double> amplitude) {
  if (static_cast<int>(modes.size()) != grid.dim()) throw ValidationError("one mode per axis required");
  if (amplitude.empty()) throw ValidationError("bubble needs at least one component amplitude");
  for (std::size_t k = 0; k < modes.size(); ++k)
    if (modes[k] < 1) throw ValidationError(axis_msg("bubble mode must be positive", static_cast<int>(k)));

  constexpr double kPi = 3.14159265358979323846;
  // per-axis sine tables; endpoints forced to exactly zero
  std::vector<std::vector<double>> table(modes.size());
  for (std::size_t k = 0; k < modes.size(); ++k) {
    int m = grid.res(static_cast<int>(k));
    table[k].resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      if (i == 0 || i == m - 1) {
        table[k][static_cast<std::size_t>(i)] = 0.0;
      } else {
        double t = static_cast<double>(i) / static_cast<double>(m - 1);
        table[k][static_cast<std::size_t>(i)] = std::sin(static_cast<double>(modes[k]) * kPi * t);
      }
    }
  }

  GridFunction out(grid, static_cast<int>(amplitude.size()));
  std::vector<int> multi(static_cast<std::size_t>(grid.dim()));
  for (std::size_t node = 0; node < grid.num_nodes(); ++node) {
    grid.multi_index(node, multi);
    double prod = 1.0;
    for (std::size_t k = 0; k < modes.size(); ++k) prod *= table[k][static_cast<std::size_t>(multi[k])];
    for (std::size_t j = 0; j < amplitude.size(); ++j) out.value(static_cast<int>(j), node) = amplitude[j] * prod;
  }
  return out;
}

}  // namespace varcert
