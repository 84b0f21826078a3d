#include "varcert/excess.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "varcert/hilbert.hpp"

namespace varcert {

double functional(const LagrangianSpec& lagrangian, const GridFunction& y) {
  const Dims& dims = lagrangian.dims();
  const Grid& grid = y.grid();
  if (y.components() != dims.N) throw ValidationError("component count does not match N");
  GradientField dy = discrete_gradient(y);
  std::vector<double> integrand(grid.num_nodes());
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  std::vector<double> yv(static_cast<std::size_t>(dims.N));
  for (std::size_t node = 0; node < grid.num_nodes(); ++node) {
    grid.node_coords(node, x);
    for (int j = 0; j < dims.N; ++j) yv[static_cast<std::size_t>(j)] = y.value(j, node);
    integrand[node] = lagrangian.f_at(x, yv, dy.at(node));
  }
  return quadrature(integrand, grid);
}

double excess_point(const LagrangianSpec& lagrangian, std::span<const double> x, std::span<const double> y,
                    std::span<const double> theta, std::span<const double> z) {
  int slots = lagrangian.dims().N * lagrangian.dims().n;
  double dist = 0.0, scale = 0.0;
  for (int a = 0; a < slots; ++a) {
    std::size_t s = static_cast<std::size_t>(a);
    dist = std::fmax(dist, std::fabs(z[s] - theta[s]));
    scale = std::fmax(scale, std::fabs(theta[s]));
  }
  if (dist <= 1e-8 * (1.0 + scale)) {
    // this close to the slope the defining difference is pure
    // cancellation noise; the second-order form with the exact Hessian
    // is accurate to O(|z - theta|^3) and keeps the sign of the
    // curvature (a plain product of nonnegatives in the scalar case)
    EvalEnv env = lagrangian.env(x, y, theta);
    double quad = 0.0;
    for (int a = 0; a < slots; ++a) {
      double da = z[static_cast<std::size_t>(a)] - theta[static_cast<std::size_t>(a)];
      for (int b = 0; b < slots; ++b) {
        double db = z[static_cast<std::size_t>(b)] - theta[static_cast<std::size_t>(b)];
        quad += lagrangian.fzz(a, b).eval(env) * (da * db);
      }
    }
    return 0.5 * quad;
  }
  double f_z = lagrangian.f_at(x, y, z);
  double f_theta = lagrangian.f_at(x, y, theta);
  EvalEnv env = lagrangian.env(x, y, theta);
  double corr = 0.0;
  for (int a = 0; a < slots; ++a)
    corr += lagrangian.fz_flat(a).eval(env) * (z[static_cast<std::size_t>(a)] - theta[static_cast<std::size_t>(a)]);
  return f_z - f_theta - corr;
}

ExcessSummary excess_field(const SlopeField& field, const GridFunction& y, double tol) {
  const Dims& dims = field.dims();
  const Grid& grid = y.grid();
  if (y.components() != dims.N) throw ValidationError("component count does not match N");
  GradientField dy = discrete_gradient(y);
  std::vector<double> values(grid.num_nodes());
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  std::vector<double> yv(static_cast<std::size_t>(dims.N));
  std::vector<double> guess;
  ExcessSummary out;
  bool first = true;
  for (std::size_t node = 0; node < grid.num_nodes(); ++node) {
    grid.node_coords(node, x);
    for (int j = 0; j < dims.N; ++j) yv[static_cast<std::size_t>(j)] = y.value(j, node);
    FieldPoint fp;
    try {
      fp = field.point(x, yv, guess);
    } catch (const InvertError& e) {
      throw UncoveredError("excess not defined at node " + std::to_string(node) + ": " + e.what(), node);
    }
    guess = fp.lambda;
    double e = excess_point(field.lagrangian(), x, yv, fp.theta, dy.at(node));
    values[node] = e;
    if (first || e < out.min_value) {
      out.min_value = e;
      out.argmin = node;
      first = false;
    }
    if (e < -tol) ++out.num_negative_nodes;
  }
  out.integral = quadrature(values, grid);
  return out;
}

double gap_identity_error(const LagrangianSpec& lagrangian, const SlopeField& field, const GridFunction& y,
                          const GridFunction& y0) {
  double f_y = functional(lagrangian, y);
  double f_y0 = functional(lagrangian, y0);
  double i_y = hilbert_integral(field, y);
  double i_y0 = hilbert_integral(field, y0);
  double e_int = excess_field(field, y).integral;
  return std::fabs((f_y - f_y0) - (e_int + (i_y - i_y0)));
}

}  // namespace varcert
