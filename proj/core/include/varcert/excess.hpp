#pragma once

#include <cstddef>
#include <span>

#include "varcert/domain.hpp"
#include "varcert/field.hpp"
#include "varcert/lagrangian.hpp"

namespace varcert {

// Node statistics of the excess integrand along one competitor.
struct ExcessSummary {
  double min_value = 0.0;
  std::size_t argmin = 0;
  int num_negative_nodes = 0;  // nodes with value < -tol
  double integral = 0.0;       // quadrature of the node values
};

// F(y): quadrature of f(x, y(x), Dy(x)) with the discrete gradient.
double functional(const LagrangianSpec& lagrangian, const GridFunction& y);

// E = f(x,y,z) - f(x,y,theta) - sum_a f_z_a(x,y,theta) * (z_a - theta_a)
double excess_point(const LagrangianSpec& lagrangian, std::span<const double> x, std::span<const double> y,
                    std::span<const double> theta, std::span<const double> z);

// Node-wise excess along y with theta from the field and z from the
// discrete gradient.  Raises UncoveredError at unmatched nodes.
ExcessSummary excess_field(const SlopeField& field, const GridFunction& y, double tol = 1e-9);

// |(F(y) - F(y0)) - (int E dx + (I(y) - I(y0)))| with every piece on the
// shared grid, quadrature, and discrete gradient; node-wise algebra makes
// this roundoff-small whenever the candidate's slope matches the field.
double gap_identity_error(const LagrangianSpec& lagrangian, const SlopeField& field, const GridFunction& y,
                          const GridFunction& y0);

}  // namespace varcert
