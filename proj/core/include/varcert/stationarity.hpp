#pragma once

#include <span>
#include <vector>

#include "varcert/domain.hpp"
#include "varcert/lagrangian.hpp"

namespace varcert {

// Node-wise residual of the stationarity system,
//   r_j = f_y_j(x, y, Dy) - sum_k D_k[ f_z_jk(x, y, Dy) ],
// where Dy is the discrete gradient and D_k differentiates the composed
// node values with the same stencils.  interior_max_abs is taken over
// nodes at least two layers from every face, where both operators are
// fully centered.
struct ELResidual {
  GridFunction residual;
  double max_abs = 0.0;
  double interior_max_abs = 0.0;
};

ELResidual el_residual(const LagrangianSpec& lagrangian, const GridFunction& y);

// Dense n = 1 trajectory from a fixed-step RK4 integration; values between
// steps come from cubic Hermite interpolation of (y, y') at the step ends.
class Trajectory {
 public:
  Trajectory(std::vector<double> times, std::vector<double> values, std::vector<double> derivs, int components);

  int components() const { return components_; }
  double t_front() const { return times_.front(); }
  double t_back() const { return times_.back(); }
  double value(int comp, double t) const;
  double derivative(int comp, double t) const;

 private:
  std::size_t segment(double t) const;
  std::vector<double> times_;            // ascending
  std::vector<double> values_, derivs_;  // node-major, then component
  int components_;
};

// Integrate the stationarity system for n = 1 as an initial value problem
//   f_zz(t, y, y') y'' = f_y - f_z,t - f_z,y y'
// from (base_t, y_base, slope_base) to t_end with classic fixed-step RK4.
// The z-Hessian must stay invertible along the way (pivot and condition
// checks every step); violations raise NumericError.
Trajectory solve_el_ivp_1d(const LagrangianSpec& lagrangian, double base_t, std::span<const double> y_base,
                           std::span<const double> slope_base, double t_end, double step);

// Same, but covering [t_lo, t_hi] that contains base_t (integrates both
// directions from the base and merges).
Trajectory solve_el_ivp_span(const LagrangianSpec& lagrangian, double base_t, std::span<const double> y_base,
                             std::span<const double> slope_base, double t_lo, double t_hi, double step);

}  // namespace varcert
