#pragma once

#include <optional>
#include <span>
#include <vector>

#include "varcert/domain.hpp"
#include "varcert/lagrangian.hpp"
#include "varcert/stationarity.hpp"

namespace varcert {

// A parametrized family of stationary functions phi(x, lambda) with
// lambda ranging over the Euclidean ball of the given radius in R^N.
// Either closed-form component expressions over (x, lambda), or a 1-D
// shooting parametrization: the member for lambda solves the
// stationarity system from (base_t, y_base) with initial slope
// slope_base + lambda.
class ExtremalFamily {
 public:
  struct Shooting {
    double base_t = 0.0;
    std::vector<double> y_base, slope_base;
    double step = 1e-3;
  };

  static ExtremalFamily closed_form(const Dims& dims, std::vector<Expr> phi, double radius);
  static ExtremalFamily shooting_1d(const Dims& dims, Shooting shooting, double radius);

  const Dims& dims() const { return dims_; }
  double radius() const { return radius_; }
  bool is_closed_form() const { return !shooting_.has_value(); }
  const std::vector<Expr>& phi() const { return phi_; }
  const std::vector<Expr>& phi_x() const { return phi_x_; }  // N*n exprs, a = j*n + k
  const Shooting& shooting() const { return *shooting_; }

 private:
  ExtremalFamily() = default;
  Dims dims_;
  double radius_ = 0.0;
  std::vector<Expr> phi_, phi_x_;
  std::optional<Shooting> shooting_;
};

struct FieldConfig {
  double tol_inv = 1e-10;     // Newton convergence on ||phi(x,lambda) - y||_inf
  int max_iter = 50;
  double jac_step = 1e-6;     // lambda-Jacobian step, scaled by (1 + |lambda_j|)
  double fd_step_x = 1e-4;    // exactness stencils, scaled by (1 + |coordinate|)
  double fd_step_y = 1e-4;
  double theta_scale = 1.0;   // diagnostic: deliberately mis-scale the slope
};

enum class InvertStatus { Converged, NoConvergence, SingularJacobian, LambdaOutOfBall };

struct InvertResult {
  InvertStatus status = InvertStatus::NoConvergence;
  std::vector<double> lambda;
  double residual = 0.0;  // ||phi(x,lambda) - y||_inf at the returned lambda
  int iterations = 0;
};

// Everything the field knows at one covered point.
struct FieldPoint {
  std::vector<double> lambda;
  std::vector<double> theta;  // N*n slope entries, a = j*n + k
  std::vector<double> p;      // momenta f_z at (x, y, theta)
  double h = 0.0;             // f(x,y,theta) - sum p_jk theta_jk
};

// The slope field induced by a family: matches points (x, y) to members
// by Newton inversion of phi(x, .) = y and exposes the classical field
// quantities built from the member's gradient.
class SlopeField {
 public:
  SlopeField(ExtremalFamily family, LagrangianSpec lagrangian, FieldConfig config = {});

  const ExtremalFamily& family() const { return family_; }
  const LagrangianSpec& lagrangian() const { return lagrangian_; }
  const FieldConfig& config() const { return config_; }
  const Dims& dims() const { return lagrangian_.dims(); }

  std::vector<double> family_value(std::span<const double> x, std::span<const double> lambda) const;
  std::vector<double> family_gradient(std::span<const double> x, std::span<const double> lambda) const;

  InvertResult try_invert(std::span<const double> x, std::span<const double> y,
                          std::span<const double> guess = {}) const;
  // throws InvertError on failure; |lambda| < radius is part of success
  std::vector<double> invert(std::span<const double> x, std::span<const double> y,
                             std::span<const double> guess = {}) const;

  FieldPoint point(std::span<const double> x, std::span<const double> y, std::span<const double> guess = {}) const;
  std::vector<double> slope(std::span<const double> x, std::span<const double> y,
                            std::span<const double> guess = {}) const;
  double h_value(std::span<const double> x, std::span<const double> y, std::span<const double> guess = {}) const;
  std::vector<double> p_value(std::span<const double> x, std::span<const double> y,
                              std::span<const double> guess = {}) const;

  // R_j = d h / d y_j - sum_k d P_jk / d x_k by centered differences;
  // throws StencilError if a stencil point cannot be matched to a member.
  std::vector<double> exactness_residual(std::span<const double> x, std::span<const double> y,
                                         std::span<const double> guess = {}) const;

 private:
  ExtremalFamily family_;
  LagrangianSpec lagrangian_;
  FieldConfig config_;
};

// Largest delta in the descending candidate list such that every lattice
// point y0(x) + s*delta (s in {-1,-1/2,0,1/2,1} per component, capped at
// samples_per_node tuples by deterministic striding) inverts at every
// grid node.  Returns 0 with diagnostics if none passes.  Throws
// UncoveredError if the candidate itself fails somewhere.
struct TubeResult {
  double delta_star = 0.0;
  struct Failure {
    double delta = 0.0;
    std::size_t node = 0;
    std::vector<double> y;
    InvertStatus status = InvertStatus::NoConvergence;
  };
  std::vector<Failure> failures;  // one entry per rejected delta
};

TubeResult tube_coverage(const SlopeField& field, const GridFunction& y0, std::span<const double> deltas,
                         int samples_per_node = 125);

// Spot check that family members are themselves stationary: samples
// members over a lambda lattice and takes the worst interior residual
// on the given grid.
struct MemberCheck {
  double max_interior_residual = 0.0;
  std::vector<double> worst_lambda;
};

MemberCheck member_stationarity_check(const SlopeField& field, const Grid& grid, int points_per_axis = 3,
                                      double ball_fraction = 0.5);

}  // namespace varcert
