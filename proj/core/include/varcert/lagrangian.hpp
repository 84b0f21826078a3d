#pragma once

#include <optional>
#include <span>
#include <vector>

#include "varcert/expr.hpp"

namespace varcert {

// An integrand f(x, y, z) together with its exact first and second
// partials in z and first partials in y, computed symbolically once.
// Index convention: the flattened z slot for component j, axis k
// (0-based) is a = j*n + k.
class LagrangianSpec {
 public:
  static LagrangianSpec build(const Dims& dims, Expr f);

  const Dims& dims() const { return dims_; }
  const Expr& f() const { return f_; }
  const Expr& fy(int j) const { return fy_[static_cast<std::size_t>(j)]; }
  const Expr& fz(int j, int k) const { return fz_[static_cast<std::size_t>(j * dims_.n + k)]; }
  const Expr& fz_flat(int a) const { return fz_[static_cast<std::size_t>(a)]; }
  const Expr& fzz(int a, int b) const { return fzz_[static_cast<std::size_t>(a * dims_.n * dims_.N + b)]; }

  EvalEnv env(std::span<const double> x, std::span<const double> y, std::span<const double> z) const {
    EvalEnv e;
    e.x = x;
    e.y = y;
    e.z = z;
    e.n = dims_.n;
    return e;
  }

  double f_at(std::span<const double> x, std::span<const double> y, std::span<const double> z) const {
    return f_.eval(env(x, y, z));
  }

 private:
  LagrangianSpec() = default;
  Dims dims_;
  Expr f_;
  std::vector<Expr> fy_;   // N entries
  std::vector<Expr> fz_;   // N*n entries, a = j*n + k
  std::vector<Expr> fzz_;  // (N*n)^2 entries, row-major
};

struct ConvexitySample {
  std::vector<double> x, y, z;
};

struct ConvexityResult {
  double min_eigenvalue = 0.0;
  bool is_psd = false;
  std::optional<ConvexitySample> witness;  // first sample with an eigenvalue below -tol
};

// Smallest eigenvalue of the z-Hessian over the given sample points;
// is_psd holds when min_eigenvalue >= -tol.
ConvexityResult convexity_check(const LagrangianSpec& lagrangian, std::span<const ConvexitySample> samples,
                                double tol);

}  // namespace varcert
