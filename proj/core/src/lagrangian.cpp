#include "varcert/lagrangian.hpp"

#include <limits>

#include "varcert/linalg.hpp"

namespace varcert {

LagrangianSpec LagrangianSpec::build(const Dims& dims, Expr f) {
  if (dims.n < 1 || dims.N < 1) throw ValidationError("dimensions must be at least 1");
  validate_vars(f, dims, VarClassSet::lagrangian(), "f");
  LagrangianSpec L;
  L.dims_ = dims;
  L.f_ = f;
  L.fy_.reserve(static_cast<std::size_t>(dims.N));
  for (int j = 1; j <= dims.N; ++j) L.fy_.push_back(f.diff(var_y(j)));
  int nz = dims.N * dims.n;
  L.fz_.reserve(static_cast<std::size_t>(nz));
  for (int j = 1; j <= dims.N; ++j)
    for (int k = 1; k <= dims.n; ++k) L.fz_.push_back(f.diff(var_z(j, k)));
  L.fzz_.reserve(static_cast<std::size_t>(nz) * static_cast<std::size_t>(nz));
  for (int a = 0; a < nz; ++a) {
    const Expr& fza = L.fz_[static_cast<std::size_t>(a)];
    for (int b = 0; b < nz; ++b) {
      int jb = b / dims.n + 1, kb = b % dims.n + 1;
      L.fzz_.push_back(fza.diff(var_z(jb, kb)));
    }
  }
  return L;
}

ConvexityResult convexity_check(const LagrangianSpec& lagrangian, std::span<const ConvexitySample> samples,
                                double tol) {
  const Dims& dims = lagrangian.dims();
  int nz = dims.N * dims.n;
  ConvexityResult result;
  result.min_eigenvalue = std::numeric_limits<double>::infinity();
  std::vector<double> hess(static_cast<std::size_t>(nz) * static_cast<std::size_t>(nz));
  for (const ConvexitySample& s : samples) {
    EvalEnv env = lagrangian.env(s.x, s.y, s.z);
    for (int a = 0; a < nz; ++a)
      for (int b = 0; b < nz; ++b)
        hess[static_cast<std::size_t>(a * nz + b)] = lagrangian.fzz(a, b).eval(env);
    double eig = linalg::min_eigenvalue_symmetric(hess, nz);
    if (eig < result.min_eigenvalue) result.min_eigenvalue = eig;
    if (eig < -tol && !result.witness) result.witness = s;
  }
  if (samples.empty()) result.min_eigenvalue = 0.0;
  result.is_psd = result.min_eigenvalue >= -tol;
  return result;
}

}  // namespace varcert
