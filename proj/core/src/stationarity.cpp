#include "varcert/stationarity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "varcert/linalg.hpp"

namespace varcert {

ELResidual el_residual(const LagrangianSpec& lagrangian, const GridFunction& y) {
  const Dims& dims = lagrangian.dims();
  const Grid& grid = y.grid();
  if (y.components() != dims.N) throw ValidationError("candidate component count does not match N");
  if (grid.dim() != dims.n) throw ValidationError("grid dimension does not match n");

  GradientField grad = discrete_gradient(y);
  std::size_t nodes = grid.num_nodes();

  // node values of f_y_j and of the composed momenta g_jk = f_z_jk(x, y, Dy)
  std::vector<std::vector<double>> fy_vals(static_cast<std::size_t>(dims.N), std::vector<double>(nodes));
  std::vector<std::vector<double>> momenta(static_cast<std::size_t>(dims.N) * static_cast<std::size_t>(dims.n),
                                           std::vector<double>(nodes));
  std::vector<double> xbuf(static_cast<std::size_t>(dims.n));
  std::vector<double> ybuf(static_cast<std::size_t>(dims.N));
  for (std::size_t node = 0; node < nodes; ++node) {
    grid.node_coords(node, xbuf);
    for (int j = 0; j < dims.N; ++j) ybuf[static_cast<std::size_t>(j)] = y.value(j, node);
    EvalEnv env = lagrangian.env(xbuf, ybuf, grad.at(node));
    for (int j = 0; j < dims.N; ++j) {
      fy_vals[static_cast<std::size_t>(j)][node] = lagrangian.fy(j).eval(env);
      for (int k = 0; k < dims.n; ++k)
        momenta[static_cast<std::size_t>(j * dims.n + k)][node] = lagrangian.fz(j, k).eval(env);
    }
  }

  ELResidual out{GridFunction(grid, dims.N), 0.0, 0.0};
  for (int j = 0; j < dims.N; ++j) {
    std::vector<double> r = fy_vals[static_cast<std::size_t>(j)];
    for (int k = 0; k < dims.n; ++k) {
      std::vector<double> dk = axis_derivative(momenta[static_cast<std::size_t>(j * dims.n + k)], grid, k);
      for (std::size_t node = 0; node < nodes; ++node) r[node] -= dk[node];
    }
    for (std::size_t node = 0; node < nodes; ++node) out.residual.value(j, node) = r[node];
  }
  for (std::size_t node = 0; node < nodes; ++node) {
    for (int j = 0; j < dims.N; ++j) {
      double a = std::fabs(out.residual.value(j, node));
      out.max_abs = std::max(out.max_abs, a);
      if (grid.is_deep_interior(node)) out.interior_max_abs = std::max(out.interior_max_abs, a);
    }
  }
  return out;
}

Trajectory::Trajectory(std::vector<double> times, std::vector<double> values, std::vector<double> derivs,
                       int components)
    : times_(std::move(times)), values_(std::move(values)), derivs_(std::move(derivs)), components_(components) {
  if (times_.empty()) throw NumericError("empty trajectory");
}

std::size_t Trajectory::segment(double t) const {
  // clamp slightly beyond the ends to absorb roundoff in callers
  double tol = 1e-9 * (1.0 + std::fabs(times_.back() - times_.front()));
  if (t < times_.front() - tol || t > times_.back() + tol)
    throw NumericError("trajectory queried outside its span at t = " + std::to_string(t));
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - times_.begin());
  if (hi == 0) return 0;
  if (hi >= times_.size()) return times_.size() - 2;
  return hi - 1;
}

double Trajectory::value(int comp, double t) const {
  if (times_.size() == 1) return values_[static_cast<std::size_t>(comp)];
  std::size_t s = segment(t);
  double t0 = times_[s], t1 = times_[s + 1];
  double h = t1 - t0;
  double u = (t - t0) / h;
  std::size_t c = static_cast<std::size_t>(comp);
  std::size_t w = static_cast<std::size_t>(components_);
  double y0 = values_[s * w + c], y1 = values_[(s + 1) * w + c];
  double d0 = derivs_[s * w + c], d1 = derivs_[(s + 1) * w + c];
  double u2 = u * u, u3 = u2 * u;
  return (2.0 * u3 - 3.0 * u2 + 1.0) * y0 + (u3 - 2.0 * u2 + u) * h * d0 + (-2.0 * u3 + 3.0 * u2) * y1 +
         (u3 - u2) * h * d1;
}

double Trajectory::derivative(int comp, double t) const {
  if (times_.size() == 1) return derivs_[static_cast<std::size_t>(comp)];
  std::size_t s = segment(t);
  double t0 = times_[s], t1 = times_[s + 1];
  double h = t1 - t0;
  double u = (t - t0) / h;
  std::size_t c = static_cast<std::size_t>(comp);
  std::size_t w = static_cast<std::size_t>(components_);
  double y0 = values_[s * w + c], y1 = values_[(s + 1) * w + c];
  double d0 = derivs_[s * w + c], d1 = derivs_[(s + 1) * w + c];
  double u2 = u * u;
  return ((6.0 * u2 - 6.0 * u) * y0 + (3.0 * u2 - 4.0 * u + 1.0) * h * d0 + (-6.0 * u2 + 6.0 * u) * y1 +
          (3.0 * u2 - 2.0 * u) * h * d1) /
         h;
}

namespace {

// right-hand side of the first-order system u = (y, y'):
// accelerations solve f_zz a = f_y - f_z,t - f_z,y y'
struct ElSystem {
  const LagrangianSpec& lagrangian;
  std::vector<Expr> fzt;               // d f_z_j / d t
  std::vector<std::vector<Expr>> fzy;  // d f_z_j / d y_l

  explicit ElSystem(const LagrangianSpec& L) : lagrangian(L) {
    int N = L.dims().N;
    for (int j = 0; j < N; ++j) {
      fzt.push_back(L.fz(j, 0).diff(var_x(1)));
      std::vector<Expr> row;
      for (int l = 1; l <= N; ++l) row.push_back(L.fz(j, 0).diff(var_y(l)));
      fzy.push_back(std::move(row));
    }
  }

  void accel(double t, std::span<const double> y, std::span<const double> yp, std::span<double> out) const {
    int N = lagrangian.dims().N;
    double x[1] = {t};
    EvalEnv env = lagrangian.env({x, 1}, y, yp);  // n = 1: the z slot carries y'
    std::vector<double> mass(static_cast<std::size_t>(N) * static_cast<std::size_t>(N));
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) mass[static_cast<std::size_t>(a * N + b)] = lagrangian.fzz(a, b).eval(env);
    if (linalg::cond_inf(mass, N) >= 1e12)
      throw NumericError("singular z-Hessian at t = " + std::to_string(t) + " (implicit function hypothesis fails)");
    for (int j = 0; j < N; ++j) {
      double rhs = lagrangian.fy(j).eval(env) - fzt[static_cast<std::size_t>(j)].eval(env);
      for (int l = 0; l < N; ++l)
        rhs -= fzy[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)].eval(env) * yp[static_cast<std::size_t>(l)];
      out[static_cast<std::size_t>(j)] = rhs;
    }
    if (!linalg::solve_in_place(mass, out.subspan(0, static_cast<std::size_t>(N)), N))
      throw NumericError("singular z-Hessian at t = " + std::to_string(t) + " (implicit function hypothesis fails)");
  }
};

struct RawTrajectory {
  std::vector<double> times, values, derivs;  // in integration order
};

RawTrajectory integrate(const ElSystem& sys, double base_t, std::span<const double> y_base,
                        std::span<const double> slope_base, double t_end, double step) {
  if (!(step > 0.0)) throw NumericError("integration step must be positive");
  double span = std::fabs(t_end - base_t);
  if (span > 0.0 && step < 1e-12 * span) throw NumericError("integration step underflow");

  std::size_t nn = y_base.size();
  RawTrajectory out;
  out.times.push_back(base_t);
  out.values.assign(y_base.begin(), y_base.end());
  out.derivs.assign(slope_base.begin(), slope_base.end());
  if (span == 0.0) return out;

  double dir = t_end >= base_t ? 1.0 : -1.0;
  std::size_t steps = static_cast<std::size_t>(std::ceil(span / step - 1e-12));
  if (steps > 100000000) throw NumericError("too many integration steps");

  std::vector<double> y(y_base.begin(), y_base.end());
  std::vector<double> yp(slope_base.begin(), slope_base.end());
  std::vector<double> k1p(nn), k2p(nn), k3p(nn), k4p(nn);
  std::vector<double> k1y(nn), k2y(nn), k3y(nn), k4y(nn);
  std::vector<double> ty(nn), tp(nn);
  double t = base_t;
  for (std::size_t s = 0; s < steps; ++s) {
    double target = (s + 1 == steps) ? t_end : base_t + dir * step * static_cast<double>(s + 1);
    double h = target - t;
    sys.accel(t, y, yp, k1p);
    for (std::size_t j = 0; j < nn; ++j) k1y[j] = yp[j];
    for (std::size_t j = 0; j < nn; ++j) {
      ty[j] = y[j] + 0.5 * h * k1y[j];
      tp[j] = yp[j] + 0.5 * h * k1p[j];
    }
    sys.accel(t + 0.5 * h, ty, tp, k2p);
    for (std::size_t j = 0; j < nn; ++j) k2y[j] = tp[j];
    for (std::size_t j = 0; j < nn; ++j) {
      ty[j] = y[j] + 0.5 * h * k2y[j];
      tp[j] = yp[j] + 0.5 * h * k2p[j];
    }
    sys.accel(t + 0.5 * h, ty, tp, k3p);
    for (std::size_t j = 0; j < nn; ++j) k3y[j] = tp[j];
    for (std::size_t j = 0; j < nn; ++j) {
      ty[j] = y[j] + h * k3y[j];
      tp[j] = yp[j] + h * k3p[j];
    }
    sys.accel(t + h, ty, tp, k4p);
    for (std::size_t j = 0; j < nn; ++j) k4y[j] = tp[j];
    for (std::size_t j = 0; j < nn; ++j) {
      y[j] += h / 6.0 * (k1y[j] + 2.0 * k2y[j] + 2.0 * k3y[j] + k4y[j]);
      yp[j] += h / 6.0 * (k1p[j] + 2.0 * k2p[j] + 2.0 * k3p[j] + k4p[j]);
      if (!std::isfinite(y[j]) || !std::isfinite(yp[j]))
        throw NumericError("trajectory blew up near t = " + std::to_string(target));
    }
    t = target;
    out.times.push_back(t);
    out.values.insert(out.values.end(), y.begin(), y.end());
    out.derivs.insert(out.derivs.end(), yp.begin(), yp.end());
  }
  return out;
}

RawTrajectory reversed(const RawTrajectory& in, std::size_t nn) {
  RawTrajectory out;
  std::size_t count = in.times.size();
  out.times.assign(in.times.rbegin(), in.times.rend());
  out.values.reserve(in.values.size());
  out.derivs.reserve(in.derivs.size());
  for (std::size_t s = count; s-- > 0;) {
    out.values.insert(out.values.end(), in.values.begin() + static_cast<std::ptrdiff_t>(s * nn),
                      in.values.begin() + static_cast<std::ptrdiff_t>((s + 1) * nn));
    out.derivs.insert(out.derivs.end(), in.derivs.begin() + static_cast<std::ptrdiff_t>(s * nn),
                      in.derivs.begin() + static_cast<std::ptrdiff_t>((s + 1) * nn));
  }
  return out;
}

void check_base_args(const LagrangianSpec& lagrangian, std::span<const double> y_base,
                     std::span<const double> slope_base) {
  const Dims& dims = lagrangian.dims();
  if (dims.n != 1) throw ValidationError("initial value integration requires n = 1");
  if (static_cast<int>(y_base.size()) != dims.N || static_cast<int>(slope_base.size()) != dims.N)
    throw ValidationError("base data must have N components");
}

}  // namespace

Trajectory solve_el_ivp_1d(const LagrangianSpec& lagrangian, double base_t, std::span<const double> y_base,
                           std::span<const double> slope_base, double t_end, double step) {
  check_base_args(lagrangian, y_base, slope_base);
  ElSystem sys(lagrangian);
  RawTrajectory raw = integrate(sys, base_t, y_base, slope_base, t_end, step);
  std::size_t nn = y_base.size();
  if (raw.times.size() > 1 && raw.times.front() > raw.times.back()) raw = reversed(raw, nn);
  return Trajectory(std::move(raw.times), std::move(raw.values), std::move(raw.derivs), lagrangian.dims().N);
}

Trajectory solve_el_ivp_span(const LagrangianSpec& lagrangian, double base_t, std::span<const double> y_base,
                             std::span<const double> slope_base, double t_lo, double t_hi, double step) {
  check_base_args(lagrangian, y_base, slope_base);
  if (!(t_lo <= base_t && base_t <= t_hi)) throw ValidationError("base point must lie inside the requested span");
  ElSystem sys(lagrangian);
  std::size_t nn = y_base.size();
  RawTrajectory back = reversed(integrate(sys, base_t, y_base, slope_base, t_lo, step), nn);
  RawTrajectory fwd = integrate(sys, base_t, y_base, slope_base, t_hi, step);
  // back ends with the base sample that fwd starts with; drop the duplicate
  RawTrajectory merged = std::move(back);
  if (fwd.times.size() > 1) {
    merged.times.insert(merged.times.end(), fwd.times.begin() + 1, fwd.times.end());
    merged.values.insert(merged.values.end(), fwd.values.begin() + static_cast<std::ptrdiff_t>(nn), fwd.values.end());
    merged.derivs.insert(merged.derivs.end(), fwd.derivs.begin() + static_cast<std::ptrdiff_t>(nn), fwd.derivs.end());
  }
  return Trajectory(std::move(merged.times), std::move(merged.values), std::move(merged.derivs), lagrangian.dims().N);
}

}  // namespace varcert
