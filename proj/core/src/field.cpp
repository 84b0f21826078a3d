#include "varcert/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "varcert/linalg.hpp"

namespace varcert {

namespace {

double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double a : v) m = std::max(m, std::fabs(a));
  return m;
}

double norm_2(std::span<const double> v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return std::sqrt(s);
}

std::string point_text(std::span<const double> x, std::span<const double> y) {
  std::string s = "x = (";
  for (std::size_t k = 0; k < x.size(); ++k) s += (k ? ", " : "") + std::to_string(x[k]);
  s += "), y = (";
  for (std::size_t j = 0; j < y.size(); ++j) s += (j ? ", " : "") + std::to_string(y[j]);
  return s + ")";
}

}  // namespace

ExtremalFamily ExtremalFamily::closed_form(const Dims& dims, std::vector<Expr> phi, double radius) {
  if (static_cast<int>(phi.size()) != dims.N) throw ValidationError("family needs one component per y component");
  if (!(radius > 0.0)) throw ValidationError("family parameter radius must be positive");
  ExtremalFamily fam;
  fam.dims_ = dims;
  fam.radius_ = radius;
  for (std::size_t j = 0; j < phi.size(); ++j)
    validate_vars(phi[j], dims, VarClassSet::family(), "phi[" + std::to_string(j + 1) + "]");
  fam.phi_ = std::move(phi);
  for (int j = 0; j < dims.N; ++j)
    for (int k = 1; k <= dims.n; ++k) fam.phi_x_.push_back(fam.phi_[static_cast<std::size_t>(j)].diff(var_x(k)));
  return fam;
}

ExtremalFamily ExtremalFamily::shooting_1d(const Dims& dims, Shooting shooting, double radius) {
  if (dims.n != 1) throw ValidationError("shooting families require n = 1");
  if (!(radius > 0.0)) throw ValidationError("family parameter radius must be positive");
  if (static_cast<int>(shooting.y_base.size()) != dims.N || static_cast<int>(shooting.slope_base.size()) != dims.N)
    throw ValidationError("shooting base data must have N components");
  if (!(shooting.step > 0.0)) throw ValidationError("shooting step must be positive");
  ExtremalFamily fam;
  fam.dims_ = dims;
  fam.radius_ = radius;
  fam.shooting_ = std::move(shooting);
  return fam;
}

SlopeField::SlopeField(ExtremalFamily family, LagrangianSpec lagrangian, FieldConfig config)
    : family_(std::move(family)), lagrangian_(std::move(lagrangian)), config_(config) {
  if (family_.dims().n != lagrangian_.dims().n || family_.dims().N != lagrangian_.dims().N)
    throw ValidationError("family and integrand dimensions do not match");
}

std::vector<double> SlopeField::family_value(std::span<const double> x, std::span<const double> lambda) const {
  const Dims& dims = family_.dims();
  std::vector<double> out(static_cast<std::size_t>(dims.N));
  if (family_.is_closed_form()) {
    EvalEnv env;
    env.x = x;
    env.lambda = lambda;
    for (int j = 0; j < dims.N; ++j) out[static_cast<std::size_t>(j)] = family_.phi()[static_cast<std::size_t>(j)].eval(env);
    return out;
  }
  const ExtremalFamily::Shooting& sh = family_.shooting();
  std::vector<double> slope(sh.slope_base);
  for (int j = 0; j < dims.N; ++j) slope[static_cast<std::size_t>(j)] += lambda[static_cast<std::size_t>(j)];
  Trajectory traj = solve_el_ivp_1d(lagrangian_, sh.base_t, sh.y_base, slope, x[0], sh.step);
  for (int j = 0; j < dims.N; ++j) out[static_cast<std::size_t>(j)] = traj.value(j, x[0]);
  return out;
}

std::vector<double> SlopeField::family_gradient(std::span<const double> x, std::span<const double> lambda) const {
  const Dims& dims = family_.dims();
  std::vector<double> out(static_cast<std::size_t>(dims.N) * static_cast<std::size_t>(dims.n));
  if (family_.is_closed_form()) {
    EvalEnv env;
    env.x = x;
    env.lambda = lambda;
    for (std::size_t a = 0; a < out.size(); ++a) out[a] = family_.phi_x()[a].eval(env);
    return out;
  }
  const ExtremalFamily::Shooting& sh = family_.shooting();
  std::vector<double> slope(sh.slope_base);
  for (int j = 0; j < dims.N; ++j) slope[static_cast<std::size_t>(j)] += lambda[static_cast<std::size_t>(j)];
  Trajectory traj = solve_el_ivp_1d(lagrangian_, sh.base_t, sh.y_base, slope, x[0], sh.step);
  for (int j = 0; j < dims.N; ++j) out[static_cast<std::size_t>(j)] = traj.derivative(j, x[0]);
  return out;
}

InvertResult SlopeField::try_invert(std::span<const double> x, std::span<const double> y,
                                    std::span<const double> guess) const {
  const Dims& dims = family_.dims();
  std::size_t nn = static_cast<std::size_t>(dims.N);
  InvertResult res;
  res.lambda.assign(nn, 0.0);
  if (!guess.empty()) {
    if (guess.size() != nn) throw ValidationError("inversion guess must have N components");
    std::copy(guess.begin(), guess.end(), res.lambda.begin());
  }

  auto run = [&](std::vector<double> lambda) -> InvertResult {
    InvertResult r;
    r.lambda = std::move(lambda);
    std::vector<double> g(nn), jac(nn * nn), lp(nn), lm(nn);
    for (int it = 0; it <= config_.max_iter; ++it) {
      std::vector<double> val = family_value(x, r.lambda);
      for (std::size_t j = 0; j < nn; ++j) g[j] = val[j] - y[j];
      r.residual = norm_inf(g);
      r.iterations = it;
      if (!std::isfinite(r.residual)) {
        r.status = InvertStatus::NoConvergence;
        return r;
      }
      if (r.residual <= config_.tol_inv) {
        r.status = norm_2(r.lambda) < family_.radius() ? InvertStatus::Converged : InvertStatus::LambdaOutOfBall;
        return r;
      }
      if (it == config_.max_iter) break;
      // centered finite-difference Jacobian in lambda
      for (std::size_t c = 0; c < nn; ++c) {
        double hs = config_.jac_step * (1.0 + std::fabs(r.lambda[c]));
        lp = r.lambda;
        lm = r.lambda;
        lp[c] += hs;
        lm[c] -= hs;
        std::vector<double> vp = family_value(x, lp);
        std::vector<double> vm = family_value(x, lm);
        for (std::size_t rr = 0; rr < nn; ++rr) jac[rr * nn + c] = (vp[rr] - vm[rr]) / (2.0 * hs);
      }
      std::vector<double> step(g);
      std::vector<double> jac_copy(jac);
      if (!linalg::solve_in_place(jac_copy, step, dims.N)) {
        r.status = InvertStatus::SingularJacobian;
        return r;
      }
      for (std::size_t j = 0; j < nn; ++j) r.lambda[j] -= step[j];
      if (!std::isfinite(norm_inf(r.lambda))) {
        r.status = InvertStatus::NoConvergence;
        return r;
      }
    }
    r.status = InvertStatus::NoConvergence;
    return r;
  };

  InvertResult first = run(res.lambda);
  if (first.status == InvertStatus::NoConvergence && norm_inf(res.lambda) > 0.0) {
    // retry from the ball center before giving up
    InvertResult second = run(std::vector<double>(nn, 0.0));
    if (second.status == InvertStatus::Converged) return second;
  }
  return first;
}

std::vector<double> SlopeField::invert(std::span<const double> x, std::span<const double> y,
                                       std::span<const double> guess) const {
  InvertResult r = try_invert(x, y, guess);
  if (r.status != InvertStatus::Converged)
    throw InvertError(static_cast<InvertFailure>(static_cast<int>(r.status) - 1),
                      std::string("field inversion failed (") +
                          to_string(static_cast<InvertFailure>(static_cast<int>(r.status) - 1)) + ") at " +
                          point_text(x, y));
  return std::move(r.lambda);
}

FieldPoint SlopeField::point(std::span<const double> x, std::span<const double> y,
                             std::span<const double> guess) const {
  const Dims& dims = family_.dims();
  FieldPoint fp;
  fp.lambda = invert(x, y, guess);
  fp.theta = family_gradient(x, fp.lambda);
  if (config_.theta_scale != 1.0)
    for (double& t : fp.theta) t *= config_.theta_scale;
  EvalEnv env = lagrangian_.env(x, y, fp.theta);
  int nz = dims.N * dims.n;
  fp.p.resize(static_cast<std::size_t>(nz));
  double f = lagrangian_.f().eval(env);
  double dot = 0.0;
  for (int a = 0; a < nz; ++a) {
    fp.p[static_cast<std::size_t>(a)] = lagrangian_.fz_flat(a).eval(env);
    dot += fp.p[static_cast<std::size_t>(a)] * fp.theta[static_cast<std::size_t>(a)];
  }
  fp.h = f - dot;
  return fp;
}

std::vector<double> SlopeField::slope(std::span<const double> x, std::span<const double> y,
                                      std::span<const double> guess) const {
  std::vector<double> lambda = invert(x, y, guess);
  std::vector<double> theta = family_gradient(x, lambda);
  if (config_.theta_scale != 1.0)
    for (double& t : theta) t *= config_.theta_scale;
  return theta;
}

double SlopeField::h_value(std::span<const double> x, std::span<const double> y,
                           std::span<const double> guess) const {
  return point(x, y, guess).h;
}

std::vector<double> SlopeField::p_value(std::span<const double> x, std::span<const double> y,
                                        std::span<const double> guess) const {
  return point(x, y, guess).p;
}

std::vector<double> SlopeField::exactness_residual(std::span<const double> x, std::span<const double> y,
                                                   std::span<const double> guess) const {
  const Dims& dims = family_.dims();
  FieldPoint center;
  try {
    center = point(x, y, guess);
  } catch (const InvertError& e) {
    throw StencilError(std::string("stencil center not covered: ") + e.what());
  }

  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  std::vector<double> residual(static_cast<std::size_t>(dims.N));

  auto shifted_point = [&](std::span<const double> px, std::span<const double> py) -> FieldPoint {
    try {
      return point(px, py, center.lambda);
    } catch (const InvertError& e) {
      throw StencilError(std::string("stencil point left the covered tube: ") + e.what());
    }
  };

  // dh/dy_j
  for (int j = 0; j < dims.N; ++j) {
    double hs = config_.fd_step_y * (1.0 + std::fabs(y[static_cast<std::size_t>(j)]));
    ys[static_cast<std::size_t>(j)] = y[static_cast<std::size_t>(j)] + hs;
    FieldPoint plus = shifted_point(x, ys);
    ys[static_cast<std::size_t>(j)] = y[static_cast<std::size_t>(j)] - hs;
    FieldPoint minus = shifted_point(x, ys);
    ys[static_cast<std::size_t>(j)] = y[static_cast<std::size_t>(j)];
    residual[static_cast<std::size_t>(j)] = (plus.h - minus.h) / (2.0 * hs);
  }
  // - sum_k dP_jk/dx_k
  for (int k = 0; k < dims.n; ++k) {
    double hs = config_.fd_step_x * (1.0 + std::fabs(x[static_cast<std::size_t>(k)]));
    xs[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)] + hs;
    FieldPoint plus = shifted_point(xs, y);
    xs[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)] - hs;
    FieldPoint minus = shifted_point(xs, y);
    xs[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)];
    for (int j = 0; j < dims.N; ++j) {
      std::size_t a = static_cast<std::size_t>(j * dims.n + k);
      residual[static_cast<std::size_t>(j)] -= (plus.p[a] - minus.p[a]) / (2.0 * hs);
    }
  }
  return residual;
}

TubeResult tube_coverage(const SlopeField& field, const GridFunction& y0, std::span<const double> deltas,
                         int samples_per_node) {
  const Dims& dims = field.dims();
  const Grid& grid = y0.grid();
  if (y0.components() != dims.N) throw ValidationError("candidate component count does not match N");
  if (deltas.empty()) throw ValidationError("delta candidates must be nonempty");
  for (std::size_t i = 0; i + 1 < deltas.size(); ++i)
    if (!(deltas[i] > deltas[i + 1])) throw ValidationError("delta candidates must be strictly descending");
  for (double d : deltas)
    if (!(d > 0.0)) throw ValidationError("delta candidates must be positive");
  if (samples_per_node < 1) throw ValidationError("samples_per_node must be positive");

  std::size_t nodes = grid.num_nodes();
  std::size_t nn = static_cast<std::size_t>(dims.N);
  std::vector<double> x(static_cast<std::size_t>(dims.n));
  std::vector<double> y(nn);

  // the candidate itself first, with continuation along the sweep
  std::vector<std::vector<double>> lambda0(nodes);
  {
    std::vector<double> guess;
    for (std::size_t node = 0; node < nodes; ++node) {
      grid.node_coords(node, x);
      for (int j = 0; j < dims.N; ++j) y[static_cast<std::size_t>(j)] = y0.value(j, node);
      InvertResult r = field.try_invert(x, y, guess);
      if (r.status != InvertStatus::Converged)
        throw UncoveredError("candidate is not covered by the field at node " + std::to_string(node) + " (" +
                                 point_text(x, y) + ")",
                             node);
      lambda0[node] = r.lambda;
      guess = r.lambda;
    }
  }

  // deterministic, evenly strided subset of the 5^N offset lattice
  static constexpr double kOffsets[5] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  std::size_t total_tuples = 1;
  for (int j = 0; j < dims.N; ++j) total_tuples *= 5;
  std::size_t take = std::min<std::size_t>(total_tuples, static_cast<std::size_t>(samples_per_node));
  std::vector<std::vector<double>> offsets;
  offsets.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    std::size_t tuple = i * total_tuples / take;
    std::vector<double> s(nn);
    for (std::size_t j = nn; j-- > 0;) {
      s[j] = kOffsets[tuple % 5];
      tuple /= 5;
    }
    offsets.push_back(std::move(s));
  }

  TubeResult out;
  for (double delta : deltas) {
    bool covered = true;
    for (std::size_t node = 0; node < nodes && covered; ++node) {
      grid.node_coords(node, x);
      for (const std::vector<double>& s : offsets) {
        for (std::size_t j = 0; j < nn; ++j) y[j] = y0.value(static_cast<int>(j), node) + s[j] * delta;
        InvertResult r = field.try_invert(x, y, lambda0[node]);
        if (r.status != InvertStatus::Converged) {
          out.failures.push_back({delta, node, y, r.status});
          covered = false;
          break;
        }
      }
    }
    if (covered) {
      out.delta_star = delta;
      return out;
    }
  }
  out.delta_star = 0.0;
  return out;
}

MemberCheck member_stationarity_check(const SlopeField& field, const Grid& grid, int points_per_axis,
                                      double ball_fraction) {
  const Dims& dims = field.dims();
  if (points_per_axis < 1 || points_per_axis % 2 == 0)
    throw ValidationError("lambda lattice needs an odd positive point count");
  double scale = ball_fraction * field.family().radius() / std::sqrt(static_cast<double>(dims.N));

  std::size_t nn = static_cast<std::size_t>(dims.N);
  std::size_t total = 1;
  for (int j = 0; j < dims.N; ++j) total *= static_cast<std::size_t>(points_per_axis);

  MemberCheck out;
  out.worst_lambda.assign(nn, 0.0);
  std::vector<double> x(static_cast<std::size_t>(dims.n));
  for (std::size_t t = 0; t < total; ++t) {
    std::vector<double> lambda(nn);
    std::size_t rem = t;
    for (std::size_t j = nn; j-- > 0;) {
      int idx = static_cast<int>(rem % static_cast<std::size_t>(points_per_axis));
      rem /= static_cast<std::size_t>(points_per_axis);
      lambda[j] = scale * (static_cast<double>(idx) - static_cast<double>(points_per_axis - 1) / 2.0) /
                  std::max(1.0, static_cast<double>(points_per_axis - 1) / 2.0);
    }
    GridFunction member(grid, dims.N);
    for (std::size_t node = 0; node < grid.num_nodes(); ++node) {
      grid.node_coords(node, x);
      std::vector<double> val = field.family_value(x, lambda);
      for (int j = 0; j < dims.N; ++j) member.value(j, node) = val[static_cast<std::size_t>(j)];
    }
    ELResidual res = el_residual(field.lagrangian(), member);
    if (res.interior_max_abs >= out.max_interior_residual) {
      out.max_interior_residual = res.interior_max_abs;
      out.worst_lambda = lambda;
    }
  }
  return out;
}

}  // namespace varcert
