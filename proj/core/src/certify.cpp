#include "varcert/certify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>

namespace varcert {

namespace {

struct StageClock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double stop() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

// uniform double in [0,1) from the top 53 bits (same scheme as the
// bubble draws, different stream)
double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// stationarity gate: the residual carries an O(h^2) discretization
// floor, so the configured tolerance only takes over once the grid can
// actually resolve it
double stationarity_threshold(const Grid& grid, double tol_el) {
  double h = grid.max_spacing();
  return std::max(10.0 * h * h, tol_el);
}

ExactnessStats exactness_sweep(const SlopeField& field, const GridFunction& y0, double delta_star) {
  const Grid& grid = y0.grid();
  const Dims& dims = field.dims();
  constexpr std::size_t kNodeCap = 1024;   // stencil centers per sweep
  constexpr std::size_t kTupleCap = 27;    // y-offset tuples per node
  std::size_t stride = std::max<std::size_t>(1, grid.num_nodes() / kNodeCap);

  // offsets stay at half the certified radius so the finite-difference
  // stencils around each center remain comfortably inside the tube
  std::vector<double> offs{0.0};
  if (delta_star > 0.0) offs = {-0.5 * delta_star, 0.0, 0.5 * delta_star};
  std::size_t tuples = 1;
  for (int j = 0; j < dims.N; ++j) tuples *= offs.size();
  std::size_t take = std::min(tuples, kTupleCap);

  ExactnessStats out;
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  std::vector<double> yv(static_cast<std::size_t>(dims.N));
  std::vector<double> guess;
  for (std::size_t node = 0; node < grid.num_nodes(); node += stride) {
    grid.node_coords(node, x);
    for (std::size_t i = 0; i < take; ++i) {
      std::size_t t = i * tuples / take;
      for (int j = dims.N; j-- > 0;) {
        yv[static_cast<std::size_t>(j)] = y0.value(j, node) + offs[t % offs.size()];
        t /= offs.size();
      }
      InvertResult center = field.try_invert(x, yv, guess);
      if (center.status != InvertStatus::Converged) {
        ++out.num_skipped;
        continue;
      }
      guess = center.lambda;
      try {
        std::vector<double> r = field.exactness_residual(x, yv, center.lambda);
        ++out.num_points;
        for (double v : r) out.max_abs_residual = std::max(out.max_abs_residual, std::fabs(v));
      } catch (const StencilError&) {
        ++out.num_skipped;
      }
    }
  }
  return out;
}

ConvexityStats convexity_sweep(const SlopeField& field, const ProblemSpec& problem, const GridFunction& y0,
                               bool covered) {
  const Grid& grid = y0.grid();
  const Dims& dims = field.dims();
  int slots = dims.N * dims.n;
  GradientField dy0 = discrete_gradient(y0);

  constexpr std::size_t kNodeCap = 512;
  constexpr int kRandomDraws = 1000;
  std::size_t stride = std::max<std::size_t>(1, grid.num_nodes() / kNodeCap);
  std::vector<std::size_t> node_list;
  for (std::size_t node = 0; node < grid.num_nodes(); node += stride) node_list.push_back(node);

  std::vector<ConvexitySample> samples;
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  std::vector<double> yv(static_cast<std::size_t>(dims.N));
  std::vector<double> guess;
  double z_mag = 0.0;  // largest |z| seen; sets the random draw box
  for (std::size_t node : node_list) {
    grid.node_coords(node, x);
    for (int j = 0; j < dims.N; ++j) yv[static_cast<std::size_t>(j)] = y0.value(j, node);

    std::span<const double> z0 = dy0.at(node);
    for (double v : z0) z_mag = std::max(z_mag, std::fabs(v));
    samples.push_back({x, yv, {z0.begin(), z0.end()}});

    if (!covered) continue;
    InvertResult inv = field.try_invert(x, yv, guess);
    if (inv.status != InvertStatus::Converged) continue;
    guess = inv.lambda;
    std::vector<double> theta = field.family_gradient(x, inv.lambda);
    for (double v : theta) z_mag = std::max(z_mag, std::fabs(v));
    // 5-point stencil around the field value, one z slot at a time
    for (int a = 0; a < slots; ++a) {
      double scale = 1.0 + std::fabs(theta[static_cast<std::size_t>(a)]);
      for (double c : {-1.0, -0.5, 0.5, 1.0}) {
        std::vector<double> z = theta;
        z[static_cast<std::size_t>(a)] += c * scale;
        samples.push_back({x, yv, std::move(z)});
      }
    }
    samples.push_back({x, yv, std::move(theta)});
  }

  // seeded z draws, decoupled from the bubble stream
  std::mt19937_64 rng(problem.sampling.seed ^ 0x517cc1b727220a95ULL);
  double box = 2.0 * (1.0 + z_mag);
  for (int i = 0; i < kRandomDraws; ++i) {
    std::size_t node = node_list[static_cast<std::size_t>(i) % node_list.size()];
    grid.node_coords(node, x);
    for (int j = 0; j < dims.N; ++j) yv[static_cast<std::size_t>(j)] = y0.value(j, node);
    std::vector<double> z(static_cast<std::size_t>(slots));
    for (double& v : z) v = box * (2.0 * next_unit(rng) - 1.0);
    samples.push_back({x, yv, std::move(z)});
  }

  ConvexityResult res = convexity_check(field.lagrangian(), samples, problem.tolerances.tol_excess);
  ConvexityStats out;
  out.min_eigenvalue = res.min_eigenvalue;
  out.is_psd = res.is_psd;
  out.witness = res.witness;
  out.num_samples = samples.size();
  return out;
}

}  // namespace

ProblemSpec::ProblemSpec(LagrangianSpec lag, BoxDomain dom, std::vector<Expr> candidate, ExtremalFamily fam)
    : lagrangian(std::move(lag)), domain(std::move(dom)), y0(std::move(candidate)), family(std::move(fam)) {
  resolution.assign(static_cast<std::size_t>(lagrangian.dims().n), 65);
}

void ProblemSpec::validate() const {
  const Dims& dims = lagrangian.dims();
  if (domain.dim() != dims.n) throw ValidationError("domain dimension does not match n");
  if (family.dims().n != dims.n || family.dims().N != dims.N)
    throw ValidationError("family dimensions do not match the integrand");
  if (static_cast<int>(y0.size()) != dims.N) throw ValidationError("y0 needs one component per y component");
  for (std::size_t j = 0; j < y0.size(); ++j)
    validate_vars(y0[j], dims, VarClassSet::spatial(), "y0[" + std::to_string(j + 1) + "]");
  if (static_cast<int>(resolution.size()) != dims.n) throw ValidationError("resolution needs one entry per axis");
  for (int m : resolution)
    if (m < 5) throw ValidationError("resolution: every axis needs at least 5 nodes");
  if (!(tolerances.tol_el > 0.0 && tolerances.tol_inv > 0.0 && tolerances.tol_exact > 0.0 &&
        tolerances.tol_invariance > 0.0 && tolerances.tol_excess > 0.0))
    throw ValidationError("tolerances must all be positive");
  if (sampling.num_samples < 1) throw ValidationError("num_samples must be at least 1");
  if (sampling.mode_cap < 1) throw ValidationError("mode_cap must be at least 1");
  if (deltas.empty()) throw ValidationError("deltas: at least one candidate radius is required");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) throw ValidationError("deltas must be positive");
    if (i > 0 && !(deltas[i - 1] > deltas[i])) throw ValidationError("deltas must be strictly descending");
  }
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::CertifiedLocalMin: return "CERTIFIED_LOCAL_MIN";
    case Verdict::NotCertified: return "NOT_CERTIFIED";
    case Verdict::InvalidInput: return "INVALID_INPUT";
  }
  return "?";
}

const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::None: return "none";
    case FailureReason::ElResidual: return "EL_RESIDUAL";
    case FailureReason::Uncovered: return "UNCOVERED";
    case FailureReason::TubeTooSmall: return "TUBE_TOO_SMALL";
    case FailureReason::ExactnessFail: return "EXACTNESS_FAIL";
    case FailureReason::NotConvex: return "NOT_CONVEX";
    case FailureReason::InvarianceFail: return "INVARIANCE_FAIL";
    case FailureReason::ExcessNegative: return "EXCESS_NEGATIVE";
  }
  return "?";
}

CertificationReport certify(const ProblemSpec& problem, const CertifyOptions& options) {
  CertificationReport report;
  report.continue_on_failure = options.continue_on_failure;
  report.n = problem.lagrangian.dims().n;
  report.N = problem.lagrangian.dims().N;
  report.resolution = problem.resolution;
  report.tolerances = problem.tolerances;
  report.sampling = problem.sampling;
  report.deltas = problem.deltas;

  try {
    problem.validate();
  } catch (const ValidationError& e) {
    report.verdict = Verdict::InvalidInput;
    report.message = e.what();
    return report;
  }

  unsigned stages = options.stages & kStageAll;
  // everything past the tube needs delta_star; the gap identity needs
  // the per-sample excess integrals
  if (stages & (kStageExactness | kStageInvariance | kStageExcess | kStageGap | kStageComparison))
    stages |= kStageTube;
  if (stages & kStageGap) stages |= kStageExcess;
  report.partial_run = stages != kStageAll;

  bool stop = false;
  auto fail = [&](const char* stage, FailureReason reason) {
    report.failed_stages.push_back(stage);
    if (report.failure_reason == FailureReason::None) report.failure_reason = reason;
    if (!options.continue_on_failure) stop = true;
  };

  try {
    const Dims& dims = problem.lagrangian.dims();
    Grid omega_grid(problem.domain.omega(), problem.resolution);
    Grid b0_grid(problem.domain.b0(), problem.resolution);
    FieldConfig field_config;
    field_config.tol_inv = problem.tolerances.tol_inv;
    SlopeField field(problem.family, problem.lagrangian, field_config);
    GridFunction y0_omega = sample(omega_grid, problem.y0);
    GridFunction y0_b0 = sample(b0_grid, problem.y0);

    // (1) the candidate must be stationary across all of B0, not just
    // the working domain
    if (!stop && (stages & kStageStationarity)) {
      StageClock clock;
      ELResidual res = el_residual(problem.lagrangian, y0_b0);
      StationarityStats st;
      st.max_abs = res.max_abs;
      st.interior_max_abs = res.interior_max_abs;
      st.threshold = stationarity_threshold(b0_grid, problem.tolerances.tol_el);
      report.stationarity = st;
      report.timings.push_back({"stationarity", clock.stop()});
      if (!(st.interior_max_abs <= st.threshold)) fail("stationarity", FailureReason::ElResidual);
    }

    // (2) how far around the candidate the field stays invertible
    bool covered = false;
    if (!stop && (stages & kStageTube)) {
      StageClock clock;
      try {
        TubeResult tube = tube_coverage(field, y0_omega, problem.deltas);
        covered = true;
        report.delta_star = tube.delta_star;
      } catch (const UncoveredError&) {
        covered = false;
        report.delta_star = 0.0;
      }
      report.timings.push_back({"tube", clock.stop()});
      if (!covered)
        fail("tube", FailureReason::Uncovered);
      else if (!(report.delta_star > 0.0))
        fail("tube", FailureReason::TubeTooSmall);
    }

    // (3) spot check that family members really are stationary on B0
    if (!stop && (stages & kStageMembers)) {
      StageClock clock;
      MemberCheck mc = member_stationarity_check(field, b0_grid);
      MemberStats ms;
      ms.max_interior_residual = mc.max_interior_residual;
      ms.worst_lambda = mc.worst_lambda;
      ms.threshold = stationarity_threshold(b0_grid, problem.tolerances.tol_el);
      report.members = ms;
      report.timings.push_back({"members", clock.stop()});
      if (!(ms.max_interior_residual <= ms.threshold)) fail("members", FailureReason::ElResidual);
    }

    // (4) exactness of the field over the certified tube
    if (!stop && (stages & kStageExactness) && covered) {
      StageClock clock;
      ExactnessStats ex = exactness_sweep(field, y0_omega, report.delta_star);
      report.exactness = ex;
      report.timings.push_back({"exactness", clock.stop()});
      if (!(ex.max_abs_residual <= problem.tolerances.tol_exact)) fail("exactness", FailureReason::ExactnessFail);
    }

    // (5) convexity of f in z over field values, candidate gradients,
    // stencils around them, and seeded random draws
    if (!stop && (stages & kStageConvexity)) {
      StageClock clock;
      ConvexityStats cs = convexity_sweep(field, problem, y0_omega, covered);
      report.convexity = cs;
      report.timings.push_back({"convexity", clock.stop()});
      if (!cs.is_psd) fail("convexity", FailureReason::NotConvex);
    }

    // stages 6-9 share one set of drawn perturbations at delta_star
    std::vector<GridFunction> bubbles;
    bool bubbles_ready = false;
    auto ensure_bubbles = [&]() {
      if (bubbles_ready) return;
      BubbleConfig bc;
      bc.num_samples = problem.sampling.num_samples;
      bc.mode_cap = problem.sampling.mode_cap;
      bc.seed = problem.sampling.seed;
      bc.delta = report.delta_star;
      bubbles = draw_bubbles(omega_grid, dims.N, bc);
      bubbles_ready = true;
    };

    // (6) the integral must not move under boundary-preserving bubbles
    if (!stop && (stages & kStageInvariance) && covered && report.delta_star > 0.0) {
      StageClock clock;
      ensure_bubbles();
      try {
        report.invariance = invariance_over(field, y0_omega, bubbles, problem.sampling.seed);
      } catch (const UncoveredError&) {
        covered = false;  // blocks the remaining sampled stages too
        fail("invariance", FailureReason::Uncovered);
      }
      report.timings.push_back({"invariance", clock.stop()});
      if (report.invariance && !(report.invariance->max_rel_dev <= problem.tolerances.tol_invariance))
        fail("invariance", FailureReason::InvarianceFail);
    }

    // (7) excess along every sampled competitor; the report keeps the
    // worst summary
    std::vector<ExcessSummary> excess_per_sample;
    if (!stop && (stages & kStageExcess) && covered && report.delta_star > 0.0) {
      StageClock clock;
      ensure_bubbles();
      try {
        for (const GridFunction& eta : bubbles) {
          ExcessSummary s = excess_field(field, y0_omega + eta, problem.tolerances.tol_excess);
          if (excess_per_sample.empty() || s.min_value < report.excess->min_value) report.excess = s;
          excess_per_sample.push_back(s);
        }
      } catch (const UncoveredError&) {
        covered = false;
        fail("excess", FailureReason::Uncovered);
      }
      report.timings.push_back({"excess", clock.stop()});
      if (report.excess && report.excess->min_value < -problem.tolerances.tol_excess)
        fail("excess", FailureReason::ExcessNegative);
    }

    // (8) F(y) - F(y0) = integral of E + (I(y) - I(y0)) under the shared
    // quadrature; informational, never gates
    std::vector<double> f_samples;
    double f_y0 = 0.0;
    bool f_y0_ready = false;
    if (!stop && (stages & kStageGap) && covered && report.delta_star > 0.0 &&
        excess_per_sample.size() == bubbles.size() && !bubbles.empty()) {
      StageClock clock;
      f_y0 = functional(problem.lagrangian, y0_omega);
      f_y0_ready = true;
      double i_y0 = report.invariance ? report.invariance->i_y0 : hilbert_integral(field, y0_omega);
      double worst = 0.0;
      for (std::size_t s = 0; s < bubbles.size(); ++s) {
        GridFunction ys = y0_omega + bubbles[s];
        double fs = functional(problem.lagrangian, ys);
        f_samples.push_back(fs);
        double is = hilbert_integral(field, ys);
        worst = std::max(worst, std::fabs((fs - f_y0) - (excess_per_sample[s].integral + (is - i_y0))));
      }
      report.gap_identity_error = worst;
      report.timings.push_back({"gap", clock.stop()});
    }

    // (9) the blunt check the certificate implies: F(y_s) >= F(y0);
    // informational, never gates
    if (!stop && (stages & kStageComparison) && covered && report.delta_star > 0.0) {
      StageClock clock;
      ensure_bubbles();
      if (!f_y0_ready) f_y0 = functional(problem.lagrangian, y0_omega);
      ComparisonStats cmp;
      cmp.f_y0 = f_y0;
      cmp.num_samples = static_cast<int>(bubbles.size());
      for (std::size_t s = 0; s < bubbles.size(); ++s) {
        double fs = s < f_samples.size() ? f_samples[s] : functional(problem.lagrangian, y0_omega + bubbles[s]);
        double gap = fs - f_y0;
        if (s == 0 || gap < cmp.min_gap) cmp.min_gap = gap;
      }
      report.comparison = cmp;
      report.timings.push_back({"comparison", clock.stop()});
    }
  } catch (const EvalError& e) {
    report.verdict = Verdict::InvalidInput;
    report.message = std::string("evaluation failed: ") + e.what();
    return report;
  }

  if (report.failure_reason != FailureReason::None)
    report.verdict = Verdict::NotCertified;
  else if (!report.partial_run && report.delta_star > 0.0)
    report.verdict = Verdict::CertifiedLocalMin;
  else
    report.verdict = Verdict::NotCertified;
  return report;
}

}  // namespace varcert
