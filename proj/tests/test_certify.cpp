#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "varcert/certify.hpp"
#include "varcert/report_io.hpp"

using namespace varcert;

namespace {

LagrangianSpec make_lag(const std::string& f, int n = 1, int N = 1) {
  Dims d{n, N};
  return LagrangianSpec::build(d, parse_expr(f, d, VarClassSet::lagrangian()));
}

ProblemSpec dirichlet_problem(int m) {
  Dims d{2, 1};
  BoxDomain dom({{0.0, 1.0}, {0.0, 1.0}}, {{0.1, 0.9}, {0.1, 0.9}});
  std::vector<Expr> y0 = {parse_expr("0", d, VarClassSet::spatial())};
  std::vector<Expr> phi = {parse_expr("l1", d, VarClassSet::family())};
  ProblemSpec spec(make_lag("0.5*(z1^2 + z2^2)", 2, 1), dom, y0,
                   ExtremalFamily::closed_form(d, phi, 10.0));
  spec.resolution = {m, m};
  return spec;
}

ProblemSpec catenary_problem(int m, double radius = 10.0) {
  Dims d{1, 1};
  BoxDomain dom({{0.0, 1.2}}, {{0.2, 1.0}});
  std::vector<Expr> y0 = {parse_expr("0", d, VarClassSet::spatial())};
  std::vector<Expr> phi = {parse_expr("l1*cosh(x1)", d, VarClassSet::family())};
  ProblemSpec spec(make_lag("0.5*(z1^2 + y1^2)"), dom, y0, ExtremalFamily::closed_form(d, phi, radius));
  spec.resolution = {m};
  return spec;
}

ProblemSpec double_well_problem() {
  Dims d{1, 1};
  BoxDomain dom({{-0.2, 1.2}}, {{0.0, 1.0}});
  std::vector<Expr> y0 = {parse_expr("0", d, VarClassSet::spatial())};
  std::vector<Expr> phi = {parse_expr("l1", d, VarClassSet::family())};
  ProblemSpec spec(make_lag("(1 - z1^2)^2"), dom, y0, ExtremalFamily::closed_form(d, phi, 10.0));
  spec.resolution = {65};
  return spec;
}

bool has_stage(const CertificationReport& r, const std::string& name) {
  return std::find(r.failed_stages.begin(), r.failed_stages.end(), name) != r.failed_stages.end();
}

}  // namespace

TEST_SUITE("certify") {
  TEST_CASE("the planar Dirichlet candidate is certified with exact stage data") {
    CertificationReport r = certify(dirichlet_problem(17));
    CHECK(r.verdict == Verdict::CertifiedLocalMin);
    CHECK(r.failure_reason == FailureReason::None);
    CHECK(r.failed_stages.empty());
    CHECK_FALSE(r.partial_run);
    CHECK(r.delta_star == 1.0);
    REQUIRE(r.stationarity.has_value());
    CHECK(r.stationarity->max_abs <= 1e-12);
    REQUIRE(r.exactness.has_value());
    CHECK(r.exactness->max_abs_residual == 0.0);
    REQUIRE(r.invariance.has_value());
    CHECK(r.invariance->max_rel_dev <= 1e-13);
    REQUIRE(r.excess.has_value());
    CHECK(r.excess->min_value >= 0.0);
    REQUIRE(r.comparison.has_value());
    CHECK(r.comparison->min_gap >= 0.0);
    REQUIRE(r.gap_identity_error.has_value());
    CHECK(*r.gap_identity_error <= 1e-12);
    CHECK_FALSE(r.timings.empty());
    CHECK(r.n == 2);
    CHECK(r.resolution == std::vector<int>{17, 17});
  }

  TEST_CASE("the catenary verdict turns on the grid resolution") {
    // the invariance deviation sits a factor ~2.4 above the gate at 65
    // nodes and a factor ~1.6 under it at 129, so the verdict flips
    CertificationReport coarse = certify(catenary_problem(65));
    CHECK(coarse.verdict == Verdict::NotCertified);
    CHECK(coarse.failure_reason == FailureReason::InvarianceFail);
    CHECK(has_stage(coarse, "invariance"));
    REQUIRE(coarse.invariance.has_value());
    CHECK(coarse.invariance->max_rel_dev > 1e-3);

    CertificationReport fine = certify(catenary_problem(129));
    CHECK(fine.verdict == Verdict::CertifiedLocalMin);
    CHECK(fine.delta_star == 1.0);
    REQUIRE(fine.invariance.has_value());
    CHECK(fine.invariance->max_rel_dev <= 1e-3);
    REQUIRE(fine.members.has_value());
    CHECK(fine.members->max_interior_residual <= fine.members->threshold);
  }

  TEST_CASE("the double well fails convexity and, pushed on, shows negative excess") {
    CertificationReport stop = certify(double_well_problem());
    CHECK(stop.verdict == Verdict::NotCertified);
    CHECK(stop.failure_reason == FailureReason::NotConvex);
    CHECK(has_stage(stop, "convexity"));
    CHECK_FALSE(stop.excess.has_value());  // pipeline stopped early

    CertifyOptions push;
    push.continue_on_failure = true;
    CertificationReport full = certify(double_well_problem(), push);
    CHECK(full.verdict == Verdict::NotCertified);
    CHECK(full.failure_reason == FailureReason::NotConvex);  // first failure wins
    CHECK(has_stage(full, "convexity"));
    CHECK(has_stage(full, "excess"));
    REQUIRE(full.convexity.has_value());
    CHECK(full.convexity->min_eigenvalue == doctest::Approx(-4.0).epsilon(1e-9));
    REQUIRE(full.convexity->witness.has_value());
    CHECK(full.convexity->witness->z[0] == 0.0);
    REQUIRE(full.excess.has_value());
    CHECK(full.excess->min_value < -full.tolerances.tol_excess);
    CHECK(full.excess->num_negative_nodes > 0);
  }

  TEST_CASE("loosening tolerances never revokes a certificate") {
    ProblemSpec strict = catenary_problem(65);
    CertificationReport before = certify(strict);
    CHECK(before.verdict == Verdict::NotCertified);

    ProblemSpec loose = catenary_problem(65);
    loose.tolerances.tol_el *= 10.0;
    loose.tolerances.tol_exact *= 10.0;
    loose.tolerances.tol_invariance *= 10.0;
    loose.tolerances.tol_excess *= 10.0;
    CertificationReport after = certify(loose);
    CHECK(after.verdict == Verdict::CertifiedLocalMin);

    // and certified problems stay certified when loosened further
    ProblemSpec fine = catenary_problem(129);
    CHECK(certify(fine).verdict == Verdict::CertifiedLocalMin);
    fine.tolerances.tol_invariance *= 10.0;
    CHECK(certify(fine).verdict == Verdict::CertifiedLocalMin);
  }

  TEST_CASE("certificates come with a sound direct comparison") {
    for (CertificationReport r : {certify(dirichlet_problem(17)), certify(catenary_problem(129))}) {
      REQUIRE(r.verdict == Verdict::CertifiedLocalMin);
      REQUIRE(r.comparison.has_value());
      CHECK(r.comparison->min_gap >= -r.tolerances.tol_invariance * (1.0 + std::abs(r.comparison->f_y0)));
    }
  }

  TEST_CASE("two runs of the same problem serialize identically") {
    ProblemSpec spec = catenary_problem(65);
    CertificationReport a = certify(spec);
    CertificationReport b = certify(spec);
    CHECK(to_json(a) == to_json(b));
  }

  TEST_CASE("inconsistent problems are rejected as invalid input") {
    ProblemSpec bad = dirichlet_problem(17);
    bad.resolution = {17};  // wrong axis count
    CertificationReport r = certify(bad);
    CHECK(r.verdict == Verdict::InvalidInput);
    CHECK_FALSE(r.message.empty());
    CHECK_FALSE(r.stationarity.has_value());

    ProblemSpec tiny = dirichlet_problem(17);
    tiny.resolution = {17, 4};  // below the minimum nodes per axis
    CHECK(certify(tiny).verdict == Verdict::InvalidInput);

    ProblemSpec empty = dirichlet_problem(17);
    empty.deltas.clear();
    CHECK(certify(empty).verdict == Verdict::InvalidInput);
  }

  TEST_CASE("partial runs report stage data but never certify") {
    CertifyOptions only_invariance;
    only_invariance.stages = kStageInvariance;
    CertificationReport r = certify(catenary_problem(129), only_invariance);
    CHECK(r.partial_run);
    CHECK(r.verdict == Verdict::NotCertified);  // a subset cannot certify
    CHECK(r.failed_stages.empty());             // but nothing failed either
    CHECK(r.failure_reason == FailureReason::None);
    CHECK(r.invariance.has_value());
    CHECK(r.delta_star > 0.0);                  // tube ran as a dependency
    CHECK_FALSE(r.stationarity.has_value());
    CHECK_FALSE(r.convexity.has_value());
  }

  TEST_CASE("an uncovered candidate aborts the dependent stages") {
    Dims d{1, 1};
    BoxDomain dom({{0.0, 1.0}}, {{0.2, 0.8}});
    std::vector<Expr> y0 = {parse_expr("0", d, VarClassSet::spatial())};
    std::vector<Expr> phi = {parse_expr("l1 + 2", d, VarClassSet::family())};
    ProblemSpec spec(make_lag("0.5*z1^2"), dom, y0, ExtremalFamily::closed_form(d, phi, 0.5));
    spec.resolution = {17};

    CertifyOptions push;
    push.continue_on_failure = true;
    CertificationReport r = certify(spec, push);
    CHECK(r.verdict == Verdict::NotCertified);
    CHECK(r.failure_reason == FailureReason::Uncovered);
    CHECK(r.delta_star == 0.0);
    CHECK_FALSE(r.exactness.has_value());    // nothing to sweep
    CHECK_FALSE(r.invariance.has_value());   // no field values along curves
    CHECK(r.convexity.has_value());          // convexity needs no coverage
  }

  TEST_CASE("a ball smaller than every candidate width reports TUBE_TOO_SMALL") {
    ProblemSpec spec = catenary_problem(17, 0.1);
    spec.deltas = {1.0, 0.5};
    CertificationReport r = certify(spec);
    CHECK(r.verdict == Verdict::NotCertified);
    CHECK(r.failure_reason == FailureReason::TubeTooSmall);
    CHECK(r.delta_star == 0.0);
    CHECK(has_stage(r, "tube"));
  }

  TEST_CASE("verdict and reason strings are spelled like the reports") {
    CHECK(std::string(to_string(Verdict::CertifiedLocalMin)) == "CERTIFIED_LOCAL_MIN");
    CHECK(std::string(to_string(Verdict::NotCertified)) == "NOT_CERTIFIED");
    CHECK(std::string(to_string(Verdict::InvalidInput)) == "INVALID_INPUT");
    CHECK(std::string(to_string(FailureReason::NotConvex)) == "NOT_CONVEX");
    CHECK(std::string(to_string(FailureReason::ExcessNegative)) == "EXCESS_NEGATIVE");
    CHECK(std::string(to_string(FailureReason::TubeTooSmall)) == "TUBE_TOO_SMALL");
  }
}
