#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "varcert/errors.hpp"
#include "varcert/excess.hpp"
#include "varcert/hilbert.hpp"

using namespace varcert;

namespace {

LagrangianSpec make_lag(const std::string& f, int n = 1, int N = 1) {
  Dims d{n, N};
  return LagrangianSpec::build(d, parse_expr(f, d, VarClassSet::lagrangian()));
}

ExtremalFamily make_family(const std::string& phi, double radius, int n = 1, int N = 1) {
  Dims d{n, N};
  std::vector<Expr> comps = {parse_expr(phi, d, VarClassSet::family())};
  return ExtremalFamily::closed_form(d, std::move(comps), radius);
}

SlopeField catenary_field(FieldConfig cfg = {}) {
  return SlopeField(make_family("l1*cosh(x1)", 10.0), make_lag("0.5*(z1^2 + y1^2)"), cfg);
}

template <typename F>
GridFunction fill(const Grid& grid, F&& fn) {
  GridFunction u(grid, 1);
  for (std::size_t i = 0; i < grid.num_nodes(); ++i) u.value(0, i) = fn(grid.coord(0, static_cast<int>(i)));
  return u;
}

}  // namespace

TEST_SUITE("excess") {
  TEST_CASE("the functional reproduces hand-computed integrals") {
    LagrangianSpec dirichlet = make_lag("0.5*(z1^2 + z2^2)", 2, 1);
    Grid g({{0.0, 1.0}, {0.0, 1.0}}, {9, 9});
    GridFunction tilt(g, 1);
    std::vector<double> xy(2);
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
      g.node_coords(i, xy);
      tilt.value(0, i) = xy[0];
    }
    CHECK(functional(dirichlet, tilt) == doctest::Approx(0.5).epsilon(1e-13));
    GridFunction zero(g, 1);
    CHECK(functional(dirichlet, zero) == 0.0);

    LagrangianSpec arc = make_lag("sqrt(1 + z1^2)");
    Grid line({{0.0, 1.0}}, {17});
    GridFunction diag = fill(line, [](double x) { return x; });
    CHECK(functional(arc, diag) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  }

  TEST_CASE("pointwise excess values for the quadratic and the double well") {
    LagrangianSpec quad = make_lag("0.5*z1^2");
    double x[] = {0.0}, y[] = {0.0};
    double theta[] = {1.0}, z[] = {3.0};
    // 0.5*9 - 0.5*1 - 1*(3 - 1) = 2
    CHECK(excess_point(quad, x, y, theta, z) == doctest::Approx(2.0).epsilon(1e-15));
    double same[] = {1.0};
    CHECK(excess_point(quad, x, y, theta, same) == 0.0);

    LagrangianSpec well = make_lag("(1 - z1^2)^2");
    double flat[] = {0.0}, up[] = {1.0};
    // f(1) - f(0) - f'(0)*1 = 0 - 1 - 0
    CHECK(excess_point(well, x, y, flat, up) == -1.0);
  }

  TEST_CASE("quadratic integrands have the Bregman half-square excess") {
    LagrangianSpec L = make_lag("0.5*(z11^2 + z12^2 + z21^2 + z22^2)", 2, 2);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> pt(-2.0, 2.0);
    double x[] = {0.3, 0.7}, y[] = {0.1, -0.4};
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> theta(4), z(4);
      double want = 0.0;
      for (int a = 0; a < 4; ++a) {
        theta[static_cast<std::size_t>(a)] = pt(rng);
        z[static_cast<std::size_t>(a)] = pt(rng);
        double dz = z[static_cast<std::size_t>(a)] - theta[static_cast<std::size_t>(a)];
        want += 0.5 * dz * dz;
      }
      CHECK(excess_point(L, x, y, theta, z) == doctest::Approx(want).epsilon(1e-12));
    }
  }

  TEST_CASE("over a constant field the excess integral equals the functional") {
    // theta and the momenta vanish identically, so node values reduce
    // to f itself and the two quadratures sum the same doubles
    LagrangianSpec L = make_lag("0.5*(z1^2 + z2^2)", 2, 1);
    SlopeField field(make_family("l1", 10.0, 2, 1), L);
    Grid g({{0.1, 0.9}, {0.1, 0.9}}, {17, 17});
    std::vector<int> modes = {2, 1};
    std::vector<double> amp = {0.6};
    GridFunction y = make_bubble(g, modes, amp);
    ExcessSummary s = excess_field(field, y);
    CHECK(s.min_value >= 0.0);
    CHECK(s.num_negative_nodes == 0);
    CHECK(s.integral == functional(L, y));
    CHECK(s.argmin < g.num_nodes());
  }

  TEST_CASE("the excess vanishes identically along the candidate member") {
    SlopeField field = catenary_field();
    Grid g({{0.2, 1.0}}, {33});
    GridFunction y0(g, 1);
    ExcessSummary s = excess_field(field, y0);
    CHECK(s.min_value == 0.0);
    CHECK(s.integral == 0.0);
    CHECK(s.num_negative_nodes == 0);
  }

  TEST_CASE("competitors crossing the concave region show negative excess") {
    LagrangianSpec well = make_lag("(1 - z1^2)^2");
    SlopeField field(make_family("l1", 10.0), well);
    Grid g({{0.0, 1.0}}, {33});
    std::vector<int> modes = {1};
    std::vector<double> amp = {0.25};
    GridFunction y = make_bubble(g, modes, amp);  // slopes stay within the hump
    ExcessSummary s = excess_field(field, y, 1e-9);
    CHECK(s.min_value < -1e-9);
    CHECK(s.num_negative_nodes > 0);
  }

  TEST_CASE("excess evaluation refuses curves outside the tube") {
    SlopeField field(make_family("l1", 0.25), make_lag("0.5*z1^2"));
    Grid g({{0.0, 1.0}}, {9});
    GridFunction big = fill(g, [](double x) { return x; });
    CHECK_THROWS_AS(excess_field(field, big), UncoveredError);
  }

  TEST_CASE("functional, integral, and excess tie together for covered curves") {
    // F(y) - I(y) = integral of E(y) is pointwise algebra, so it holds
    // to roundoff for any covered y, bubbles or not
    SlopeField field = catenary_field();
    Grid g({{0.2, 1.0}}, {65});
    GridFunction y0(g, 1);
    BubbleConfig cfg;
    cfg.delta = 0.5;
    cfg.num_samples = 10;
    for (const GridFunction& eta : draw_bubbles(g, 1, cfg)) {
      GridFunction y = y0 + eta;
      double F = functional(field.lagrangian(), y);
      double I = hilbert_integral(field, y);
      double E = excess_field(field, y).integral;
      CHECK(std::abs(F - I - E) <= 1e-10 * (1.0 + std::abs(F)));
    }
  }

  TEST_CASE("the gap identity error stays at roundoff") {
    SlopeField field = catenary_field();
    Grid g({{0.2, 1.0}}, {65});
    GridFunction y0(g, 1);
    BubbleConfig cfg;
    cfg.delta = 0.5;
    cfg.num_samples = 5;
    for (const GridFunction& eta : draw_bubbles(g, 1, cfg)) {
      GridFunction y = y0 + eta;
      CHECK(gap_identity_error(field.lagrangian(), field, y, y0) <= 1e-12);
    }
  }

  TEST_CASE("the gap identity survives a corrupted slope") {
    // scaling theta breaks exactness and invariance but not the
    // pointwise algebra that the gap identity rests on
    FieldConfig cfg;
    cfg.theta_scale = 1.1;
    SlopeField field = catenary_field(cfg);
    Grid g({{0.2, 1.0}}, {65});
    GridFunction y0(g, 1);
    BubbleConfig bubbles;
    bubbles.delta = 0.5;
    bubbles.num_samples = 5;
    for (const GridFunction& eta : draw_bubbles(g, 1, bubbles)) {
      GridFunction y = y0 + eta;
      CHECK(gap_identity_error(field.lagrangian(), field, y, y0) <= 1e-10);
    }
  }
}
