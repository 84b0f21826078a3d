#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "varcert/domain.hpp"
#include "varcert/errors.hpp"
#include "varcert/expr.hpp"

using namespace varcert;

namespace {

Grid unit_grid_1d(int m) { return Grid({{0.0, 1.0}}, {m}); }

GridFunction sample_text(const Grid& grid, const std::string& text, int n, int N = 1) {
  std::vector<Expr> comps;
  for (int j = 0; j < N; ++j) comps.push_back(parse_expr(text, Dims{n, N}, VarClassSet::spatial()));
  return sample(grid, comps);
}

// trapezoid weights by hand for a cross-check on one axis
double trapz_1d(std::span<const double> v, double h) {
  double acc = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) acc += v[i];
  return acc * h;
}

}  // namespace

TEST_SUITE("domain") {
  TEST_CASE("omega must sit strictly inside b0") {
    CHECK_NOTHROW(BoxDomain({{0.0, 1.0}}, {{0.1, 0.9}}));
    try {
      BoxDomain({{0.0, 1.0}, {0.0, 1.0}}, {{0.1, 0.9}, {0.1, 1.0}});
      FAIL("expected rejection");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("axis 2") != std::string::npos);
    }
    CHECK_THROWS_AS(BoxDomain({{0.0, 1.0}}, {{0.5, 0.4}}), ValidationError);
    CHECK_THROWS_AS(BoxDomain({{0.0, 1.0}}, {{0.1, 0.9}, {0.1, 0.9}}), ValidationError);
  }

  TEST_CASE("grid coordinates hit the endpoints exactly") {
    Grid g({{0.1, 0.9}}, {5});
    CHECK(g.coord(0, 0) == 0.1);
    CHECK(g.coord(0, 4) == 0.9);
    CHECK(g.spacing(0) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(g.max_spacing() == g.spacing(0));
    CHECK_THROWS_AS(Grid({{0.0, 1.0}}, {2}), ValidationError);
  }

  TEST_CASE("multi index and linear index are inverse bijections") {
    Grid g({{0.0, 1.0}, {0.0, 2.0}, {0.0, 3.0}}, {3, 4, 5});
    CHECK(g.num_nodes() == 60);
    std::vector<int> multi(3);
    std::vector<double> coords(3);
    for (std::size_t node = 0; node < g.num_nodes(); ++node) {
      g.multi_index(node, multi);
      CHECK(g.linear_index(multi) == node);
      g.node_coords(node, coords);
      for (int k = 0; k < 3; ++k) CHECK(coords[static_cast<std::size_t>(k)] == g.coord(k, multi[static_cast<std::size_t>(k)]));
    }
  }

  TEST_CASE("boundary and deep-interior classification") {
    Grid g = unit_grid_1d(5);
    std::vector<bool> boundary = {true, false, false, false, true};
    std::vector<bool> deep = {false, false, true, false, false};
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(g.is_boundary(i) == boundary[i]);
      CHECK(g.is_deep_interior(i) == deep[i]);
    }
  }

  TEST_CASE("sampling evaluates coordinates exactly") {
    Grid g({{0.0, 1.0}, {0.0, 1.0}}, {3, 3});
    GridFunction u = sample_text(g, "x1*x2", 2);
    std::vector<int> corner = {2, 2};
    CHECK(u.value(0, g.linear_index(corner)) == 1.0);
    std::vector<int> mid = {1, 1};
    CHECK(u.value(0, g.linear_index(mid)) == 0.25);
    GridFunction zero = sample_text(g, "0", 2);
    CHECK(zero.sup_norm() == 0.0);
  }

  TEST_CASE("discrete gradient is exact on per-axis quadratics") {
    // centered stencils are exact on quadratics, and so are the
    // three-point one-sided stencils used on the faces
    Grid g = unit_grid_1d(9);
    GridFunction u = sample_text(g, "x1^2 - 0.5*x1 + 2", 1);
    GradientField du = discrete_gradient(u);
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
      double x = g.coord(0, static_cast<int>(i));
      CHECK(du.value(i, 0, 0) == doctest::Approx(2.0 * x - 0.5).epsilon(1e-12));
    }

    Grid g2({{0.0, 1.0}, {0.0, 1.0}}, {7, 7});
    GridFunction v = sample_text(g2, "x1*x2 + x2^2", 2);
    GradientField dv = discrete_gradient(v);
    std::vector<double> coords(2);
    for (std::size_t i = 0; i < g2.num_nodes(); ++i) {
      g2.node_coords(i, coords);
      CHECK(dv.value(i, 0, 0) == doctest::Approx(coords[1]).epsilon(1e-12));
      CHECK(dv.value(i, 0, 1) == doctest::Approx(coords[0] + 2.0 * coords[1]).epsilon(1e-12));
    }
  }

  TEST_CASE("gradient error decays at second order on smooth data") {
    auto sup_error = [](int m) {
      Grid g = unit_grid_1d(m);
      GridFunction u = sample_text(g, "sin(x1)", 1);
      GradientField du = discrete_gradient(u);
      double worst = 0.0;
      for (std::size_t i = 0; i < g.num_nodes(); ++i) {
        double want = std::cos(g.coord(0, static_cast<int>(i)));
        worst = std::max(worst, std::abs(du.value(i, 0, 0) - want));
      }
      return worst;
    };
    double e33 = sup_error(33), e65 = sup_error(65);
    CHECK(e65 < e33);
    CHECK(std::log2(e33 / e65) >= doctest::Approx(1.8));
  }

  TEST_CASE("quadrature integrates tensor-product affine data exactly") {
    Grid g({{0.0, 1.0}, {0.0, 1.0}}, {9, 9});
    GridFunction u = sample_text(g, "x1*x2", 2);
    CHECK(quadrature(u.component(0), g) == doctest::Approx(0.25).epsilon(1e-14));

    GridFunction one = sample_text(g, "1", 2);
    CHECK(quadrature(one.component(0), g) == doctest::Approx(1.0).epsilon(1e-14));

    // random (a + b x)(c + d y) against the closed-form integral
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int trial = 0; trial < 25; ++trial) {
      double a = coef(rng), b = coef(rng), c = coef(rng), d = coef(rng);
      std::vector<double> values(g.num_nodes());
      std::vector<double> xy(2);
      for (std::size_t i = 0; i < g.num_nodes(); ++i) {
        g.node_coords(i, xy);
        values[i] = (a + b * xy[0]) * (c + d * xy[1]);
      }
      double want = (a + 0.5 * b) * (c + 0.5 * d);
      CHECK(quadrature(values, g) == doctest::Approx(want).epsilon(1e-13));
    }
  }

  TEST_CASE("quadrature converges on curved integrands") {
    Grid g = unit_grid_1d(65);
    std::vector<double> values(g.num_nodes());
    for (std::size_t i = 0; i < g.num_nodes(); ++i) values[i] = std::sin(M_PI * g.coord(0, static_cast<int>(i)));
    CHECK(quadrature(values, g) == doctest::Approx(2.0 / M_PI).epsilon(1e-3 / (2.0 / M_PI)));
    // and it matches a hand-rolled composite trapezoid sum
    CHECK(quadrature(values, g) == doctest::Approx(trapz_1d(values, g.spacing(0))).epsilon(1e-15));
  }

  TEST_CASE("summation by parts holds up to boundary stencil error") {
    // d/dx (u v) integrates to zero when v vanishes on the boundary;
    // its discrete counterpart shrinks at second order
    auto defect = [](int m) {
      Grid g = unit_grid_1d(m);
      GridFunction u = sample_text(g, "x1^2", 1);
      std::vector<int> modes = {3};
      std::vector<double> amp = {1.0};
      GridFunction v = make_bubble(g, modes, amp);
      GradientField du = discrete_gradient(u), dv = discrete_gradient(v);
      std::vector<double> values(g.num_nodes());
      for (std::size_t i = 0; i < g.num_nodes(); ++i)
        values[i] = du.value(i, 0, 0) * v.value(0, i) + u.value(0, i) * dv.value(i, 0, 0);
      return std::abs(quadrature(values, g));
    };
    double d33 = defect(33), d129 = defect(129);
    CHECK(d33 <= 1e-2);
    bool both_tiny = d33 < 1e-12 && d129 < 1e-12;
    CHECK((both_tiny || std::log2(d33 / d129) / 2.0 >= doctest::Approx(1.5)));
  }

  TEST_CASE("bubbles vanish on the boundary exactly") {
    Grid g({{0.2, 1.0}, {0.0, 1.0}}, {9, 8});
    std::vector<int> modes = {2, 3};
    std::vector<double> amp = {0.7};
    GridFunction b = make_bubble(g, modes, amp);
    for (std::size_t i = 0; i < g.num_nodes(); ++i)
      if (g.is_boundary(i)) CHECK(b.value(0, i) == 0.0);
    CHECK(b.sup_norm() <= 0.7);
  }

  TEST_CASE("bubble peak equals the amplitude when a node hits the crest") {
    // mode 1 peaks at the midpoint, mode 2 at the quarter points; odd
    // resolutions with (m-1) divisible by 4 contain those nodes
    Grid g = unit_grid_1d(65);
    std::vector<double> amp = {0.3};
    for (int mode : {1, 2}) {
      std::vector<int> modes = {mode};
      GridFunction b = make_bubble(g, modes, amp);
      CHECK(b.sup_norm() == doctest::Approx(0.3).epsilon(1e-12));
    }
  }

  TEST_CASE("grid functions add component-wise") {
    Grid g = unit_grid_1d(5);
    GridFunction a = sample_text(g, "x1", 1);
    GridFunction b = sample_text(g, "1 - x1", 1);
    GridFunction s = a + b;
    for (std::size_t i = 0; i < g.num_nodes(); ++i) CHECK(s.value(0, i) == doctest::Approx(1.0).epsilon(1e-15));
    Grid other = unit_grid_1d(7);
    GridFunction c = sample_text(other, "x1", 1);
    CHECK_THROWS_AS(a + c, ValidationError);
  }
}
