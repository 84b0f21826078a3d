#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "varcert/errors.hpp"
#include "varcert/expr.hpp"

using namespace varcert;

namespace {

const Dims kScalar{1, 1};

// evaluate over the scalar layout (x1, y1, z1, l1)
double eval1(const Expr& e, double x, double y, double z, double l = 0.0) {
  double xs[] = {x}, ys[] = {y}, zs[] = {z}, ls[] = {l};
  EvalEnv env;
  env.x = std::span<const double>(xs, 1);
  env.y = std::span<const double>(ys, 1);
  env.z = std::span<const double>(zs, 1);
  env.lambda = std::span<const double>(ls, 1);
  env.n = 1;
  return e.eval(env);
}

Expr parse_l(const std::string& text) { return parse_expr(text, kScalar, VarClassSet::lagrangian()); }

// random expression trees over {x1, y1, z1} with entire building blocks,
// used by the derivative / round-trip properties below
Expr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  auto pick = [&](int hi) { return static_cast<int>(rng() % static_cast<unsigned>(hi)); };
  if (depth == 0) {
    switch (pick(4)) {
      case 0: return Expr::constant(coef(rng));
      case 1: return Expr::variable(var_x(1));
      case 2: return Expr::variable(var_y(1));
      default: return Expr::variable(var_z(1, 1));
    }
  }
  switch (pick(8)) {
    case 0: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    case 1: return random_expr(rng, depth - 1) - random_expr(rng, depth - 1);
    case 2: return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
    case 3: return Expr::sin(random_expr(rng, depth - 1));
    case 4: return Expr::cos(random_expr(rng, depth - 1));
    case 5: return Expr::tanh(random_expr(rng, depth - 1));
    case 6: return Expr::pow(random_expr(rng, depth - 1), Expr::constant(static_cast<double>(2 + pick(2))));
    default: return Expr::exp(Expr::constant(0.25) * random_expr(rng, depth - 1));
  }
}

}  // namespace

TEST_SUITE("expr") {
  TEST_CASE("parsing and evaluation of basic integrands") {
    Expr f = parse_l("0.5*(z1^2 + y1^2)");
    CHECK(eval1(f, 0.0, 3.0, 4.0) == doctest::Approx(12.5).epsilon(1e-15));
    CHECK(f.str(kScalar) == "0.5 * (z1 ^ 2 + y1 ^ 2)");

    Expr g = parse_expr("l1*cosh(x1)", kScalar, VarClassSet::family());
    // plain function evaluation: cosh(1) = (e + 1/e)/2
    double want = 0.5 * (std::exp(1.0) + std::exp(-1.0));
    CHECK(eval1(g, 1.0, 0.0, 0.0, 1.0) == doctest::Approx(want).epsilon(1e-15));
    CHECK(eval1(g, 1.0, 0.0, 0.0, 1.0) == doctest::Approx(1.5430806348152437).epsilon(1e-14));
  }

  TEST_CASE("two-digit gradient indices appear only for several components") {
    Dims d{2, 2};
    Expr f = parse_expr("0.5*(z11^2 + z12^2) + z21*z22", d, VarClassSet::lagrangian());
    double xs[] = {0.0, 0.0}, ys[] = {0.0, 0.0}, zs[] = {1.0, 2.0, 3.0, 4.0};
    EvalEnv env;
    env.x = std::span<const double>(xs, 2);
    env.y = std::span<const double>(ys, 2);
    env.z = std::span<const double>(zs, 4);
    env.n = 2;
    CHECK(f.eval(env) == doctest::Approx(0.5 * (1.0 + 4.0) + 12.0).epsilon(1e-15));

    // with one component the axis index is used alone
    Dims flat{2, 1};
    Expr e = parse_expr("z1*z2", flat, VarClassSet::lagrangian());
    double zf[] = {5.0, 7.0};
    EvalEnv env2;
    env2.x = std::span<const double>(xs, 2);
    env2.z = std::span<const double>(zf, 2);
    env2.n = 2;
    CHECK(e.eval(env2) == 35.0);
    CHECK(var_z(1, 1).name(flat) == "z1");
    CHECK(var_z(1, 1).name(Dims{2, 2}) == "z11");
  }

  TEST_CASE("syntax errors carry the source offset") {
    try {
      parse_l("z1^^2");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.offset() == 3);
      CHECK(std::string(e.what()).find("at offset 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_l("0.5*(z1"), ParseError);
    CHECK_THROWS_AS(parse_l("z1 + + z1"), ParseError);
    CHECK_THROWS_AS(parse_l("foo(z1)"), ParseError);
    CHECK_THROWS_AS(parse_l(""), ParseError);
    CHECK_THROWS_AS(parse_l("z1 z1"), ParseError);
  }

  TEST_CASE("variable class and index range are enforced at parse time") {
    // lambda is not part of an integrand, y is not part of a family map
    CHECK_THROWS_AS(parse_expr("l1*z1", kScalar, VarClassSet::lagrangian()), ParseError);
    CHECK_THROWS_AS(parse_expr("y1 + l1", kScalar, VarClassSet::family()), ParseError);
    // indices past the declared dimensions
    CHECK_THROWS_AS(parse_expr("x2", kScalar, VarClassSet::spatial()), ParseError);
    CHECK_THROWS_AS(parse_expr("z13", Dims{2, 2}, VarClassSet::lagrangian()), ParseError);
    CHECK_THROWS_AS(parse_expr("z31", Dims{2, 2}, VarClassSet::lagrangian()), ParseError);
    // exponents must be constants
    CHECK_THROWS_AS(parse_l("z1^z1"), Error);
  }

  TEST_CASE("evaluation rejects domain violations instead of returning NaN") {
    CHECK_THROWS_AS(eval1(parse_l("log(y1)"), 0.0, -1.0, 0.0), EvalError);
    CHECK_THROWS_AS(eval1(parse_l("sqrt(y1)"), 0.0, -1.0, 0.0), EvalError);
    CHECK_THROWS_AS(eval1(parse_l("1/z1"), 0.0, 0.0, 0.0), EvalError);
    CHECK_THROWS_AS(eval1(parse_l("z1^0.5"), 0.0, 0.0, -2.0), EvalError);
    CHECK(eval1(parse_l("z1^0.5"), 0.0, 0.0, 4.0) == doctest::Approx(2.0));
  }

  TEST_CASE("derivatives of the standard integrands come out in closed form") {
    Expr f = parse_l("0.5*(z1^2 + y1^2)");
    CHECK(f.diff(var_y(1)).str(kScalar) == "y1");
    CHECK(f.diff(var_z(1, 1)).str(kScalar) == "z1");

    Expr t = parse_l("y1*tanh(x1)");
    CHECK(t.diff(var_y(1)).str(kScalar) == "tanh(x1)");

    Expr c = parse_expr("l1*cosh(x1)", kScalar, VarClassSet::family());
    CHECK(c.diff(var_x(1)).str(kScalar) == "l1 * sinh(x1)");

    // (1 - z^2)^2 -> -4 z (1 - z^2), compared by value
    Expr w = parse_l("(1 - z1^2)^2");
    Expr dw = w.diff(var_z(1, 1));
    for (double z : {-1.5, -0.7, 0.0, 0.3, 1.1}) {
      double want = -4.0 * z * (1.0 - z * z);
      CHECK(eval1(dw, 0.0, 0.0, z) == doctest::Approx(want).epsilon(1e-14));
    }

    // sqrt(1 + z^2) -> z / sqrt(1 + z^2)
    Expr s = parse_l("sqrt(1 + z1^2)");
    Expr ds = s.diff(var_z(1, 1));
    for (double z : {-2.0, -0.4, 0.0, 0.9, 3.0}) {
      CHECK(eval1(ds, 0.0, 0.0, z) == doctest::Approx(z / std::sqrt(1.0 + z * z)).epsilon(1e-14));
    }
  }

  TEST_CASE("derivative of an untouched variable vanishes structurally") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
      Expr e = random_expr(rng, 3);
      CHECK(e.diff(var_lambda(1)).is_zero());
      if (!e.depends_on(var_y(1))) CHECK(e.diff(var_y(1)).is_zero());
    }
  }

  TEST_CASE("symbolic derivatives agree with central differences") {
    // property check over random trees and random points; the step and
    // acceptance band are fixed so failures are reproducible
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> pt(-1.5, 1.5);
    const double step = 1e-5;
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
      Expr e = random_expr(rng, 3);
      double x = pt(rng), y = pt(rng), z = pt(rng);
      VarRef v = var_z(1, 1);
      double exact = eval1(e.diff(v), x, y, z);
      double hi = eval1(e, x, y, z + step);
      double lo = eval1(e, x, y, z - step);
      double fd = (hi - lo) / (2.0 * step);
      if (!std::isfinite(exact) || !std::isfinite(fd) || std::abs(exact) > 1e8) continue;
      ++checked;
      CHECK(std::abs(exact - fd) <= 1e-6 * (1.0 + std::abs(exact)));
    }
    CHECK(checked >= 150);  // the grammar is entire, so nearly all draws count
  }

  TEST_CASE("print and parse round-trip to the identical tree") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      Expr e = random_expr(rng, 3);
      std::string text = e.str(kScalar);
      Expr back = parse_expr(text, kScalar, VarClassSet::lagrangian());
      CHECK(back.same_tree(e));
      CHECK(back.str(kScalar) == text);
    }
    // a negative leading coefficient survives the trip as well
    Expr neg = parse_expr("-0.5*x1 - 1", kScalar, VarClassSet::spatial());
    CHECK(parse_expr(neg.str(kScalar), kScalar, VarClassSet::spatial()).same_tree(neg));
  }

  TEST_CASE("constant folding keeps simple algebra tidy") {
    CHECK(parse_l("0*z1").is_zero());
    CHECK(parse_l("2*3").is_constant());
    CHECK(parse_l("2*3").constant_value() == 6.0);
    Expr sum = parse_l("z1 + 0");
    CHECK(sum.str(kScalar) == "z1");
  }
}
