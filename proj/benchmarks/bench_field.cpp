#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "varcert/excess.hpp"
#include "varcert/field.hpp"
#include "varcert/hilbert.hpp"

using namespace varcert;

namespace {

// catenary-type field: members l*cosh(x), slope y*tanh(x)
SlopeField make_field() {
  Dims dims{1, 1};
  LagrangianSpec lagrangian =
      LagrangianSpec::build(dims, parse_expr("0.5*(z1^2 + y1^2)", dims, VarClassSet::lagrangian()));
  ExtremalFamily family = ExtremalFamily::closed_form(
      dims, {parse_expr("l1*cosh(x1)", dims, VarClassSet::family())}, 10.0);
  return SlopeField(std::move(family), std::move(lagrangian));
}

void bm_invert_cold(benchmark::State& state) {
  SlopeField field = make_field();
  std::vector<double> x = {0.7}, y = {0.55};
  for (auto _ : state) {
    InvertResult r = field.try_invert(x, y);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(bm_invert_cold);

void bm_invert_warm(benchmark::State& state) {
  SlopeField field = make_field();
  std::vector<double> x = {0.7}, y = {0.55};
  std::vector<double> guess = {0.55 / std::cosh(0.7) * 1.01};  // continuation-quality guess
  for (auto _ : state) {
    InvertResult r = field.try_invert(x, y, guess);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(bm_invert_warm);

void bm_field_point(benchmark::State& state) {
  SlopeField field = make_field();
  std::vector<double> x = {0.7}, y = {0.55};
  for (auto _ : state) {
    FieldPoint p = field.point(x, y);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(bm_field_point);

GridFunction wiggle(const Grid& omega) {
  GridFunction y(omega, 1);
  for (std::size_t i = 0; i < omega.num_nodes(); ++i) {
    double xv = omega.coord(0, static_cast<int>(i));
    y.value(0, i) = 0.3 * std::sin(3.0 * xv);
  }
  return y;
}

void bm_hilbert_integral(benchmark::State& state) {
  SlopeField field = make_field();
  Grid omega({{0.2, 1.0}}, {static_cast<int>(state.range(0))});
  GridFunction y = wiggle(omega);
  for (auto _ : state) {
    double v = hilbert_integral(field, y);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(bm_hilbert_integral)->Arg(33)->Arg(65)->Arg(129);

void bm_excess_sweep(benchmark::State& state) {
  SlopeField field = make_field();
  Grid omega({{0.2, 1.0}}, {65});
  GridFunction y = wiggle(omega);
  for (auto _ : state) {
    ExcessSummary s = excess_field(field, y, 1e-9);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(bm_excess_sweep);

}  // namespace
