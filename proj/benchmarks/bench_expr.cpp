#include <benchmark/benchmark.h>

#include <vector>

#include "varcert/expr.hpp"

using namespace varcert;

namespace {

const char* kIntegrand = "0.5 * (z1^2 + z2^2) + exp(0.1 * y1) * sin(x1 * x2)";
const Dims kDims{2, 1};

void bm_parse(benchmark::State& state) {
  for (auto _ : state) {
    Expr e = parse_expr(kIntegrand, kDims, VarClassSet::lagrangian());
    benchmark::DoNotOptimize(e);
  }
}
BENCHMARK(bm_parse);

EvalEnv make_env(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& z) {
  EvalEnv env;
  env.x = x;
  env.y = y;
  env.z = z;
  env.n = kDims.n;
  return env;
}

void bm_eval(benchmark::State& state) {
  Expr e = parse_expr(kIntegrand, kDims, VarClassSet::lagrangian());
  std::vector<double> x = {0.3, 0.7}, y = {0.25}, z = {-0.4, 0.9};
  EvalEnv env = make_env(x, y, z);
  for (auto _ : state) {
    double v = e.eval(env);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(bm_eval);

void bm_diff(benchmark::State& state) {
  Expr e = parse_expr(kIntegrand, kDims, VarClassSet::lagrangian());
  for (auto _ : state) {
    Expr d = e.diff(var_z(1, 1));
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(bm_diff);

void bm_diff_eval(benchmark::State& state) {
  Expr e = parse_expr(kIntegrand, kDims, VarClassSet::lagrangian()).diff(var_z(1, 1));
  std::vector<double> x = {0.3, 0.7}, y = {0.25}, z = {-0.4, 0.9};
  EvalEnv env = make_env(x, y, z);
  for (auto _ : state) {
    double v = e.eval(env);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(bm_diff_eval);

}  // namespace

BENCHMARK_MAIN();
