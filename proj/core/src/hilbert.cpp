#include "varcert/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace varcert {

namespace {

// uniform double in [0,1) from the top 53 bits; hand-rolled so draws do
// not depend on the standard library's distribution implementation
double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<GridFunction> draw_bubbles(const Grid& grid, int components, const BubbleConfig& cfg) {
  if (cfg.num_samples < 0) throw ValidationError("num_samples must be nonnegative");
  if (cfg.mode_cap < 1) throw ValidationError("mode_cap must be at least 1");
  if (!(cfg.delta > 0.0)) throw ValidationError("bubble amplitude bound must be positive");
  std::mt19937_64 rng(cfg.seed);
  std::vector<GridFunction> out;
  out.reserve(static_cast<std::size_t>(cfg.num_samples));
  std::vector<int> modes(static_cast<std::size_t>(grid.dim()));
  std::vector<double> amplitude(static_cast<std::size_t>(components));
  for (int s = 0; s < cfg.num_samples; ++s) {
    for (int k = 0; k < grid.dim(); ++k)
      modes[static_cast<std::size_t>(k)] = std::min(1 + static_cast<int>(next_unit(rng) * cfg.mode_cap), cfg.mode_cap);
    for (int j = 0; j < components; ++j) {
      double mag = cfg.delta * (0.25 + 0.75 * next_unit(rng));
      amplitude[static_cast<std::size_t>(j)] = next_unit(rng) < 0.5 ? -mag : mag;
    }
    out.push_back(make_bubble(grid, modes, amplitude));
  }
  return out;
}

double hilbert_integral(const SlopeField& field, const GridFunction& y) {
  const Dims& dims = field.dims();
  const Grid& grid = y.grid();
  if (y.components() != dims.N) throw ValidationError("component count does not match N");
  GradientField dy = discrete_gradient(y);
  std::vector<double> integrand(grid.num_nodes());
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  std::vector<double> yv(static_cast<std::size_t>(dims.N));
  std::vector<double> guess;
  for (std::size_t node = 0; node < grid.num_nodes(); ++node) {
    grid.node_coords(node, x);
    for (int j = 0; j < dims.N; ++j) yv[static_cast<std::size_t>(j)] = y.value(j, node);
    FieldPoint fp;
    try {
      fp = field.point(x, yv, guess);
    } catch (const InvertError& e) {
      throw UncoveredError("integrand not covered at node " + std::to_string(node) + ": " + e.what(), node);
    }
    guess = fp.lambda;
    double v = fp.h;
    std::span<const double> g = dy.at(node);
    for (std::size_t a = 0; a < g.size(); ++a) v += fp.p[a] * g[a];
    integrand[node] = v;
  }
  return quadrature(integrand, grid);
}

InvarianceStats invariance_over(const SlopeField& field, const GridFunction& y0,
                                std::span<const GridFunction> bubbles, std::uint64_t seed) {
  InvarianceStats stats;
  stats.seed = seed;
  stats.num_samples = static_cast<int>(bubbles.size());
  stats.i_y0 = hilbert_integral(field, y0);
  stats.deviations.reserve(bubbles.size());
  double worst = 0.0;
  for (const GridFunction& eta : bubbles) {
    double i = hilbert_integral(field, y0 + eta);
    stats.deviations.push_back(std::fabs(i - stats.i_y0));
    worst = std::max(worst, stats.deviations.back());
  }
  stats.max_rel_dev = worst / (1.0 + std::fabs(stats.i_y0));
  return stats;
}

InvarianceStats invariance_check(const SlopeField& field, const GridFunction& y0, const BubbleConfig& cfg) {
  std::vector<GridFunction> bubbles = draw_bubbles(y0.grid(), y0.components(), cfg);
  return invariance_over(field, y0, bubbles, cfg.seed);
}

}  // namespace varcert
