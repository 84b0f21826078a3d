#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "varcert/domain.hpp"
#include "varcert/field.hpp"

namespace varcert {

// How many boundary-preserving perturbations to draw, the per-axis
// sine-mode cap, the seed, and the sup-norm amplitude bound.
struct BubbleConfig {
  int num_samples = 50;
  int mode_cap = 4;
  std::uint64_t seed = 42;
  double delta = 1.0;
};

// Deviation statistics of the integral over perturbed competitors.
struct InvarianceStats {
  double i_y0 = 0.0;
  std::vector<double> deviations;  // |I(y_s) - I(y0)| in draw order
  double max_rel_dev = 0.0;        // max deviation / (1 + |i_y0|)
  int num_samples = 0;
  std::uint64_t seed = 0;
};

// Random product-of-sines perturbations: per-axis mode uniform over
// {1..mode_cap}, per-component amplitude uniform over [delta/4, delta]
// with a random sign.  Equal seeds reproduce equal draws bit for bit.
std::vector<GridFunction> draw_bubbles(const Grid& grid, int components, const BubbleConfig& cfg);

// Quadrature of h(x, y(x)) + sum_{jk} P_jk(x, y(x)) * dy_j/dx_k over the
// grid, with the discrete gradient standing in for dy/dx.  Nodes are
// matched to members by continuation in ascending node order; a node
// that cannot be matched raises UncoveredError with its index.
double hilbert_integral(const SlopeField& field, const GridFunction& y);

// Integral deviations over a fixed set of perturbations (the seed is
// recorded verbatim in the stats).
InvarianceStats invariance_over(const SlopeField& field, const GridFunction& y0,
                                std::span<const GridFunction> bubbles, std::uint64_t seed);

// draw_bubbles + invariance_over in one call.
InvarianceStats invariance_check(const SlopeField& field, const GridFunction& y0, const BubbleConfig& cfg);

}  // namespace varcert
