#include "varcert/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace varcert {
namespace linalg {

namespace {

double norm_inf(std::span<const double> a, int dim) {
  double best = 0.0;
  for (int r = 0; r < dim; ++r) {
    double row = 0.0;
    for (int c = 0; c < dim; ++c) row += std::fabs(a[static_cast<std::size_t>(r * dim + c)]);
    best = std::max(best, row);
  }
  return best;
}

}  // namespace

bool solve_in_place(std::vector<double>& a, std::span<double> b, int dim) {
  double tol = 1e-12 * std::max(1.0, norm_inf(a, dim));
  std::size_t n = static_cast<std::size_t>(dim);
  for (int col = 0; col < dim; ++col) {
    int pivot = col;
    double best = std::fabs(a[static_cast<std::size_t>(col) * n + static_cast<std::size_t>(col)]);
    for (int r = col + 1; r < dim; ++r) {
      double v = std::fabs(a[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(col)]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (!(best > tol)) return false;
    if (pivot != col) {
      for (int c = 0; c < dim; ++c)
        std::swap(a[static_cast<std::size_t>(pivot) * n + static_cast<std::size_t>(c)],
                  a[static_cast<std::size_t>(col) * n + static_cast<std::size_t>(c)]);
      std::swap(b[static_cast<std::size_t>(pivot)], b[static_cast<std::size_t>(col)]);
    }
    double d = a[static_cast<std::size_t>(col) * n + static_cast<std::size_t>(col)];
    for (int r = col + 1; r < dim; ++r) {
      double f = a[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(col)] / d;
      if (f == 0.0) continue;
      for (int c = col; c < dim; ++c)
        a[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(c)] -=
            f * a[static_cast<std::size_t>(col) * n + static_cast<std::size_t>(c)];
      b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
    }
  }
  for (int r = dim - 1; r >= 0; --r) {
    double s = b[static_cast<std::size_t>(r)];
    for (int c = r + 1; c < dim; ++c)
      s -= a[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(c)] * b[static_cast<std::size_t>(c)];
    b[static_cast<std::size_t>(r)] = s / a[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(r)];
  }
  return true;
}

double cond_inf(std::span<const double> a, int dim) {
  std::size_t n = static_cast<std::size_t>(dim);
  double na = norm_inf(a, dim);
  // columns of the inverse via repeated solves
  std::vector<double> inv(n * n, 0.0);
  for (int c = 0; c < dim; ++c) {
    std::vector<double> work(a.begin(), a.end());
    std::vector<double> e(n, 0.0);
    e[static_cast<std::size_t>(c)] = 1.0;
    if (!solve_in_place(work, e, dim)) return std::numeric_limits<double>::infinity();
    for (int r = 0; r < dim; ++r) inv[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(c)] = e[static_cast<std::size_t>(r)];
  }
  return na * norm_inf(inv, dim);
}

namespace {

double min_eig_jacobi(std::vector<double> a, int dim) {
  std::size_t n = static_cast<std::size_t>(dim);
  auto at = [&](int r, int c) -> double& { return a[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(c)]; };
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < dim; ++p)
      for (int q = p + 1; q < dim; ++q) off += at(p, q) * at(p, q);
    if (off < 1e-26) break;
    for (int p = 0; p < dim; ++p) {
      for (int q = p + 1; q < dim; ++q) {
        double apq = at(p, q);
        if (apq == 0.0) continue;
        double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int r = 0; r < dim; ++r) {
          double arp = at(r, p), arq = at(r, q);
          at(r, p) = c * arp - s * arq;
          at(r, q) = s * arp + c * arq;
        }
        for (int r = 0; r < dim; ++r) {
          double apr = at(p, r), aqr = at(q, r);
          at(p, r) = c * apr - s * aqr;
          at(q, r) = s * apr + c * aqr;
        }
      }
    }
  }
  double best = at(0, 0);
  for (int r = 1; r < dim; ++r) best = std::min(best, at(r, r));
  return best;
}

// is (A - shift I) positive definite?  (plain Cholesky attempt)
bool shifted_posdef(const std::vector<double>& a, int dim, double shift) {
  std::size_t n = static_cast<std::size_t>(dim);
  std::vector<double> l(n * n, 0.0);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c <= r; ++c) {
      double s = a[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(c)] - (r == c ? shift : 0.0);
      for (int k = 0; k < c; ++k)
        s -= l[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(k)] *
             l[static_cast<std::size_t>(c) * n + static_cast<std::size_t>(k)];
      if (r == c) {
        if (s <= 0.0) return false;
        l[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(c)] = std::sqrt(s);
      } else {
        l[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(c)] =
            s / l[static_cast<std::size_t>(c) * n + static_cast<std::size_t>(c)];
      }
    }
  }
  return true;
}

double min_eig_bisection(const std::vector<double>& a, int dim) {
  // Gershgorin bounds, then bisection on the Cholesky positivity test
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t n = static_cast<std::size_t>(dim);
  for (int r = 0; r < dim; ++r) {
    double d = a[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(r)];
    double radius = 0.0;
    for (int c = 0; c < dim; ++c)
      if (c != r) radius += std::fabs(a[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(c)]);
    lo = std::min(lo, d - radius);
    hi = std::max(hi, d + radius);
  }
  double scale = std::max({1.0, std::fabs(lo), std::fabs(hi)});
  for (int it = 0; it < 200 && hi - lo > 1e-14 * scale; ++it) {
    double mid = 0.5 * (lo + hi);
    // min eig > mid  iff  A - mid I is positive definite
    if (shifted_posdef(a, dim, mid))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double min_eigenvalue_symmetric(std::span<const double> a, int dim) {
  std::size_t n = static_cast<std::size_t>(dim);
  std::vector<double> sym(n * n);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      sym[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(c)] =
          0.5 * (a[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(c)] +
                 a[static_cast<std::size_t>(c) * n + static_cast<std::size_t>(r)]);
  if (dim == 1) return sym[0];
  if (dim <= 8) return min_eig_jacobi(std::move(sym), dim);
  return min_eig_bisection(sym, dim);
}

}  // namespace linalg
}  // namespace varcert
