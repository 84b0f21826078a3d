#pragma once

#include <span>
#include <vector>

namespace varcert {
namespace linalg {

// Solve A x = b for a small dense row-major dim x dim matrix by LU with
// partial pivoting; b is overwritten with the solution.  Returns false
// if a pivot falls below 1e-12 * max(1, ||A||_inf).  A is destroyed.
bool solve_in_place(std::vector<double>& a, std::span<double> b, int dim);

// ||A||_inf * ||A^-1||_inf, or +inf if A is numerically singular.
double cond_inf(std::span<const double> a, int dim);

// Smallest eigenvalue of a symmetric matrix (upper part is trusted; the
// input is symmetrized first).  Cyclic Jacobi for dim <= 8, bisection on
// shifted Cholesky factorizations above.
double min_eigenvalue_symmetric(std::span<const double> a, int dim);

}  // namespace linalg
}  // namespace varcert
