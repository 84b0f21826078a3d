#include <cmath>
#include <vector>

#include "doctest.h"
#include "varcert/linalg.hpp"

using namespace varcert;
using namespace varcert::linalg;

TEST_SUITE("linalg") {
  TEST_CASE("dense solve recovers a known solution") {
    // A x = b with x = (1, -2, 3) worked out by hand
    std::vector<double> a = {2.0, 1.0, 0.0,
                             1.0, 3.0, 1.0,
                             0.0, 1.0, 4.0};
    std::vector<double> x = {1.0, -2.0, 3.0};
    std::vector<double> b(3, 0.0);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) b[static_cast<std::size_t>(r)] += a[static_cast<std::size_t>(r * 3 + c)] * x[static_cast<std::size_t>(c)];
    std::vector<double> work = a;
    CHECK(solve_in_place(work, b, 3));
    for (int i = 0; i < 3; ++i) CHECK(b[static_cast<std::size_t>(i)] == doctest::Approx(x[static_cast<std::size_t>(i)]).epsilon(1e-13));
  }

  TEST_CASE("singular systems are reported, not solved") {
    std::vector<double> a = {1.0, 2.0,
                             2.0, 4.0};
    std::vector<double> b = {1.0, 1.0};
    CHECK_FALSE(solve_in_place(a, b, 2));
  }

  TEST_CASE("infinity-norm condition number of the identity is one") {
    std::vector<double> eye = {1.0, 0.0, 0.0, 1.0};
    CHECK(cond_inf(eye, 2) == doctest::Approx(1.0).epsilon(1e-14));
    // scaling one row stretches the condition number accordingly
    std::vector<double> a = {100.0, 0.0, 0.0, 1.0};
    CHECK(cond_inf(a, 2) == doctest::Approx(100.0).epsilon(1e-12));
  }

  TEST_CASE("smallest eigenvalue of small symmetric matrices") {
    std::vector<double> one = {3.5};
    CHECK(min_eigenvalue_symmetric(one, 1) == 3.5);

    // [[2, 1], [1, 2]] has eigenvalues 1 and 3
    std::vector<double> a = {2.0, 1.0, 1.0, 2.0};
    CHECK(min_eigenvalue_symmetric(a, 2) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> indef = {1.0, 2.0, 2.0, 1.0};
    CHECK(min_eigenvalue_symmetric(indef, 2) == doctest::Approx(-1.0).epsilon(1e-12));
  }

  TEST_CASE("smallest eigenvalue of a 9x9 second-difference matrix") {
    // tridiagonal (2, -1) matrix of size d: eigenvalues are
    // 2 - 2 cos(k pi / (d + 1)), smallest at k = 1
    const int d = 9;
    std::vector<double> a(static_cast<std::size_t>(d * d), 0.0);
    for (int i = 0; i < d; ++i) {
      a[static_cast<std::size_t>(i * d + i)] = 2.0;
      if (i + 1 < d) {
        a[static_cast<std::size_t>(i * d + i + 1)] = -1.0;
        a[static_cast<std::size_t>((i + 1) * d + i)] = -1.0;
      }
    }
    double want = 2.0 - 2.0 * std::cos(M_PI / (d + 1));
    CHECK(min_eigenvalue_symmetric(a, d) == doctest::Approx(want).epsilon(1e-8));
  }
}
