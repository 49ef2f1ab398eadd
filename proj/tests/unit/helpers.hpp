#pragma once

#include <cmath>
#include <vector>

#include "csdk/config.hpp"
#include "csdk/factor.hpp"
#include "csdk/matrix.hpp"
#include "csdk/testgen.hpp"

namespace csdk::test {

inline constexpr double u = unit_roundoff;

inline Matrix random_matrix(index_t m, index_t n, std::uint64_t seed) {
  testgen::Rng rng(seed);
  return testgen::complex_gaussian(m, n, rng);
}

inline Matrix random_hermitian(index_t n, std::uint64_t seed) {
  return hermitian_part(random_matrix(n, n, seed));
}

/// U diag(sigma) V^* with Haar U (m x k) and V (n x k), k = sigma.size().
inline Matrix with_singular_values(index_t m, index_t n, const std::vector<double>& sigma,
                                   std::uint64_t seed) {
  testgen::Rng rng(seed);
  const auto k = static_cast<index_t>(sigma.size());
  const Matrix uu = testgen::haar_stiefel(m, k, rng);
  const Matrix vv = testgen::haar_stiefel(n, k, rng);
  return matmul(scale_columns(uu, sigma), vv, Op::none, Op::adjoint);
}

/// Geometric sequence from 1 down to 1/kappa.
inline std::vector<double> geometric_spectrum(index_t n, double kappa) {
  std::vector<double> s(static_cast<std::size_t>(n));
  for (index_t i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    s[static_cast<std::size_t>(i)] = std::pow(kappa, -t);
  }
  return s;
}

inline double rel_residual(const Matrix& a, const Matrix& approx) {
  const double na = norm_fro(a);
  return norm_fro(a - approx) / (na == 0.0 ? 1.0 : na);
}

}  // namespace csdk::test
