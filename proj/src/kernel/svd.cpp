#include <algorithm>
#include <cmath>
#include <numeric>

#include "csdk/config.hpp"
#include "csdk/errors.hpp"
#include "csdk/factor.hpp"

namespace csdk {

namespace {

constexpr int max_sweeps = 60;

cplx dot(const cplx* x, const cplx* y, index_t n) {
  cplx s = 0.0;
  for (index_t i = 0; i < n; ++i) s += std::conj(x[i]) * y[i];
  return s;
}

double norm_sq(const cplx* x, index_t n) {
  double s = 0.0;
  for (index_t i = 0; i < n; ++i) s += std::norm(x[i]);
  return s;
}

// Rotates columns p, q of w (and of v when given) so that they become
// orthogonal. Returns false when they already are to the tolerance.
bool rotate_pair(Matrix& w, Matrix* v, index_t p, index_t q, double tol) {
  const index_t m = w.rows();
  cplx* wp = w.col_ptr(p);
  cplx* wq = w.col_ptr(q);
  const double alpha = norm_sq(wp, m);
  const double beta = norm_sq(wq, m);
  const cplx gamma = dot(wp, wq, m);
  const double g = std::abs(gamma);
  if (g == 0.0 || g <= tol * std::sqrt(alpha) * std::sqrt(beta)) return false;

  // Remove the phase of gamma from column q, then apply a real rotation.
  const cplx phase = std::conj(gamma) / g;
  const double zeta = (beta - alpha) / (2.0 * g);
  const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = c * t;

  auto update = [&](cplx* xp, cplx* xq, index_t len) {
    for (index_t i = 0; i < len; ++i) {
      const cplx a = xp[i];
      const cplx b = xq[i] * phase;
      xp[i] = c * a - s * b;
      xq[i] = s * a + c * b;
    }
  };
  update(wp, wq, m);
  if (v) update(v->col_ptr(p), v->col_ptr(q), v->rows());
  return true;
}

// Extends the orthonormal columns [0, k) of p to a full orthonormal set.
void complete_basis(Matrix& p, index_t k) {
  const index_t m = p.rows();
  index_t next_unit = 0;
  for (index_t j = k; j < p.cols(); ++j) {
    for (;; ++next_unit) {
      if (next_unit >= m) throw ConvergenceError("svd_factor: basis completion failed");
      std::vector<cplx> x(static_cast<std::size_t>(m), cplx{});
      x[static_cast<std::size_t>(next_unit)] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (index_t c = 0; c < j; ++c) {
          const cplx h = dot(p.col_ptr(c), x.data(), m);
          for (index_t i = 0; i < m; ++i) x[static_cast<std::size_t>(i)] -= h * p(i, c);
        }
      }
      const double nx = std::sqrt(norm_sq(x.data(), m));
      if (nx > 0.5) {
        for (index_t i = 0; i < m; ++i) p(i, j) = x[static_cast<std::size_t>(i)] / nx;
        ++next_unit;
        break;
      }
    }
  }
}

// Jacobi SVD of a matrix with rows >= cols.
SvdFactors jacobi_svd(const Matrix& a, bool want_vectors) {
  const index_t n = a.cols();
  Matrix w = a;
  Matrix v = want_vectors ? Matrix::identity(n) : Matrix{};
  const double tol = std::max<double>(static_cast<double>(a.rows()), 1.0) * unit_roundoff;

  bool converged = n < 2;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    bool rotated = false;
    for (index_t p = 0; p < n - 1; ++p)
      for (index_t q = p + 1; q < n; ++q)
        rotated |= rotate_pair(w, want_vectors ? &v : nullptr, p, q, tol);
    converged = !rotated;
  }
  if (!converged) throw ConvergenceError("svd_factor: Jacobi sweeps did not converge");

  std::vector<double> norms(static_cast<std::size_t>(n));
  for (index_t j = 0; j < n; ++j) norms[static_cast<std::size_t>(j)] = std::sqrt(norm_sq(w.col_ptr(j), w.rows()));
  std::vector<index_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), index_t{0});
  std::stable_sort(order.begin(), order.end(), [&](index_t x, index_t y) {
    return norms[static_cast<std::size_t>(x)] > norms[static_cast<std::size_t>(y)];
  });

  SvdFactors f;
  f.sigma.resize(static_cast<std::size_t>(n));
  for (index_t j = 0; j < n; ++j) f.sigma[static_cast<std::size_t>(j)] = norms[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
  if (!want_vectors) return f;

  f.p = Matrix(a.rows(), n);
  f.q = Matrix(n, n);
  index_t nonzero = 0;
  for (index_t j = 0; j < n; ++j) {
    const index_t src = order[static_cast<std::size_t>(j)];
    const double s = f.sigma[static_cast<std::size_t>(j)];
    std::copy_n(v.col_ptr(src), n, f.q.col_ptr(j));
    if (s > 0.0) {
      for (index_t i = 0; i < a.rows(); ++i) f.p(i, j) = w(i, src) / s;
      ++nonzero;
    }
  }
  if (nonzero < n) complete_basis(f.p, nonzero);
  return f;
}

}  // namespace

SvdFactors svd_factor(const Matrix& a) {
  if (a.rows() < a.cols()) {
    SvdFactors t = svd_factor(a.adjoint());
    return {std::move(t.q), std::move(t.sigma), std::move(t.p)};
  }
  if (a.cols() == 0) return {Matrix(a.rows(), 0), {}, Matrix(0, 0)};
  if (a.rows() == a.cols()) return jacobi_svd(a, true);
  // Tall: Jacobi on the triangular factor, then lift the left vectors.
  QrFactors qr = qr_factor(a);
  SvdFactors f = jacobi_svd(qr.r, true);
  f.p = qr.q * f.p;
  return f;
}

std::vector<double> singular_values(const Matrix& a) {
  if (a.rows() < a.cols()) return singular_values(a.adjoint());
  if (a.cols() == 0) return {};
  if (a.rows() == a.cols()) return jacobi_svd(a, false).sigma;
  return jacobi_svd(qr_r_factor(a), false).sigma;
}

}  // namespace csdk
