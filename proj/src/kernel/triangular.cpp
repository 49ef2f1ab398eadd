#include <cmath>
#include <string>

#include "csdk/errors.hpp"
#include "csdk/factor.hpp"

namespace csdk {

Matrix cholesky_factor(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("cholesky_factor: matrix not square");
  const index_t n = a.rows();
  Matrix r(n, n);
  for (index_t j = 0; j < n; ++j) {
    // Column j of R from A(0:j, j) = R(0:j, 0:j)^* R(0:j, j).
    for (index_t i = 0; i < j; ++i) {
      cplx s = a(i, j);
      for (index_t k = 0; k < i; ++k) s -= std::conj(r(k, i)) * r(k, j);
      r(i, j) = s / r(i, i).real();
    }
    double d = a(j, j).real();
    for (index_t k = 0; k < j; ++k) d -= std::norm(r(k, j));
    if (!(d > 0.0)) {
      throw NotPositiveDefinite("cholesky_factor: non-positive pivot at " + std::to_string(j));
    }
    r(j, j) = std::sqrt(d);
  }
  return r;
}

namespace {

// op(T) X = B with T square triangular, solved column by column of B.
Matrix solve_left(const Matrix& t, Matrix x, Uplo uplo, Op op) {
  const index_t n = t.rows();
  // op(T) is upper triangular when (upper, none) or (lower, adjoint).
  const bool upper_eff = (uplo == Uplo::upper) == (op == Op::none);
  auto elem = [&](index_t i, index_t k) { return op == Op::none ? t(i, k) : std::conj(t(k, i)); };

  for (index_t j = 0; j < x.cols(); ++j) {
    cplx* xj = x.col_ptr(j);
    if (upper_eff) {
      for (index_t i = n - 1; i >= 0; --i) {
        cplx s = xj[i];
        for (index_t k = i + 1; k < n; ++k) s -= elem(i, k) * xj[k];
        xj[i] = s / elem(i, i);
      }
    } else {
      for (index_t i = 0; i < n; ++i) {
        cplx s = xj[i];
        for (index_t k = 0; k < i; ++k) s -= elem(i, k) * xj[k];
        xj[i] = s / elem(i, i);
      }
    }
  }
  return x;
}

}  // namespace

Matrix solve_triangular(const Matrix& t, const Matrix& b, Side side, Uplo uplo, Op op) {
  if (t.rows() != t.cols()) throw DimensionError("solve_triangular: T not square");
  for (index_t i = 0; i < t.rows(); ++i) {
    if (t(i, i) == cplx{}) throw SingularMatrix("solve_triangular: zero diagonal entry");
  }
  if (side == Side::left) {
    if (b.rows() != t.rows()) throw DimensionError("solve_triangular: row mismatch");
    return solve_left(t, b, uplo, op);
  }
  if (b.cols() != t.rows()) throw DimensionError("solve_triangular: column mismatch");
  // X op(T) = B  <=>  op(T)^* X^* = B^*.
  const Op flipped = op == Op::none ? Op::adjoint : Op::none;
  return solve_left(t, b.adjoint(), uplo, flipped).adjoint();
}

}  // namespace csdk
