#pragma once

#include <vector>

#include "csdk/matrix.hpp"

namespace csdk {

/// Thin QR factors: A = Q R with Q (m x n) orthonormal and R (n x n) upper
/// triangular with a real nonnegative diagonal. The diagonal convention makes
/// the factorization unique for full-rank A.
struct QrFactors {
  Matrix q;
  Matrix r;
};

/// Householder QR followed by a phase pass that makes diag(R) real and
/// nonnegative. Requires rows >= cols.
QrFactors qr_factor(const Matrix& a);

/// Upper-triangular factor only, same diagonal convention as qr_factor.
Matrix qr_r_factor(const Matrix& a);

/// QR with column pivoting, A P = Q R. Q is the full square m x m factor.
struct PivotedQr {
  Matrix q;
  Matrix r;
  std::vector<index_t> perm;  // column j of A P is column perm[j] of A
};
PivotedQr qr_pivoted(const Matrix& a);

/// Upper-triangular R with A = R^* R. Throws NotPositiveDefinite on a
/// non-positive pivot.
Matrix cholesky_factor(const Matrix& a);

/// A = P diag(sigma) Q^* with P (m x k), Q (n x k), k = min(m, n), sigma
/// nonincreasing.
struct SvdFactors {
  Matrix p;
  std::vector<double> sigma;
  Matrix q;
};

/// One-sided Jacobi SVD, preceded by a QR reduction when m > n.
SvdFactors svd_factor(const Matrix& a);

/// Singular values only, nonincreasing.
std::vector<double> singular_values(const Matrix& a);

enum class Side { left, right };
enum class Uplo { upper, lower };

/// Solves op(T) X = B (Side::left) or X op(T) = B (Side::right) for
/// triangular T. Throws SingularMatrix on an exactly zero diagonal entry.
Matrix solve_triangular(const Matrix& t, const Matrix& b, Side side = Side::left,
                        Uplo uplo = Uplo::upper, Op op = Op::none);

/// Eigendecomposition of a Hermitian matrix by Householder tridiagonalization
/// and implicit-shift QL. Eigenvalues ascending, eigenvectors as columns.
struct HermitianEig {
  std::vector<double> values;
  Matrix vectors;
};
HermitianEig hermitian_eig(const Matrix& a);
std::vector<double> hermitian_eigvalues(const Matrix& a);

}  // namespace csdk
