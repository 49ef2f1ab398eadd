#include <algorithm>
#include <cmath>

#include "csdk/errors.hpp"
#include "csdk/serial.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace csdk;
using csdk::test::u;

namespace {

// Modified Gram-Schmidt with positive diag(R): an independent route to the
// unique QR factorization of a full-column-rank matrix.
void mgs_oracle(const Matrix& a, Matrix& q, Matrix& r) {
  const index_t n = a.cols();
  q = a;
  r = Matrix(n, n);
  for (index_t k = 0; k < n; ++k) {
    double nk = 0.0;
    for (const cplx& v : q.col(k)) nk += std::norm(v);
    nk = std::sqrt(nk);
    r(k, k) = nk;
    for (auto& v : q.col(k)) v /= nk;
    for (index_t j = k + 1; j < n; ++j) {
      cplx s = 0.0;
      for (index_t i = 0; i < a.rows(); ++i) s += std::conj(q(i, k)) * q(i, j);
      r(k, j) = s;
      for (index_t i = 0; i < a.rows(); ++i) q(i, j) -= s * q(i, k);
    }
  }
}

bool upper_triangular(const Matrix& r) {
  for (index_t j = 0; j < r.cols(); ++j)
    for (index_t i = j + 1; i < r.rows(); ++i)
      if (r(i, j) != cplx{}) return false;
  return true;
}

}  // namespace

TEST_CASE("matmul agrees with the serial reference for every op combination") {
  const Matrix a = test::random_matrix(37, 23, 11);
  const Matrix b = test::random_matrix(23, 41, 12);
  const Matrix bt = test::random_matrix(41, 23, 13);
  const Matrix at = test::random_matrix(23, 37, 14);
  const double scale = norm_fro(a) * norm_fro(b);
  CHECK(norm_fro(matmul(a, b) - serial::matmul(a, b)) <= 50 * u * scale);
  CHECK(norm_fro(matmul(a, bt, Op::none, Op::adjoint) - serial::matmul(a, bt, Op::none, Op::adjoint)) <= 50 * u * scale);
  CHECK(norm_fro(matmul(at, b, Op::adjoint) - serial::matmul(at, b, Op::adjoint)) <= 50 * u * scale);
  CHECK(norm_fro(matmul(at, bt, Op::adjoint, Op::adjoint) -
                 serial::matmul(at, bt, Op::adjoint, Op::adjoint)) <= 50 * u * scale);
  CHECK_THROWS_AS(matmul(a, a), DimensionError);
}

TEST_CASE("matmul result does not depend on the thread count") {
  const Matrix a = test::random_matrix(64, 64, 3);
  const int saved = thread_limit();
  set_thread_limit(1);
  const Matrix one = a * a;
  set_thread_limit(4);
  const Matrix four = a * a;
  set_thread_limit(saved);
  CHECK(one == four);
}

TEST_CASE("qr_factor trivial cases") {
  const QrFactors f = qr_factor(Matrix::identity(3));
  CHECK(f.q == Matrix::identity(3));
  CHECK(f.r == Matrix::identity(3));

  const QrFactors g = qr_factor(Matrix{{-2.0}});
  CHECK(g.q(0, 0) == cplx{-1.0});
  CHECK(g.r(0, 0) == cplx{2.0});

  CHECK_THROWS_AS(qr_factor(Matrix(2, 3)), DimensionError);
}

TEST_CASE("qr_factor matches the modified Gram-Schmidt oracle") {
  const Matrix a = test::random_matrix(5, 3, 7);
  const QrFactors f = qr_factor(a);
  Matrix q;
  Matrix r;
  mgs_oracle(a, q, r);
  CHECK(norm_fro(f.q - q) <= 1e3 * u);
  CHECK(norm_fro(f.r - r) <= 1e3 * u * norm_fro(a));
  CHECK(test::rel_residual(a, f.q * f.r) <= 1e3 * u);
  CHECK(orth_defect_fro(f.q) <= 50 * 3 * u);
}

TEST_CASE("qr_factor invariants hold on random shapes") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const index_t n = 1 + static_cast<index_t>(seed % 9);
    const index_t m = n + static_cast<index_t>((seed * 7) % 13);
    const Matrix a = test::random_matrix(m, n, seed);
    const QrFactors f = qr_factor(a);
    CHECK(upper_triangular(f.r));
    for (index_t i = 0; i < n; ++i) {
      CHECK(f.r(i, i).imag() == 0.0);
      CHECK(f.r(i, i).real() >= 0.0);
    }
    CHECK(test::rel_residual(a, f.q * f.r) <= 1e3 * u);
    CHECK(orth_defect_fro(f.q) <= 50 * static_cast<double>(n) * u);
    // Deterministic for a fixed input.
    const QrFactors g = qr_factor(a);
    CHECK(f.q == g.q);
    CHECK(f.r == g.r);
  }
}

TEST_CASE("qr_pivoted reveals rank and reconstructs") {
  const Matrix a = test::with_singular_values(6, 6, {1.0, 0.5, 0.0, 0.0, 0.0, 0.0}, 5);
  const PivotedQr f = qr_pivoted(a);
  CHECK(orth_defect_fro(f.q) <= 50 * 6 * u);
  Matrix ap(6, 6);
  for (index_t j = 0; j < 6; ++j) ap.set_block(0, j, a.cols_range(f.perm[static_cast<std::size_t>(j)], 1));
  CHECK(norm_fro(ap - f.q * f.r) <= 1e3 * u);
  CHECK(std::abs(f.r(1, 1)) > 1e-3);
  CHECK(std::abs(f.r(2, 2)) <= 1e-14);
}

TEST_CASE("cholesky_factor") {
  CHECK(cholesky_factor(Matrix::identity(3)) == Matrix::identity(3));
  const std::vector<double> d{4.0, 9.0};
  const Matrix r = cholesky_factor(Matrix::diagonal(d));
  CHECK(r(0, 0) == cplx{2.0});
  CHECK(r(1, 1) == cplx{3.0});

  const Matrix x = test::random_matrix(8, 8, 21);
  const Matrix a = shift_diagonal(gram(x), 1.0);
  const Matrix rr = cholesky_factor(a);
  CHECK(upper_triangular(rr));
  CHECK(norm_fro(matmul(rr, rr, Op::adjoint) - a) <= 50 * 8 * u * norm_fro(a));
  for (index_t i = 0; i < 8; ++i) CHECK(rr(i, i).real() > 0.0);

  const std::vector<double> indefinite{1.0, -1.0};
  CHECK_THROWS_AS(cholesky_factor(Matrix::diagonal(indefinite)), NotPositiveDefinite);
}

TEST_CASE("svd_factor trivial cases") {
  const std::vector<double> d{3.0, 2.0, 1.0};
  const SvdFactors f = svd_factor(Matrix::diagonal(d));
  CHECK(f.sigma == d);

  const SvdFactors z = svd_factor(Matrix(4, 2));
  CHECK(z.sigma == std::vector<double>{0.0, 0.0});
  CHECK(orth_defect_fro(z.p) <= 10 * u);
  CHECK(orth_defect_fro(z.q) <= 10 * u);
}

TEST_CASE("svd_factor on random 6x4 against the eigenvalues of A^*A") {
  const Matrix a = test::random_matrix(6, 4, 31);
  const SvdFactors f = svd_factor(a);
  CHECK(std::is_sorted(f.sigma.rbegin(), f.sigma.rend()));
  const Matrix rec = matmul(scale_columns(f.p, f.sigma), f.q, Op::none, Op::adjoint);
  CHECK(norm_fro(rec - a) <= 1e3 * u * norm_fro(a));
  CHECK(orth_defect_fro(f.p) <= 50 * 4 * u);
  CHECK(orth_defect_fro(f.q) <= 50 * 4 * u);

  const auto ev = hermitian_eigvalues(gram(a));  // ascending
  const double scale = f.sigma.front() * f.sigma.front();
  for (std::size_t i = 0; i < f.sigma.size(); ++i) {
    CHECK(std::abs(f.sigma[i] * f.sigma[i] - ev[ev.size() - 1 - i]) <= 1e3 * u * scale);
  }
}

TEST_CASE("svd_factor handles wide and rank-deficient inputs") {
  const Matrix w = test::random_matrix(3, 7, 41);
  const SvdFactors f = svd_factor(w);
  CHECK(f.p.rows() == 3);
  CHECK(f.q.rows() == 7);
  CHECK(norm_fro(matmul(scale_columns(f.p, f.sigma), f.q, Op::none, Op::adjoint) - w) <=
        1e3 * u * norm_fro(w));

  const Matrix low = test::with_singular_values(9, 5, {2.0, 1.0}, 42);
  const SvdFactors g = svd_factor(low);
  CHECK(std::abs(g.sigma[0] - 2.0) <= 1e2 * u);
  CHECK(std::abs(g.sigma[1] - 1.0) <= 1e2 * u);
  CHECK(g.sigma[2] <= 1e2 * u);
  CHECK(orth_defect_fro(g.p) <= 50 * 5 * u);
  CHECK(norm_fro(matmul(scale_columns(g.p, g.sigma), g.q, Op::none, Op::adjoint) - low) <= 1e3 * u);

  const auto sv = singular_values(low);
  for (std::size_t i = 0; i < sv.size(); ++i) CHECK(std::abs(sv[i] - g.sigma[i]) <= 1e2 * u);
}

TEST_CASE("solve_triangular") {
  const Matrix b = test::random_matrix(4, 3, 51);
  CHECK(solve_triangular(Matrix::identity(4), b) == b);
  CHECK(solve_triangular(Matrix{{2.0}}, Matrix{{4.0}})(0, 0) == cplx{2.0});
  CHECK_THROWS_AS(solve_triangular(Matrix(2, 2), Matrix(2, 1)), SingularMatrix);

  // Well-conditioned upper and lower triangles.
  Matrix r = test::random_matrix(6, 6, 52);
  for (index_t j = 0; j < 6; ++j) {
    r(j, j) += 8.0;
    for (index_t i = j + 1; i < 6; ++i) r(i, j) = 0.0;
  }
  const Matrix l = r.adjoint();
  const Matrix rhs = test::random_matrix(6, 4, 53);
  const Matrix rhs_t = test::random_matrix(4, 6, 54);
  const double tol = 1e2 * u * norm_fro(rhs) * 10;

  CHECK(norm_fro(r * solve_triangular(r, rhs) - rhs) <= tol);
  CHECK(norm_fro(r.adjoint() * solve_triangular(r, rhs, Side::left, Uplo::upper, Op::adjoint) - rhs) <= tol);
  CHECK(norm_fro(l * solve_triangular(l, rhs, Side::left, Uplo::lower) - rhs) <= tol);
  CHECK(norm_fro(solve_triangular(r, rhs_t, Side::right) * r - rhs_t) <= tol);
  CHECK(norm_fro(solve_triangular(r, rhs_t, Side::right, Uplo::upper, Op::adjoint) * r.adjoint() - rhs_t) <= tol);
}

TEST_CASE("hermitian_eig is a backward-stable decomposition") {
  for (const index_t n : {1, 2, 5, 17, 40}) {
    const Matrix b = test::random_hermitian(n, 60 + static_cast<std::uint64_t>(n));
    const HermitianEig e = hermitian_eig(b);
    CHECK(std::is_sorted(e.values.begin(), e.values.end()));
    const Matrix rec = matmul(scale_columns(e.vectors, e.values), e.vectors, Op::none, Op::adjoint);
    CHECK(norm_fro(rec - b) <= 50 * static_cast<double>(n) * u * norm_fro(b));
    CHECK(orth_defect_fro(e.vectors) <= 50 * static_cast<double>(n) * u);
    const auto vals = hermitian_eigvalues(b);
    for (std::size_t i = 0; i < vals.size(); ++i) CHECK(std::abs(vals[i] - e.values[i]) <= 1e3 * u * norm_fro(b));
  }
}

TEST_CASE("norm2 equals the largest singular value") {
  const Matrix a = test::with_singular_values(7, 4, {3.0, 1.0, 0.5, 0.1}, 71);
  CHECK(std::abs(norm2(a) - 3.0) <= 1e2 * u);
  CHECK(std::abs(norm2(a.adjoint()) - 3.0) <= 1e2 * u);
  CHECK(norm2(Matrix(3, 2)) == 0.0);
}
