#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace csdk {

using cplx = std::complex<double>;
using index_t = std::ptrdiff_t;

/// Dense complex matrix stored column-major. Every module in the project
/// shares this storage order.
class Matrix {
 public:
  Matrix() = default;
  Matrix(index_t rows, index_t cols);
  /// Row-major nested initializer, convenient for small literals in tests.
  Matrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static Matrix zeros(index_t rows, index_t cols) { return {rows, cols}; }
  static Matrix identity(index_t n) { return identity(n, n); }
  static Matrix identity(index_t rows, index_t cols);
  static Matrix diagonal(std::span<const double> d);
  static Matrix diagonal(std::span<const cplx> d);

  [[nodiscard]] index_t rows() const { return rows_; }
  [[nodiscard]] index_t cols() const { return cols_; }
  [[nodiscard]] index_t size() const { return rows_ * cols_; }
  [[nodiscard]] bool empty() const { return size() == 0; }

  cplx& operator()(index_t i, index_t j) { return data_[static_cast<std::size_t>(i + j * rows_)]; }
  const cplx& operator()(index_t i, index_t j) const {
    return data_[static_cast<std::size_t>(i + j * rows_)];
  }

  cplx* col_ptr(index_t j) { return data_.data() + j * rows_; }
  [[nodiscard]] const cplx* col_ptr(index_t j) const { return data_.data() + j * rows_; }
  std::span<cplx> col(index_t j) { return {col_ptr(j), static_cast<std::size_t>(rows_)}; }
  [[nodiscard]] std::span<const cplx> col(index_t j) const {
    return {col_ptr(j), static_cast<std::size_t>(rows_)};
  }

  std::span<cplx> data() { return data_; }
  [[nodiscard]] std::span<const cplx> data() const { return data_; }

  /// Copy of the rows [r0, r0+nr) and columns [c0, c0+nc).
  [[nodiscard]] Matrix block(index_t r0, index_t c0, index_t nr, index_t nc) const;
  [[nodiscard]] Matrix cols_range(index_t c0, index_t nc) const { return block(0, c0, rows_, nc); }
  [[nodiscard]] Matrix rows_range(index_t r0, index_t nr) const { return block(r0, 0, nr, cols_); }
  void set_block(index_t r0, index_t c0, const Matrix& b);

  [[nodiscard]] Matrix adjoint() const;
  [[nodiscard]] Matrix transpose() const;
  [[nodiscard]] Matrix conj() const;
  [[nodiscard]] std::vector<cplx> diag() const;
  [[nodiscard]] cplx trace() const;

  Matrix& operator+=(const Matrix& b);
  Matrix& operator-=(const Matrix& b);
  Matrix& operator*=(cplx s);
  Matrix& operator*=(double s);

  bool operator==(const Matrix& b) const = default;

 private:
  index_t rows_ = 0;
  index_t cols_ = 0;
  std::vector<cplx> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator-(Matrix a);
Matrix operator*(Matrix a, cplx s);
Matrix operator*(cplx s, Matrix a);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);

enum class Op { none, adjoint };

/// C = op(A) * op(B). Output columns are distributed over OpenMP threads;
/// each column is accumulated by one thread in a fixed order, so the result
/// does not depend on the thread count.
Matrix matmul(const Matrix& a, const Matrix& b, Op op_a = Op::none, Op op_b = Op::none);

inline Matrix operator*(const Matrix& a, const Matrix& b) { return matmul(a, b); }

/// A^* A, always Hermitian to the last bit (upper triangle mirrored).
Matrix gram(const Matrix& a);

/// (A + A^*) / 2.
Matrix hermitian_part(const Matrix& a);

/// A + s I for square A.
Matrix shift_diagonal(Matrix a, cplx s);

/// Scales column j by d[j].
Matrix scale_columns(Matrix a, std::span<const double> d);

/// Horizontal and vertical concatenation.
Matrix hstack(const Matrix& a, const Matrix& b);
Matrix vstack(const Matrix& a, const Matrix& b);

double norm_fro(const Matrix& a);
/// Largest singular value.
double norm2(const Matrix& a);
double norm1(const Matrix& a);
double norm_inf(const Matrix& a);
/// Largest entry modulus.
double max_abs(const Matrix& a);
/// Frobenius norm of the strictly off-diagonal part.
double offdiag_norm(const Matrix& a);
/// Largest modulus among off-diagonal entries.
double max_offdiag_abs(const Matrix& a);

/// ||A^* A - I||_F, the orthonormality defect of the columns of A.
double orth_defect_fro(const Matrix& a);
/// ||A^* A - I||_2.
double orth_defect_2(const Matrix& a);

bool all_finite(const Matrix& a);

}  // namespace csdk
