#include "csdk/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "csdk/config.hpp"
#include "csdk/errors.hpp"
#include "csdk/factor.hpp"

namespace csdk {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch");
  }
}

// Below this many multiply-adds the OpenMP fork costs more than it saves.
constexpr index_t parallel_threshold = 32 * 32 * 32;

}  // namespace

Matrix::Matrix(index_t rows, index_t cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw DimensionError("negative matrix dimension");
  data_.assign(static_cast<std::size_t>(rows * cols), cplx{0.0, 0.0});
}

Matrix::Matrix(std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = static_cast<index_t>(rows.size());
  cols_ = rows_ == 0 ? 0 : static_cast<index_t>(rows.begin()->size());
  data_.assign(static_cast<std::size_t>(rows_ * cols_), cplx{});
  index_t i = 0;
  for (const auto& row : rows) {
    if (static_cast<index_t>(row.size()) != cols_) throw DimensionError("ragged matrix literal");
    index_t j = 0;
    for (const auto& v : row) (*this)(i, j++) = v;
    ++i;
  }
}

Matrix Matrix::identity(index_t rows, index_t cols) {
  Matrix m(rows, cols);
  for (index_t i = 0; i < std::min(rows, cols); ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  const auto n = static_cast<index_t>(d.size());
  Matrix m(n, n);
  for (index_t i = 0; i < n; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
  return m;
}

Matrix Matrix::diagonal(std::span<const cplx> d) {
  const auto n = static_cast<index_t>(d.size());
  Matrix m(n, n);
  for (index_t i = 0; i < n; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
  return m;
}

Matrix Matrix::block(index_t r0, index_t c0, index_t nr, index_t nc) const {
  if (r0 < 0 || c0 < 0 || nr < 0 || nc < 0 || r0 + nr > rows_ || c0 + nc > cols_) {
    throw DimensionError("block out of range");
  }
  Matrix b(nr, nc);
  for (index_t j = 0; j < nc; ++j) {
    std::copy_n(col_ptr(c0 + j) + r0, nr, b.col_ptr(j));
  }
  return b;
}

void Matrix::set_block(index_t r0, index_t c0, const Matrix& b) {
  if (r0 < 0 || c0 < 0 || r0 + b.rows() > rows_ || c0 + b.cols() > cols_) {
    throw DimensionError("set_block out of range");
  }
  for (index_t j = 0; j < b.cols(); ++j) {
    std::copy_n(b.col_ptr(j), b.rows(), col_ptr(c0 + j) + r0);
  }
}

Matrix Matrix::adjoint() const {
  Matrix t(cols_, rows_);
  for (index_t j = 0; j < cols_; ++j)
    for (index_t i = 0; i < rows_; ++i) t(j, i) = std::conj((*this)(i, j));
  return t;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (index_t j = 0; j < cols_; ++j)
    for (index_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::conj() const {
  Matrix c = *this;
  for (auto& v : c.data_) v = std::conj(v);
  return c;
}

std::vector<cplx> Matrix::diag() const {
  std::vector<cplx> d(static_cast<std::size_t>(std::min(rows_, cols_)));
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = (*this)(static_cast<index_t>(i), static_cast<index_t>(i));
  }
  return d;
}

cplx Matrix::trace() const {
  cplx t = 0.0;
  for (index_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

Matrix& Matrix::operator+=(const Matrix& b) {
  require_same_shape(*this, b, "operator+=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += b.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& b) {
  require_same_shape(*this, b, "operator-=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= b.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator-(Matrix a) { return a *= -1.0; }
Matrix operator*(Matrix a, cplx s) { return a *= s; }
Matrix operator*(cplx s, Matrix a) { return a *= s; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix matmul(const Matrix& a, const Matrix& b, Op op_a, Op op_b) {
  const index_t m = op_a == Op::none ? a.rows() : a.cols();
  const index_t k = op_a == Op::none ? a.cols() : a.rows();
  const index_t kb = op_b == Op::none ? b.rows() : b.cols();
  const index_t n = op_b == Op::none ? b.cols() : b.rows();
  if (k != kb) throw DimensionError("matmul: inner dimensions differ");

  Matrix c(m, n);
  const bool parallel = m * n * k >= parallel_threshold;
  const int threads = thread_limit();

#pragma omp parallel for schedule(static) if (parallel) num_threads(threads)
  for (index_t j = 0; j < n; ++j) {
    cplx* cj = c.col_ptr(j);
    if (op_a == Op::none) {
      // Column j of C as a combination of the columns of A.
      for (index_t l = 0; l < k; ++l) {
        const cplx blj = op_b == Op::none ? b(l, j) : std::conj(b(j, l));
        if (blj == cplx{}) continue;
        const cplx* al = a.col_ptr(l);
        for (index_t i = 0; i < m; ++i) cj[i] += al[i] * blj;
      }
    } else {
      // Entry (i, j) is the dot product of column i of A with column j of op(B).
      for (index_t i = 0; i < m; ++i) {
        const cplx* ai = a.col_ptr(i);
        cplx s = 0.0;
        if (op_b == Op::none) {
          const cplx* bj = b.col_ptr(j);
          for (index_t p = 0; p < k; ++p) s += std::conj(ai[p]) * bj[p];
        } else {
          for (index_t p = 0; p < k; ++p) s += std::conj(ai[p] * b(j, p));
        }
        cj[i] = s;
      }
    }
  }
  return c;
}

Matrix gram(const Matrix& a) {
  Matrix g = matmul(a, a, Op::adjoint, Op::none);
  for (index_t j = 0; j < g.cols(); ++j) {
    g(j, j) = g(j, j).real();
    for (index_t i = 0; i < j; ++i) g(j, i) = std::conj(g(i, j));
  }
  return g;
}

Matrix hermitian_part(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("hermitian_part: matrix not square");
  Matrix h(a.rows(), a.cols());
  for (index_t j = 0; j < a.cols(); ++j) {
    h(j, j) = a(j, j).real();
    for (index_t i = 0; i < j; ++i) {
      const cplx v = 0.5 * (a(i, j) + std::conj(a(j, i)));
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  }
  return h;
}

Matrix shift_diagonal(Matrix a, cplx s) {
  if (a.rows() != a.cols()) throw DimensionError("shift_diagonal: matrix not square");
  for (index_t i = 0; i < a.rows(); ++i) a(i, i) += s;
  return a;
}

Matrix scale_columns(Matrix a, std::span<const double> d) {
  if (static_cast<index_t>(d.size()) != a.cols()) throw DimensionError("scale_columns: length");
  for (index_t j = 0; j < a.cols(); ++j) {
    const double s = d[static_cast<std::size_t>(j)];
    for (auto& v : a.col(j)) v *= s;
  }
  return a;
}

Matrix hstack(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("hstack: row counts differ");
  Matrix c(a.rows(), a.cols() + b.cols());
  c.set_block(0, 0, a);
  c.set_block(0, a.cols(), b);
  return c;
}

Matrix vstack(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw DimensionError("vstack: column counts differ");
  Matrix c(a.rows() + b.rows(), a.cols());
  c.set_block(0, 0, a);
  c.set_block(a.rows(), 0, b);
  return c;
}

double norm_fro(const Matrix& a) {
  // Scaled sum of squares, as in LAPACK's zlassq.
  double scale = 0.0;
  double ssq = 1.0;
  for (const cplx& v : a.data()) {
    for (const double x : {v.real(), v.imag()}) {
      if (x == 0.0) continue;
      const double ax = std::abs(x);
      if (scale < ax) {
        ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
        scale = ax;
      } else {
        ssq += (ax / scale) * (ax / scale);
      }
    }
  }
  return scale * std::sqrt(ssq);
}

double norm2(const Matrix& a) {
  if (a.empty()) return 0.0;
  const double f = norm_fro(a);
  if (f == 0.0) return 0.0;
  // Largest eigenvalue of the smaller Gram matrix of A / ||A||_F.
  const Matrix s = a * (1.0 / f);
  const Matrix g = a.rows() >= a.cols() ? gram(s) : gram(s.adjoint());
  const auto ev = hermitian_eigvalues(g);
  return f * std::sqrt(std::max(ev.back(), 0.0));
}

double norm1(const Matrix& a) {
  double best = 0.0;
  for (index_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (const cplx& v : a.col(j)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

double norm_inf(const Matrix& a) {
  std::vector<double> rowsum(static_cast<std::size_t>(a.rows()), 0.0);
  for (index_t j = 0; j < a.cols(); ++j)
    for (index_t i = 0; i < a.rows(); ++i) rowsum[static_cast<std::size_t>(i)] += std::abs(a(i, j));
  return rowsum.empty() ? 0.0 : *std::max_element(rowsum.begin(), rowsum.end());
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (const cplx& v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double offdiag_norm(const Matrix& a) {
  Matrix o = a;
  for (index_t i = 0; i < std::min(a.rows(), a.cols()); ++i) o(i, i) = 0.0;
  return norm_fro(o);
}

double max_offdiag_abs(const Matrix& a) {
  double m = 0.0;
  for (index_t j = 0; j < a.cols(); ++j)
    for (index_t i = 0; i < a.rows(); ++i)
      if (i != j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

double orth_defect_fro(const Matrix& a) {
  return norm_fro(shift_diagonal(gram(a), -1.0));
}

double orth_defect_2(const Matrix& a) {
  if (a.cols() == 0) return 0.0;
  const auto ev = hermitian_eigvalues(shift_diagonal(gram(a), -1.0));
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

bool all_finite(const Matrix& a) {
  return std::all_of(a.data().begin(), a.data().end(), [](const cplx& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

}  // namespace csdk
