#include "csdk/serial.hpp"

#include "csdk/errors.hpp"

namespace csdk::serial {

Matrix matmul(const Matrix& a, const Matrix& b, Op op_a, Op op_b) {
  const index_t m = op_a == Op::none ? a.rows() : a.cols();
  const index_t k = op_a == Op::none ? a.cols() : a.rows();
  const index_t n = op_b == Op::none ? b.cols() : b.rows();
  if (k != (op_b == Op::none ? b.rows() : b.cols())) {
    throw DimensionError("serial::matmul: inner dimensions differ");
  }
  auto at = [&](index_t i, index_t l) { return op_a == Op::none ? a(i, l) : std::conj(a(l, i)); };
  auto bt = [&](index_t l, index_t j) { return op_b == Op::none ? b(l, j) : std::conj(b(j, l)); };

  Matrix c(m, n);
  for (index_t i = 0; i < m; ++i) {
    for (index_t j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (index_t l = 0; l < k; ++l) s += at(i, l) * bt(l, j);
      c(i, j) = s;
    }
  }
  return c;
}

}  // namespace csdk::serial
