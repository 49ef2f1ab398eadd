#pragma once

#include "csdk/matrix.hpp"

// Straight-line reference kernels. They share no code with the OpenMP
// kernels in matrix.cpp and exist to check them in tests and benchmarks.
namespace csdk::serial {

/// Naive triple-loop op(A) * op(B).
Matrix matmul(const Matrix& a, const Matrix& b, Op op_a = Op::none, Op op_b = Op::none);

}  // namespace csdk::serial
