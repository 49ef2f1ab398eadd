#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "csdk/matrix.hpp"

// Dense matrix files. The native format is
//
//   cmat <rows> <cols> <complex|real>
//   <entries in row-major order, complex entries as "re im">
//
// with 17 significant digits, so values round-trip exactly. Readers also
// accept MatrixMarket "array" files (column-major, real or complex).
namespace csdk::io {

enum class Field { real, complex };

Matrix read_matrix(std::istream& in);
Matrix read_matrix_file(const std::string& path);

/// Field::real drops imaginary parts; pick it only for real data.
void write_cmat(std::ostream& out, const Matrix& a, Field field = Field::complex);
void write_cmat_file(const std::string& path, const Matrix& a, Field field = Field::complex);

/// Column vector / diagonal matrix helpers for real output.
Matrix column(const std::vector<double>& v);

/// "%.17g", the rendering used by the writer.
std::string format_double(double x);

}  // namespace csdk::io
