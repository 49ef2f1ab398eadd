#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "csdk/errors.hpp"
#include "csdk/io.hpp"

namespace csdk::io {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_double(const std::string& tok) {
  double x = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last) throw ParseError("bad number '" + tok + "'");
  return x;
}

index_t parse_dim(const std::string& tok) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 0) {
    throw ParseError("bad dimension '" + tok + "'");
  }
  return static_cast<index_t>(v);
}

double next_value(std::istream& in) {
  std::string tok;
  if (!(in >> tok)) throw ParseError("unexpected end of data");
  return parse_double(tok);
}

Field parse_field(const std::string& tok) {
  const std::string f = lower(tok);
  if (f == "real" || f == "double" || f == "integer") return Field::real;
  if (f == "complex") return Field::complex;
  throw ParseError("unsupported field '" + tok + "'");
}

void expect_end(std::istream& in) {
  std::string tok;
  if (in >> tok) throw ParseError("trailing data after matrix entries");
}

Matrix read_cmat(std::istream& in, const std::string& header) {
  std::istringstream h(header);
  std::string magic, rows, cols, field, extra;
  if (!(h >> magic >> rows >> cols >> field) || (h >> extra)) {
    throw ParseError("malformed cmat header: '" + header + "'");
  }
  const Field f = parse_field(field);
  Matrix a(parse_dim(rows), parse_dim(cols));
  for (index_t i = 0; i < a.rows(); ++i) {
    for (index_t j = 0; j < a.cols(); ++j) {
      const double re = next_value(in);
      const double im = f == Field::complex ? next_value(in) : 0.0;
      a(i, j) = {re, im};
    }
  }
  expect_end(in);
  return a;
}

Matrix read_matrix_market(std::istream& in, const std::string& header) {
  std::istringstream h(header);
  std::string banner, object, format, field, symmetry;
  h >> banner >> object >> format >> field >> symmetry;
  if (lower(object) != "matrix" || lower(format) != "array") {
    throw ParseError("only MatrixMarket dense 'matrix array' files are supported");
  }
  const Field f = parse_field(field);
  if (!symmetry.empty() && lower(symmetry) != "general") {
    throw ParseError("only 'general' MatrixMarket symmetry is supported");
  }
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '%') continue;
    break;
  }
  std::istringstream sz(line);
  std::string rows, cols, extra;
  if (!(sz >> rows >> cols) || (sz >> extra)) throw ParseError("malformed MatrixMarket size line");
  Matrix a(parse_dim(rows), parse_dim(cols));
  for (index_t j = 0; j < a.cols(); ++j) {
    for (index_t i = 0; i < a.rows(); ++i) {
      const double re = next_value(in);
      const double im = f == Field::complex ? next_value(in) : 0.0;
      a(i, j) = {re, im};
    }
  }
  expect_end(in);
  return a;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Matrix read_matrix(std::istream& in) {
  std::string header;
  while (std::getline(in, header)) {
    if (header.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  if (!in && header.empty()) throw ParseError("empty input");
  if (header.rfind("%%MatrixMarket", 0) == 0) return read_matrix_market(in, header);
  std::istringstream h(header);
  std::string magic;
  h >> magic;
  if (magic == "cmat") return read_cmat(in, header);
  throw ParseError("unrecognized header: '" + header + "'");
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return read_matrix(in);
}

void write_cmat(std::ostream& out, const Matrix& a, Field field) {
  out << "cmat " << a.rows() << ' ' << a.cols() << ' ' << (field == Field::complex ? "complex" : "real") << '\n';
  for (index_t i = 0; i < a.rows(); ++i) {
    for (index_t j = 0; j < a.cols(); ++j) {
      if (j > 0) out << ' ';
      out << format_double(a(i, j).real());
      if (field == Field::complex) out << ' ' << format_double(a(i, j).imag());
    }
    out << '\n';
  }
}

void write_cmat_file(const std::string& path, const Matrix& a, Field field) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  write_cmat(out, a, field);
  if (!out) throw ParseError("write failed for '" + path + "'");
}

Matrix column(const std::vector<double>& v) {
  Matrix a(static_cast<index_t>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) a(static_cast<index_t>(i), 0) = v[i];
  return a;
}

}  // namespace csdk::io
