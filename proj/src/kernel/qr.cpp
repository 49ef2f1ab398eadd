#include <algorithm>
#include <cmath>

#include "csdk/errors.hpp"
#include "csdk/factor.hpp"

namespace csdk {

namespace {

// Elementary reflector H = I - beta v v^*, acting on rows [k, m).
struct Reflector {
  index_t k = 0;
  double beta = 0.0;
  std::vector<cplx> v;
};

void apply_reflector(const Reflector& h, Matrix& a, index_t first_col) {
  if (h.beta == 0.0) return;
  const auto len = static_cast<index_t>(h.v.size());
  for (index_t j = first_col; j < a.cols(); ++j) {
    cplx* aj = a.col_ptr(j) + h.k;
    cplx s = 0.0;
    for (index_t i = 0; i < len; ++i) s += std::conj(h.v[static_cast<std::size_t>(i)]) * aj[i];
    s *= h.beta;
    if (s == cplx{}) continue;
    for (index_t i = 0; i < len; ++i) aj[i] -= s * h.v[static_cast<std::size_t>(i)];
  }
}

double tail_norm(const Matrix& a, index_t j, index_t from) {
  double scale = 0.0;
  double ssq = 1.0;
  for (index_t i = from; i < a.rows(); ++i) {
    for (const double x : {a(i, j).real(), a(i, j).imag()}) {
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

// Householder triangularization in place. On return the upper triangle of
// `a` holds R (before the phase pass). With pivoting, columns are swapped so
// that the largest remaining column is eliminated first.
std::vector<Reflector> triangularize(Matrix& a, std::vector<index_t>* perm) {
  const index_t m = a.rows();
  const index_t n = a.cols();
  const index_t steps = std::min(m, n);
  std::vector<Reflector> hs;
  hs.reserve(static_cast<std::size_t>(steps));
  if (perm) {
    perm->resize(static_cast<std::size_t>(n));
    for (index_t j = 0; j < n; ++j) (*perm)[static_cast<std::size_t>(j)] = j;
  }

  for (index_t k = 0; k < steps; ++k) {
    if (perm) {
      index_t best = k;
      double best_norm = -1.0;
      for (index_t j = k; j < n; ++j) {
        const double nj = tail_norm(a, j, k);
        if (nj > best_norm) {
          best_norm = nj;
          best = j;
        }
      }
      if (best != k) {
        std::swap_ranges(a.col_ptr(k), a.col_ptr(k) + m, a.col_ptr(best));
        std::swap((*perm)[static_cast<std::size_t>(k)], (*perm)[static_cast<std::size_t>(best)]);
      }
    }

    Reflector h;
    h.k = k;
    const double xnorm = tail_norm(a, k, k);
    if (xnorm == 0.0) {
      hs.push_back(std::move(h));
      continue;
    }
    const cplx x0 = a(k, k);
    const cplx phase = std::abs(x0) == 0.0 ? cplx{1.0} : x0 / std::abs(x0);
    const cplx alpha = -phase * xnorm;
    h.v.assign(a.col_ptr(k) + k, a.col_ptr(k) + m);
    h.v[0] -= alpha;
    double vnorm2 = 0.0;
    for (const cplx& z : h.v) vnorm2 += std::norm(z);
    h.beta = 2.0 / vnorm2;

    a(k, k) = alpha;
    for (index_t i = k + 1; i < m; ++i) a(i, k) = 0.0;
    apply_reflector(h, a, k + 1);
    hs.push_back(std::move(h));
  }
  return hs;
}

// Accumulates the first q_cols columns of H_0 H_1 ... H_{s-1}.
Matrix form_q(const std::vector<Reflector>& hs, index_t m, index_t q_cols) {
  Matrix q = Matrix::identity(m, q_cols);
  for (auto it = hs.rbegin(); it != hs.rend(); ++it) apply_reflector(*it, q, std::min(it->k, q_cols));
  return q;
}

// Makes diag(R) real nonnegative by moving unit-modulus phases into Q.
void fix_phases(Matrix& q, Matrix& r) {
  for (index_t k = 0; k < std::min(r.rows(), r.cols()); ++k) {
    const double mag = std::abs(r(k, k));
    if (mag == 0.0) {
      r(k, k) = 0.0;
      continue;
    }
    const cplx d = r(k, k) / mag;
    for (index_t j = k + 1; j < r.cols(); ++j) r(k, j) *= std::conj(d);
    r(k, k) = mag;
    if (k < q.cols()) {
      for (auto& v : q.col(k)) v *= d;
    }
  }
}

Matrix upper_part(const Matrix& a, index_t rows) {
  Matrix r(rows, a.cols());
  for (index_t j = 0; j < a.cols(); ++j)
    for (index_t i = 0; i <= std::min(j, rows - 1); ++i) r(i, j) = a(i, j);
  return r;
}

}  // namespace

QrFactors qr_factor(const Matrix& a) {
  if (a.rows() < a.cols()) throw DimensionError("qr_factor: requires rows >= cols");
  Matrix work = a;
  const auto hs = triangularize(work, nullptr);
  QrFactors f{form_q(hs, a.rows(), a.cols()), upper_part(work, a.cols())};
  fix_phases(f.q, f.r);
  return f;
}

Matrix qr_r_factor(const Matrix& a) {
  if (a.rows() < a.cols()) throw DimensionError("qr_r_factor: requires rows >= cols");
  Matrix work = a;
  triangularize(work, nullptr);
  Matrix r = upper_part(work, a.cols());
  Matrix dummy;
  fix_phases(dummy, r);
  return r;
}

PivotedQr qr_pivoted(const Matrix& a) {
  Matrix work = a;
  PivotedQr f;
  const auto hs = triangularize(work, &f.perm);
  f.q = form_q(hs, a.rows(), a.rows());
  f.r = upper_part(work, a.rows());
  fix_phases(f.q, f.r);
  return f;
}

}  // namespace csdk
