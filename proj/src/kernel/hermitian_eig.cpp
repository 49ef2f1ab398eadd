#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "csdk/errors.hpp"
#include "csdk/factor.hpp"

namespace csdk {

namespace {

struct Tridiagonal {
  std::vector<double> d;  // diagonal
  std::vector<double> e;  // e[i] couples i and i+1; e[n-1] = 0
  Matrix q;               // A = Q T Q^* when accumulated
};

// Householder reduction of a Hermitian matrix to real symmetric tridiagonal
// form. The complex subdiagonal is made real by a diagonal unitary scaling,
// which is folded into Q.
Tridiagonal tridiagonalize(const Matrix& input, bool want_q) {
  const index_t n = input.rows();
  Matrix a = hermitian_part(input);
  struct Step {
    index_t k;
    double beta;
    std::vector<cplx> v;
  };
  std::vector<Step> steps;

  for (index_t k = 0; k + 2 < n; ++k) {
    const index_t len = n - k - 1;
    double xnorm = 0.0;
    for (index_t i = 0; i < len; ++i) xnorm = std::hypot(xnorm, std::abs(a(k + 1 + i, k)));
    if (xnorm == 0.0) continue;
    const cplx x0 = a(k + 1, k);
    const cplx phase = std::abs(x0) == 0.0 ? cplx{1.0} : x0 / std::abs(x0);
    const cplx alpha = -phase * xnorm;
    std::vector<cplx> v(static_cast<std::size_t>(len));
    for (index_t i = 0; i < len; ++i) v[static_cast<std::size_t>(i)] = a(k + 1 + i, k);
    v[0] -= alpha;
    double vn = 0.0;
    for (const cplx& z : v) vn += std::norm(z);
    const double beta = 2.0 / vn;

    // Trailing block update A22 <- H A22 H with H = I - beta v v^*.
    const index_t o = k + 1;
    std::vector<cplx> p(static_cast<std::size_t>(len), cplx{});
    for (index_t j = 0; j < len; ++j) {
      const cplx vj = v[static_cast<std::size_t>(j)];
      if (vj == cplx{}) continue;
      for (index_t i = 0; i < len; ++i) p[static_cast<std::size_t>(i)] += a(o + i, o + j) * vj;
    }
    cplx vp = 0.0;
    for (index_t i = 0; i < len; ++i) {
      p[static_cast<std::size_t>(i)] *= beta;
      vp += std::conj(v[static_cast<std::size_t>(i)]) * p[static_cast<std::size_t>(i)];
    }
    const cplx kk = 0.5 * beta * vp;
    std::vector<cplx> w(static_cast<std::size_t>(len));
    for (index_t i = 0; i < len; ++i) w[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(i)] - kk * v[static_cast<std::size_t>(i)];
    for (index_t j = 0; j < len; ++j) {
      const cplx vj = std::conj(v[static_cast<std::size_t>(j)]);
      const cplx wj = std::conj(w[static_cast<std::size_t>(j)]);
      for (index_t i = 0; i < len; ++i) {
        a(o + i, o + j) -= v[static_cast<std::size_t>(i)] * wj + w[static_cast<std::size_t>(i)] * vj;
      }
    }
    a(o, k) = alpha;
    a(k, o) = std::conj(alpha);
    for (index_t i = 1; i < len; ++i) {
      a(o + i, k) = 0.0;
      a(k, o + i) = 0.0;
    }
    steps.push_back({k, beta, std::move(v)});
  }

  Tridiagonal t;
  t.d.resize(static_cast<std::size_t>(n));
  t.e.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<cplx> scale(static_cast<std::size_t>(n), cplx{1.0});
  for (index_t i = 0; i < n; ++i) t.d[static_cast<std::size_t>(i)] = a(i, i).real();
  for (index_t i = 0; i + 1 < n; ++i) {
    const cplx sub = a(i + 1, i);
    const double mag = std::abs(sub);
    t.e[static_cast<std::size_t>(i)] = mag;
    scale[static_cast<std::size_t>(i + 1)] =
        mag == 0.0 ? scale[static_cast<std::size_t>(i)] : scale[static_cast<std::size_t>(i)] * (sub / mag);
  }

  if (want_q) {
    Matrix q = Matrix::identity(n);
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
      const index_t o = it->k + 1;
      const auto len = static_cast<index_t>(it->v.size());
      for (index_t j = o; j < n; ++j) {
        cplx s = 0.0;
        for (index_t i = 0; i < len; ++i) s += std::conj(it->v[static_cast<std::size_t>(i)]) * q(o + i, j);
        s *= it->beta;
        for (index_t i = 0; i < len; ++i) q(o + i, j) -= s * it->v[static_cast<std::size_t>(i)];
      }
    }
    for (index_t j = 0; j < n; ++j)
      for (auto& z : q.col(j)) z *= scale[static_cast<std::size_t>(j)];
    t.q = std::move(q);
  }
  return t;
}

// Implicit-shift QL on a symmetric tridiagonal matrix. When z is non-null its
// columns are rotated along (real rotations applied to complex columns).
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, Matrix* z) {
  const auto n = static_cast<index_t>(d.size());
  constexpr int max_iter = 60;
  auto D = [&](index_t i) -> double& { return d[static_cast<std::size_t>(i)]; };
  auto E = [&](index_t i) -> double& { return e[static_cast<std::size_t>(i)]; };

  for (index_t l = 0; l < n; ++l) {
    int iter = 0;
    index_t m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(D(m)) + std::abs(D(m + 1));
        if (std::abs(E(m)) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m == l) break;
      if (++iter > max_iter) throw ConvergenceError("hermitian_eig: QL iteration did not converge");

      double g = (D(l + 1) - D(l)) / (2.0 * E(l));
      double r = std::hypot(g, 1.0);
      g = D(m) - D(l) + E(l) / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool deflated = false;
      for (index_t i = m - 1; i >= l; --i) {
        const double f = s * E(i);
        const double b = c * E(i);
        r = std::hypot(f, g);
        E(i + 1) = r;
        if (r == 0.0) {
          D(i + 1) -= p;
          E(m) = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = D(i + 1) - p;
        r = (D(i) - g) * s + 2.0 * c * b;
        p = s * r;
        D(i + 1) = g + p;
        g = c * r - b;
        if (z) {
          cplx* zi = z->col_ptr(i);
          cplx* zi1 = z->col_ptr(i + 1);
          for (index_t k = 0; k < z->rows(); ++k) {
            const cplx t = zi1[k];
            zi1[k] = s * zi[k] + c * t;
            zi[k] = c * zi[k] - s * t;
          }
        }
      }
      if (deflated) continue;
      D(l) -= p;
      E(l) = g;
      E(m) = 0.0;
    } while (m != l);
  }
}

}  // namespace

HermitianEig hermitian_eig(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("hermitian_eig: matrix not square");
  const index_t n = a.rows();
  Tridiagonal t = tridiagonalize(a, true);
  tridiagonal_ql(t.d, t.e, &t.q);

  std::vector<index_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), index_t{0});
  std::stable_sort(order.begin(), order.end(), [&](index_t x, index_t y) {
    return t.d[static_cast<std::size_t>(x)] < t.d[static_cast<std::size_t>(y)];
  });
  HermitianEig out;
  out.values.resize(static_cast<std::size_t>(n));
  out.vectors = Matrix(n, n);
  for (index_t j = 0; j < n; ++j) {
    const index_t src = order[static_cast<std::size_t>(j)];
    out.values[static_cast<std::size_t>(j)] = t.d[static_cast<std::size_t>(src)];
    std::copy_n(t.q.col_ptr(src), n, out.vectors.col_ptr(j));
  }
  return out;
}

std::vector<double> hermitian_eigvalues(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("hermitian_eigvalues: matrix not square");
  Tridiagonal t = tridiagonalize(a, false);
  tridiagonal_ql(t.d, t.e, nullptr);
  std::sort(t.d.begin(), t.d.end());
  return t.d;
}

}  // namespace csdk
