#include "csdk/symeig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "csdk/config.hpp"
#include "csdk/errors.hpp"
#include "csdk/factor.hpp"
#include "csdk/polar.hpp"

namespace csdk {

namespace {

constexpr index_t base_case = 4;
constexpr int max_depth = 64;

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double hi = v[mid];
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

std::vector<double> real_diag(const Matrix& b) {
  std::vector<double> d(static_cast<std::size_t>(b.rows()));
  for (index_t i = 0; i < b.rows(); ++i) d[static_cast<std::size_t>(i)] = b(i, i).real();
  return d;
}

// Sorts eigenpairs ascending (stable, so equal eigenvalues keep block order).
SymEigResult sorted(std::vector<double> lambda, const Matrix& v, EigMethod method) {
  const auto n = static_cast<index_t>(lambda.size());
  std::vector<index_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), index_t{0});
  std::stable_sort(order.begin(), order.end(), [&](index_t x, index_t y) {
    return lambda[static_cast<std::size_t>(x)] < lambda[static_cast<std::size_t>(y)];
  });
  SymEigResult r;
  r.method = method;
  r.v = Matrix(v.rows(), n);
  r.lambda.resize(static_cast<std::size_t>(n));
  for (index_t j = 0; j < n; ++j) {
    const index_t src = order[static_cast<std::size_t>(j)];
    r.lambda[static_cast<std::size_t>(j)] = lambda[static_cast<std::size_t>(src)];
    std::copy_n(v.col_ptr(src), v.rows(), r.v.col_ptr(j));
  }
  return r;
}

// Raw recursion: no phase normalization, so that it is applied once at the end.
SymEigResult sdc_recursive(const Matrix& b, int depth, SdcTrace* trace) {
  const index_t n = b.rows();
  auto direct = [&] {
    if (trace) ++trace->direct_blocks;
    const HermitianEig e = hermitian_eig(b);
    return SymEigResult{e.vectors, e.values, EigMethod::sdc};
  };
  if (n <= base_case || depth >= max_depth) return direct();

  const std::vector<double> d = real_diag(b);
  const double nb = norm_fro(b);
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  if (nb == 0.0 || norm_fro(shift_diagonal(b, -mean)) <= sdc_decoupling_tolerance(n) * nb) {
    return direct();
  }

  for (const double s : {median(d), mean}) {
    SpectralSplit sp;
    try {
      sp = spectral_split(b, s);
    } catch (const ConvergenceError&) {
      if (trace) ++trace->failed_shifts;
      continue;
    }
    if (sp.nplus == 0 || sp.nplus == n || sp.decoupling > sdc_decoupling_tolerance(n) * nb) {
      if (trace) ++trace->failed_shifts;
      continue;
    }
    if (trace) {
      trace->splits.push_back({n, sp.nplus, s, sp.projector_defect, sp.decoupling, nb});
    }
    const Matrix bminus = hermitian_part(matmul(sp.vminus, b * sp.vminus, Op::adjoint));
    const Matrix bplus = hermitian_part(matmul(sp.vplus, b * sp.vplus, Op::adjoint));
    const SymEigResult lo = sdc_recursive(bminus, depth + 1, trace);
    const SymEigResult hi = sdc_recursive(bplus, depth + 1, trace);

    std::vector<double> lambda = lo.lambda;
    lambda.insert(lambda.end(), hi.lambda.begin(), hi.lambda.end());
    const Matrix v = hstack(sp.vminus * lo.v, sp.vplus * hi.v);
    return sorted(std::move(lambda), v, EigMethod::sdc);
  }
  return direct();
}

}  // namespace

double sdc_decoupling_tolerance(index_t n) { return Tolerance{}.scaled(n); }

void normalize_phases(Matrix& v) {
  for (index_t j = 0; j < v.cols(); ++j) {
    auto col = v.col(j);
    double best = -1.0;
    std::size_t at = 0;
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (std::abs(col[i]) > best) {
        best = std::abs(col[i]);
        at = i;
      }
    }
    if (best <= 0.0) continue;
    const cplx phase = std::conj(col[at]) / best;
    for (auto& z : col) z *= phase;
    col[at] = best;
  }
}

SpectralSplit spectral_split(const Matrix& b, double s) {
  if (b.rows() != b.cols()) throw DimensionError("spectral_split: matrix not square");
  const index_t n = b.rows();
  const Matrix shifted = shift_diagonal(hermitian_part(b), -s);
  const PolarFactors pf = polar_iterative(shifted);
  // The polar factor of a Hermitian matrix is Hermitian; enforce it exactly.
  Matrix p = shift_diagonal(hermitian_part(pf.w), 1.0) * 0.5;

  SpectralSplit sp;
  sp.projector_defect = norm_fro(p * p - p);
  sp.nplus = std::clamp<index_t>(static_cast<index_t>(std::lround(p.trace().real())), 0, n);
  const PivotedQr f = qr_pivoted(p);
  sp.vplus = f.q.cols_range(0, sp.nplus);
  sp.vminus = f.q.cols_range(sp.nplus, n - sp.nplus);
  sp.decoupling = sp.nplus == 0 || sp.nplus == n
                      ? 0.0
                      : norm_fro(matmul(sp.vminus, b * sp.vplus, Op::adjoint));
  return sp;
}

SymEigResult symeig_sdc(const Matrix& b, SdcTrace* trace) {
  if (b.rows() != b.cols()) throw DimensionError("symeig_sdc: matrix not square");
  SymEigResult r = sdc_recursive(hermitian_part(b), 0, trace);
  normalize_phases(r.v);
  return r;
}

SymEigResult symeig_direct(const Matrix& b) {
  if (b.rows() != b.cols()) throw DimensionError("symeig_direct: matrix not square");
  HermitianEig e = hermitian_eig(b);
  normalize_phases(e.vectors);
  return {std::move(e.vectors), std::move(e.values), EigMethod::direct};
}

SymEigResult symeig(const Matrix& b, EigMethod method) {
  return method == EigMethod::sdc ? symeig_sdc(b) : symeig_direct(b);
}

IntervalEig symeig_interval(const Matrix& b, double lo, double hi, EigMethod method) {
  if (b.rows() != b.cols()) throw DimensionError("symeig_interval: matrix not square");
  const index_t n = b.rows();
  const Matrix bh = hermitian_part(b);
  const double nb = norm_fro(bh);
  const double tol = Tolerance{}.scaled(n) * std::max(nb, 1.0);

  const SpectralSplit sp = spectral_split(bh, hi + 0.1);
  if (sp.decoupling > sdc_decoupling_tolerance(n) * std::max(nb, 1.0)) {
    throw PreconditionError("symeig_interval: split point too close to an eigenvalue");
  }
  IntervalEig out;
  if (sp.nplus == n) {
    out.v = Matrix(n, 0);
    return out;
  }
  const Matrix block = hermitian_part(matmul(sp.vminus, bh * sp.vminus, Op::adjoint));
  const SymEigResult e = symeig(block, method);
  std::vector<index_t> keep;
  for (index_t j = 0; j < block.rows(); ++j) {
    const double l = e.lambda[static_cast<std::size_t>(j)];
    if (l >= lo - tol && l <= hi + tol) keep.push_back(j);
  }
  Matrix sel(block.rows(), static_cast<index_t>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    std::copy_n(e.v.col_ptr(keep[k]), block.rows(), sel.col_ptr(static_cast<index_t>(k)));
    out.lambda.push_back(e.lambda[static_cast<std::size_t>(keep[k])]);
  }
  out.v = sp.vminus * sel;
  normalize_phases(out.v);
  return out;
}

}  // namespace csdk
