#include "csdk/polar.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "csdk/config.hpp"
#include "csdk/errors.hpp"
#include "csdk/factor.hpp"

namespace csdk {

namespace {

constexpr double ell_floor = 1e-20;
// The inverse-iteration estimate approaches sigma_min from above; dividing by
// this factor keeps ell a lower bound in practice.
constexpr double ell_safety = 3.0;

void require_tall(const Matrix& a, const char* who) {
  if (a.rows() < a.cols()) throw DimensionError(std::string(who) + ": requires rows >= cols");
}

// x (x^* x + gamma I)^{-1}, through the QR factorization of [x; sqrt(gamma) I].
Matrix resolvent_qr(const Matrix& x, double gamma) {
  const index_t m = x.rows();
  const index_t n = x.cols();
  const double sg = std::sqrt(gamma);
  const QrFactors f = qr_factor(vstack(x, Matrix::identity(n) * sg));
  const Matrix q1 = f.q.rows_range(0, m);
  const Matrix q2 = f.q.rows_range(m, n);
  return matmul(q1, q2, Op::none, Op::adjoint) * (1.0 / sg);
}

// Same quantity through the Cholesky factor of x^* x + gamma I.
Matrix resolvent_cholesky(const Matrix& x, double gamma) {
  const Matrix r = cholesky_factor(shift_diagonal(gram(x), gamma));
  const Matrix y = solve_triangular(r, x, Side::right, Uplo::upper, Op::none);
  return solve_triangular(r, y, Side::right, Uplo::upper, Op::adjoint);
}

Matrix apply_matrix_step(const Matrix& x, const RationalStep& step, bool allow_cholesky) {
  const auto terms_count = static_cast<int>(step.beta.size());
  std::vector<Matrix> terms(static_cast<std::size_t>(terms_count));
#pragma omp parallel for schedule(static) num_threads(thread_limit()) if (terms_count > 1)
  for (int j = 0; j < terms_count; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    Matrix t;
    if (allow_cholesky) {
      try {
        t = resolvent_cholesky(x, step.gamma[jj]);
      } catch (const NotPositiveDefinite&) {
        t = resolvent_qr(x, step.gamma[jj]);
      }
    } else {
      t = resolvent_qr(x, step.gamma[jj]);
    }
    terms[jj] = t * step.beta[jj];
  }
  Matrix out = x * step.alpha;
  for (const auto& t : terms) out += t;
  return out;
}

struct Prepared {
  double scale;
  double sigma_min;  // of the scaled matrix
  double ell;
};

Prepared prepare(const Matrix& a, const SignApproxParams& params) {
  Prepared p{};
  // Both bounds dominate sigma_max; the second is exact for diagonal input.
  p.scale = params.scale > 0.0 ? params.scale : std::min(norm_fro(a), std::sqrt(norm1(a) * norm_inf(a)));
  if (p.scale == 0.0) return p;
  p.sigma_min = estimate_sigma_min(a * (1.0 / p.scale));
  p.ell = params.ell > 0.0 ? params.ell : std::clamp(p.sigma_min / ell_safety, ell_floor, 1.0);
  return p;
}

PolarFactors finish(const Matrix& a, Matrix w, PolarMode mode, PolarMethod method) {
  PolarFactors f;
  f.h = hermitian_part(matmul(w, a, Op::adjoint));
  f.w = std::move(w);
  f.mode = mode;
  f.method = method;
  return f;
}

PolarFactors zero_input(index_t m, index_t n, PolarMethod method) {
  PolarFactors f;
  f.w = Matrix::identity(m, n);
  f.h = Matrix(n, n);
  f.method = method;
  return f;
}

PolarFactors run_iterative(const Matrix& a, const SignApproxParams& params, const Prepared& prep) {
  const index_t n = a.cols();
  const PolarMethod method = params.p == 1 ? PolarMethod::qdwh : PolarMethod::zolo;
  if (prep.scale == 0.0) return zero_input(a.rows(), n, method);
  if (prep.sigma_min == 0.0 && params.ell <= 0.0) {
    throw ConvergenceError("polar_iterative: input is numerically singular");
  }

  SignApproxParams run = params;
  run.ell = prep.ell;
  Matrix x = a * (1.0 / prep.scale);
  const bool adaptive = params.p == 1 && params.iterations == 0;
  // Cubic convergence: once consecutive iterates differ by u^(1/3), the
  // latest one is accurate to O(u).
  const double stagnation = std::cbrt(5.0 * unit_roundoff);
  int iterations = 0;
  for (const auto& step : sign_schedule(run)) {
    Matrix next = apply_matrix_step(x, step, params.p == 1 && step.ell_in >= 0.1);
    const double change = norm_fro(next - x);
    x = std::move(next);
    ++iterations;
    if (adaptive && change <= stagnation) break;
  }

  const double tol = Tolerance{}.scaled(n);
  while (orth_defect_fro(x) > tol) {
    // ell was an overestimate; keep iterating from a fresh estimate.
    if (!adaptive || iterations >= qdwh_iteration_cap) {
      throw ConvergenceError("polar_iterative: iterate did not become orthonormal");
    }
    const double ell = std::clamp(estimate_sigma_min(x) / ell_safety, ell_floor, 1.0);
    const RationalStep step = dwh_step(ell);
    x = apply_matrix_step(x, step, ell >= 0.1);
    ++iterations;
  }

  PolarFactors f = finish(a, std::move(x), PolarMode::exact, method);
  f.sigma_min_estimate = prep.sigma_min * prep.scale;
  f.iterations = iterations;
  f.p = params.p;
  return f;
}

}  // namespace

double estimate_sigma_min(const Matrix& a) {
  require_tall(a, "estimate_sigma_min");
  const index_t n = a.cols();
  if (n == 0) return 0.0;
  const Matrix r = qr_r_factor(a);
  double diag_min = std::abs(r(0, 0));
  for (index_t i = 1; i < n; ++i) diag_min = std::min(diag_min, std::abs(r(i, i)));
  if (diag_min == 0.0) return 0.0;

  Matrix x(n, 1);
  for (index_t i = 0; i < n; ++i) x(i, 0) = 1.0 + static_cast<double>(i) / static_cast<double>(n);
  x *= 1.0 / norm_fro(x);
  double est = diag_min;
  for (int it = 0; it < 6; ++it) {
    const Matrix y = solve_triangular(r, x, Side::left, Uplo::upper, Op::adjoint);
    const Matrix z = solve_triangular(r, y, Side::left, Uplo::upper, Op::none);
    const double nz = norm_fro(z);
    if (!std::isfinite(nz)) return 0.0;
    est = std::min(est, 1.0 / std::sqrt(nz));
    x = z * (1.0 / nz);
  }
  return est;
}

PolarFactors polar_svd(const Matrix& a) {
  require_tall(a, "polar_svd");
  const SvdFactors s = svd_factor(a);
  PolarFactors f;
  f.w = matmul(s.p, s.q, Op::none, Op::adjoint);
  f.h = hermitian_part(matmul(scale_columns(s.q, s.sigma), s.q, Op::none, Op::adjoint));
  f.mode = PolarMode::exact;
  f.method = PolarMethod::svd;
  f.sigma_min_estimate = s.sigma.empty() ? 0.0 : s.sigma.back();
  return f;
}

PolarFactors polar_iterative(const Matrix& a, SignApproxParams params) {
  require_tall(a, "polar_iterative");
  if (params.p < 1 || params.p > 8) throw PreconditionError("polar_iterative: p must be in [1, 8]");
  return run_iterative(a, params, prepare(a, params));
}

PolarFactors polar_modified(const Matrix& a, double epsilon, SignApproxParams params) {
  require_tall(a, "polar_modified");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("polar_modified: epsilon must lie in (0, 1)");
  const PolarMethod method = params.p == 1 ? PolarMethod::qdwh : PolarMethod::zolo;
  const double scale = params.scale > 0.0 ? params.scale : std::max(1.0, norm2(a));
  params.ell = params.ell > 0.0 ? params.ell : epsilon;

  Matrix x = a * (1.0 / scale);
  int iterations = 0;
  // The iterate keeps singular values near zero, so the QR form is used throughout.
  for (const auto& step : sign_schedule(params)) {
    x = apply_matrix_step(x, step, false);
    ++iterations;
  }
  PolarFactors f = finish(a, std::move(x), PolarMode::interval_modified, method);
  f.iterations = iterations;
  f.p = params.p;
  return f;
}

PolarFactors polar(const Matrix& a, PolarMethod method) {
  switch (method) {
    case PolarMethod::svd: return polar_svd(a);
    case PolarMethod::qdwh: return polar_iterative(a, {.p = 1});
    case PolarMethod::zolo: {
      require_tall(a, "polar");
      SignApproxParams params{.p = 8, .iterations = 2};
      const Prepared prep = prepare(a, params);
      params.p = prep.scale == 0.0 ? 1 : choose_zolo_degree(prep.ell);
      return run_iterative(a, params, prep);
    }
  }
  throw PreconditionError("polar: unknown method");
}

CanonicalPolar canonical_polar(const Matrix& a, double rank_tol) {
  const SvdFactors s = svd_factor(a);
  index_t r = 0;
  while (r < static_cast<index_t>(s.sigma.size()) && s.sigma[static_cast<std::size_t>(r)] > rank_tol) ++r;
  const Matrix pr = s.p.cols_range(0, r);
  const Matrix qr = s.q.cols_range(0, r);
  const std::vector<double> sr(s.sigma.begin(), s.sigma.begin() + r);
  CanonicalPolar c;
  c.rank = r;
  c.u = r == 0 ? Matrix(a.rows(), a.cols()) : matmul(pr, qr, Op::none, Op::adjoint);
  c.h = r == 0 ? Matrix(a.cols(), a.cols())
               : hermitian_part(matmul(scale_columns(qr, sr), qr, Op::none, Op::adjoint));
  return c;
}

}  // namespace csdk
