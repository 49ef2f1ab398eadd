#include "csdk/csd.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <numeric>
#include <string>

#include "csdk/config.hpp"
#include "csdk/errors.hpp"
#include "csdk/factor.hpp"
#include "csdk/isometry.hpp"

namespace csdk {

namespace {

// Runs both callables, concurrently when more than one thread is allowed.
template <class F, class G>
void run_pair(F&& f, G&& g) {
  std::exception_ptr err[2];
#pragma omp parallel sections num_threads(2) if (thread_limit() > 1)
  {
#pragma omp section
    {
      try {
        f();
      } catch (...) {
        err[0] = std::current_exception();
      }
    }
#pragma omp section
    {
      try {
        g();
      } catch (...) {
        err[1] = std::current_exception();
      }
    }
  }
  for (const auto& e : err) {
    if (e) std::rethrow_exception(e);
  }
}

SignApproxParams modified_params(PolarMethod method) {
  if (method == PolarMethod::qdwh) return {.p = 1};
  return {.p = 8, .iterations = 2};
}

QrFixedPolar qr_fix(const Matrix& ai, double epsilon, const SignApproxParams& params, double threshold) {
  const PolarFactors mod = polar_modified(ai, epsilon, params);
  const QrFactors qa = qr_factor(ai);
  const QrFactors qh = qr_factor(mod.h);
  const double nr = norm_fro(qa.r);
  QrFixedPolar out;
  out.r_agreement = nr == 0.0 ? 0.0 : norm_fro(qh.r - qa.r) / nr;
  if (threshold <= 0.0) threshold = 1e3 * static_cast<double>(ai.cols()) * unit_roundoff;
  if (!(out.r_agreement <= threshold)) {
    out.factors = polar_svd(ai);
    out.svd_fallback = true;
    return out;
  }
  out.factors = mod;
  out.factors.w = matmul(qa.q, qh.q, Op::none, Op::adjoint);
  out.factors.mode = PolarMode::exact;
  return out;
}

struct BlockPolar {
  PolarFactors f;
  bool ill_conditioned = false;
  double r_agreement = -1.0;
  bool svd_fallback = false;
};

BlockPolar full_rank_polar(const Matrix& ai, const CsdOptions& opts) {
  BlockPolar b;
  if (opts.polar_method == PolarMethod::svd) {
    b.f = polar_svd(ai);
    b.ill_conditioned = b.f.sigma_min_estimate < opts.epsilon * norm2(ai);
    return b;
  }
  auto fix = [&] {
    const QrFixedPolar q = qr_fix(ai, opts.epsilon, modified_params(opts.polar_method), 0.0);
    b.f = q.factors;
    b.ill_conditioned = true;
    b.r_agreement = q.r_agreement;
    b.svd_fallback = q.svd_fallback;
  };
  // Both denominators bound sigma_max from above, so the ratio errs towards
  // taking the ill-conditioned path.
  const double smax_bound = std::min(norm_fro(ai), std::sqrt(norm1(ai) * norm_inf(ai)));
  if (smax_bound == 0.0 || estimate_sigma_min(ai) < opts.epsilon * smax_bound) {
    fix();
    return b;
  }
  try {
    b.f = polar(ai, opts.polar_method);
  } catch (const ConvergenceError&) {
    fix();
  }
  return b;
}

struct Projected {
  CsPair cs;
  double off1;
  double off2;
};

Projected project(const Matrix& v, const Matrix& h1, const Matrix& h2) {
  const Matrix p1 = matmul(v, h1 * v, Op::adjoint);
  const Matrix p2 = matmul(v, h2 * v, Op::adjoint);
  Projected p;
  p.off1 = offdiag_norm(p1);
  p.off2 = offdiag_norm(p2);
  for (index_t i = 0; i < v.cols(); ++i) {
    p.cs.c.push_back(std::clamp(p1(i, i).real(), 0.0, 1.0));
    p.cs.s.push_back(std::clamp(p2(i, i).real(), 0.0, 1.0));
  }
  return p;
}

// Fills c, s, theta from the projections or from lambda and applies the
// trigonometric post-processing.
void assign_cs(CsdResult& r, const Projected& p, const CsdOptions& opts) {
  if (opts.cs_extraction == CsExtraction::from_lambda) {
    TrigCs t = cs_from_lambda(r.diag.lambda);
    r.c = std::move(t.c);
    r.s = std::move(t.s);
    r.theta = std::move(t.theta);
    return;
  }
  if (opts.postprocess) {
    TrigCs t = postprocess_trig(p.cs.c, p.cs.s);
    r.c = std::move(t.c);
    r.s = std::move(t.s);
    r.theta = std::move(t.theta);
    return;
  }
  r.c = p.cs.c;
  r.s = p.cs.s;
  r.theta.resize(r.c.size());
  for (std::size_t i = 0; i < r.c.size(); ++i) r.theta[i] = std::atan2(r.s[i], r.c[i]);
}

Matrix permute_columns(const Matrix& m, const std::vector<std::size_t>& order) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t j = 0; j < order.size(); ++j) {
    std::copy_n(m.col_ptr(static_cast<index_t>(order[j])), m.rows(), out.col_ptr(static_cast<index_t>(j)));
  }
  return out;
}

template <class T>
std::vector<T> permute(const std::vector<T>& v, const std::vector<std::size_t>& order) {
  std::vector<T> out;
  out.reserve(order.size());
  for (const std::size_t i : order) out.push_back(v[i]);
  return out;
}

// Angles come out ascending up to rounding; a stable sort makes it exact.
void sort_by_theta(CsdResult& r) {
  if (std::is_sorted(r.theta.begin(), r.theta.end())) return;
  std::vector<std::size_t> order(r.theta.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r.theta[a] < r.theta[b]; });
  r.u1 = permute_columns(r.u1, order);
  r.u2 = permute_columns(r.u2, order);
  r.v1 = permute_columns(r.v1, order);
  r.c = permute(r.c, order);
  r.s = permute(r.s, order);
  r.theta = permute(r.theta, order);
  if (r.diag.lambda.size() == order.size()) r.diag.lambda = permute(r.diag.lambda, order);
}

struct Prepared {
  Matrix a1;
  Matrix a2;
  std::vector<double> sigma;
  double d = 0.0;
  index_t rank_fro = 0;
  index_t rank_eps = 0;
};

Prepared prepare(const Matrix& a, index_t m1, const CsdOptions& opts) {
  const index_t m = a.rows();
  const index_t n = a.cols();
  if (n < 1) throw DimensionError("csd: A must have at least one column");
  if (m1 < n || m - m1 < n) throw DimensionError("csd: both blocks need at least n rows");
  if (!(opts.epsilon > 0.0 && opts.epsilon < 1e-8)) throw PreconditionError("csd: epsilon must lie in (0, 1e-8)");
  if (!all_finite(a)) throw PreconditionError("csd: input has non-finite entries");

  Prepared p;
  p.a1 = a.rows_range(0, m1);
  p.a2 = a.rows_range(m1, m - m1);
  p.sigma = singular_values(qr_r_factor(a));
  p.d = dist_from_singular_values(p.sigma);
  if (p.d > opts.max_distance) {
    throw InputRejected("csd: input is too far from a partial isometry (d(A) = " + std::to_string(p.d) + ")");
  }
  const double nf = norm_fro(a);
  p.rank_fro = static_cast<index_t>(std::lround(nf * nf));
  p.rank_eps = eps_rank_from_singular_values(p.sigma, 1e-8 * p.sigma.front());
  return p;
}

index_t checked_rank(const Prepared& p) {
  if (p.rank_fro != p.rank_eps) {
    throw RankInconsistency("csd: rank estimates disagree (nint(||A||_F^2) = " + std::to_string(p.rank_fro) +
                            ", eps-rank = " + std::to_string(p.rank_eps) + ")");
  }
  return p.rank_fro;
}

CsdResult full_rank(const Matrix& a, const Prepared& p, const CsdOptions& opts) {
  const index_t n = a.cols();
  BlockPolar b1;
  BlockPolar b2;
  run_pair([&] { b1 = full_rank_polar(p.a1, opts); }, [&] { b2 = full_rank_polar(p.a2, opts); });

  CsdResult r;
  r.rank = n;
  r.mu = 0.0;
  r.branch = b1.ill_conditioned || b2.ill_conditioned ? CsdBranch::ill_conditioned : CsdBranch::full_rank;
  r.diag.d_of_a = p.d;
  r.diag.rank_estimate = p.rank_fro;
  r.diag.r_agreement[0] = b1.r_agreement;
  r.diag.r_agreement[1] = b2.r_agreement;
  r.diag.svd_fallback[0] = b1.svd_fallback;
  r.diag.svd_fallback[1] = b2.svd_fallback;

  const Matrix b = opts.b_from_h1 ? b1.f.h : build_b(b1.f.h, b2.f.h, a, 0.0);
  SymEigResult e = symeig(b, opts.eig_method);
  r.v1 = std::move(e.v);
  r.diag.lambda = std::move(e.lambda);
  run_pair([&] { r.u1 = b1.f.w * r.v1; }, [&] { r.u2 = b2.f.w * r.v1; });

  const Projected proj = project(r.v1, b1.f.h, b2.f.h);
  r.diag.offdiag_h1 = proj.off1;
  r.diag.offdiag_h2 = proj.off2;
  r.diag.h1_norm2 = norm2(b1.f.h);
  r.diag.h2_norm2 = norm2(b2.f.h);
  for (std::size_t i = 0; i < proj.cs.c.size(); ++i) {
    const double c = proj.cs.c[i];
    const double s = proj.cs.s[i];
    if (c * c + s * s < 0.5) {
      throw RankInconsistency("csd: C^2 + S^2 is far from I; the input looks rank-deficient");
    }
  }
  assign_cs(r, proj, opts);
  sort_by_theta(r);
  return r;
}

CsdResult rank_deficient(const Matrix& a, const Prepared& p, index_t rank, const CsdOptions& opts) {
  const index_t n = a.cols();
  CsdResult r;
  r.rank = rank;
  r.mu = 2.0;
  r.branch = CsdBranch::rank_deficient;
  r.diag.d_of_a = p.d;
  r.diag.rank_estimate = p.rank_fro;

  const bool use_svd = opts.polar_method == PolarMethod::svd;
  const SignApproxParams params = modified_params(opts.polar_method);
  PolarFactors f[2];
  const Matrix* blocks[2] = {&p.a1, &p.a2};
  run_pair([&] { f[0] = use_svd ? polar_svd(p.a1) : polar_modified(p.a1, opts.epsilon, params); },
           [&] { f[1] = use_svd ? polar_svd(p.a2) : polar_modified(p.a2, opts.epsilon, params); });

  const Matrix b = build_b(f[0].h, f[1].h, a, 2.0);
  // A perturbation of size d(A) moves the spectrum of B off [-1, 1] by O(d(A)).
  const double slack = std::min(0.4, 10.0 * p.d);
  const IntervalEig iv = symeig_interval(b, -1.0 - slack, 1.0 + slack, opts.eig_method);
  if (static_cast<index_t>(iv.lambda.size()) != rank) {
    throw RankInconsistency("csd: found " + std::to_string(iv.lambda.size()) +
                            " eigenvalues of B in [-1, 1], expected rank " + std::to_string(rank));
  }
  r.v1 = iv.v;
  r.diag.lambda = iv.lambda;

  Matrix u[2];
  run_pair([&] { u[0] = f[0].w * r.v1; }, [&] { u[1] = f[1].w * r.v1; });
  // W~ V1r is orthonormal unless a nonzero singular value of the block fell
  // below epsilon; then the block gets the QR fix.
  const double tol = Tolerance{}.scaled(n);
  for (int i = 0; i < 2; ++i) {
    if (use_svd || orth_defect_fro(u[i]) <= tol) continue;
    const QrFixedPolar q = qr_fix(*blocks[i], opts.epsilon, params, 0.0);
    r.diag.r_agreement[i] = q.r_agreement;
    r.diag.svd_fallback[i] = q.svd_fallback;
    u[i] = q.factors.w * r.v1;
    r.branch = CsdBranch::rank_deficient_ill_conditioned;
  }
  r.u1 = std::move(u[0]);
  r.u2 = std::move(u[1]);

  const Projected proj = project(r.v1, f[0].h, f[1].h);
  r.diag.offdiag_h1 = proj.off1;
  r.diag.offdiag_h2 = proj.off2;
  r.diag.h1_norm2 = norm2(f[0].h);
  r.diag.h2_norm2 = norm2(f[1].h);
  assign_cs(r, proj, opts);
  sort_by_theta(r);
  return r;
}

CsdResult empty_result(const Matrix& a, const Prepared& p) {
  CsdResult r;
  r.u1 = Matrix(p.a1.rows(), 0);
  r.u2 = Matrix(p.a2.rows(), 0);
  r.v1 = Matrix(a.cols(), 0);
  r.mu = 2.0;
  r.branch = CsdBranch::rank_deficient;
  r.diag.d_of_a = p.d;
  return r;
}

}  // namespace

Matrix build_b(const Matrix& h1, const Matrix& h2, const Matrix& a, double mu) {
  Matrix b = h2 - h1;
  if (mu != 0.0) b += shift_diagonal(gram(a) * -1.0, 1.0) * mu;
  return hermitian_part(b);
}

CsPair extract_cs(const Matrix& v1, const Matrix& h1, const Matrix& h2) { return project(v1, h1, h2).cs; }

TrigCs postprocess_trig(const std::vector<double>& c, const std::vector<double>& s) {
  TrigCs t;
  t.c.resize(c.size());
  t.s.resize(c.size());
  t.theta.resize(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0.0 && s[i] == 0.0) continue;
    t.theta[i] = std::atan2(s[i], c[i]);
    t.c[i] = std::cos(t.theta[i]);
    t.s[i] = std::sin(t.theta[i]);
  }
  return t;
}

TrigCs cs_from_lambda(const std::vector<double>& lambda) {
  TrigCs t;
  for (const double l : lambda) {
    const double th = std::asin(std::clamp(l, -1.0, 1.0) / std::numbers::sqrt2) + std::numbers::pi / 4;
    t.theta.push_back(th);
    t.c.push_back(std::cos(th));
    t.s.push_back(std::sin(th));
  }
  return t;
}

QrFixedPolar polar_via_qr_fix(const Matrix& ai, double epsilon, SignApproxParams params, double threshold) {
  if (ai.rows() < ai.cols()) throw DimensionError("polar_via_qr_fix: requires rows >= cols");
  const double smax = norm2(ai);
  if (smax > 0.0 && estimate_sigma_min(ai) >= epsilon * smax) {
    throw PreconditionError("polar_via_qr_fix: block is not ill conditioned");
  }
  return qr_fix(ai, epsilon, params, threshold);
}

CsdResult csd(const Matrix& a, index_t m1, const CsdOptions& opts) {
  const Prepared p = prepare(a, m1, opts);
  switch (opts.rank_mode) {
    case RankMode::full: return full_rank(a, p, opts);
    case RankMode::deficient: {
      const index_t r = checked_rank(p);
      return r == 0 ? empty_result(a, p) : rank_deficient(a, p, r, opts);
    }
    case RankMode::automatic: {
      const index_t r = checked_rank(p);
      if (r == a.cols()) return full_rank(a, p, opts);
      return r == 0 ? empty_result(a, p) : rank_deficient(a, p, r, opts);
    }
  }
  throw PreconditionError("csd: unknown rank mode");
}

CsdResult csd_rank_deficient(const Matrix& a, index_t m1, const CsdOptions& opts) {
  CsdOptions o = opts;
  o.rank_mode = RankMode::deficient;
  return csd(a, m1, o);
}

Csd2x2 csd_2x2(const Matrix& a, const CsdOptions& opts) {
  if (a.rows() != a.cols() || a.rows() % 2 != 0) throw DimensionError("csd_2x2: A must be 2n x 2n");
  const index_t n = a.rows() / 2;
  if (orth_defect_2(a) > 1e-6) throw PreconditionError("csd_2x2: A is not numerically unitary");
  Csd2x2 out;
  out.left = csd(a.cols_range(0, n), n, opts);
  const CsdResult& l = out.left;
  if (l.k() != n) throw RankInconsistency("csd_2x2: left block column is rank deficient");
  const Matrix a3 = a.block(0, n, n, n);
  const Matrix a4 = a.block(n, n, n, n);
  const Matrix x = matmul(a4, scale_columns(l.u2, l.c), Op::adjoint) -
                   matmul(a3, scale_columns(l.u1, l.s), Op::adjoint);
  out.v2 = qr_factor(x).q;
  return out;
}

Matrix reconstruct(const CsdResult& r) {
  return vstack(matmul(scale_columns(r.u1, r.c), r.v1, Op::none, Op::adjoint),
                matmul(scale_columns(r.u2, r.s), r.v1, Op::none, Op::adjoint));
}

Matrix reconstruct(const Csd2x2& r) {
  const CsdResult& l = r.left;
  const Matrix left = reconstruct(l);
  const Matrix top = matmul(scale_columns(l.u1, l.s), r.v2, Op::none, Op::adjoint) * -1.0;
  const Matrix bottom = matmul(scale_columns(l.u2, l.c), r.v2, Op::none, Op::adjoint);
  return hstack(left, vstack(top, bottom));
}

const char* to_string(CsdBranch b) {
  switch (b) {
    case CsdBranch::full_rank: return "full_rank";
    case CsdBranch::ill_conditioned: return "ill_conditioned";
    case CsdBranch::rank_deficient: return "rank_deficient";
    case CsdBranch::rank_deficient_ill_conditioned: return "rank_deficient_ill_conditioned";
  }
  return "unknown";
}

const char* to_string(PolarMethod m) {
  switch (m) {
    case PolarMethod::svd: return "svd";
    case PolarMethod::qdwh: return "qdwh";
    case PolarMethod::zolo: return "zolo";
  }
  return "unknown";
}

}  // namespace csdk
