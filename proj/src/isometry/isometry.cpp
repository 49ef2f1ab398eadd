#include "csdk/isometry.hpp"

#include <algorithm>
#include <cmath>

#include "csdk/config.hpp"
#include "csdk/errors.hpp"
#include "csdk/factor.hpp"

namespace csdk {

double dist_from_singular_values(const std::vector<double>& sigma) {
  double d = 0.0;
  for (const double s : sigma) d = std::max(d, std::min(s, std::abs(1.0 - s)));
  return d;
}

double dist_to_partial_isometry(const Matrix& a) { return dist_from_singular_values(singular_values(a)); }

index_t eps_rank_from_singular_values(const std::vector<double>& sigma, double eps, NormKind norm) {
  if (eps < 0.0) throw PreconditionError("eps_rank: eps must be nonnegative");
  const auto n = static_cast<index_t>(sigma.size());
  if (norm == NormKind::spectral) {
    return static_cast<index_t>(std::count_if(sigma.begin(), sigma.end(), [&](double s) { return s > eps; }));
  }
  // Tail sums from the smallest singular value up.
  double tail = 0.0;
  index_t r = n;
  while (r > 0) {
    const double next = std::hypot(tail, sigma[static_cast<std::size_t>(r - 1)]);
    if (next > eps) break;
    tail = next;
    --r;
  }
  return r;
}

index_t eps_rank(const Matrix& a, double eps, NormKind norm) {
  return eps_rank_from_singular_values(singular_values(a), eps, norm);
}

Matrix truncated_polar_factor(const Matrix& a, index_t r) {
  const SvdFactors f = svd_factor(a);
  if (r <= 0) return Matrix(a.rows(), a.cols());
  return matmul(f.p.cols_range(0, r), f.q.cols_range(0, r), Op::none, Op::adjoint);
}

double norm_of(const Matrix& a, NormKind norm) { return norm == NormKind::spectral ? norm2(a) : norm_fro(a); }

SandwichBounds isometry_sandwich(const Matrix& a, NormKind norm, double rank_tol) {
  const std::vector<double> sigma = singular_values(a);
  SandwichBounds b;
  if (sigma.empty() || sigma.front() == 0.0) return b;
  if (rank_tol < 0.0) {
    rank_tol = 1e3 * static_cast<double>(std::max(a.rows(), a.cols())) * unit_roundoff * sigma.front();
  }
  b.rank = eps_rank_from_singular_values(sigma, rank_tol);
  const double s1 = sigma.front();
  const double sr = sigma[static_cast<std::size_t>(b.rank - 1)];
  const double num = norm_of(a * a.adjoint() * a - a, norm);
  b.lower = num / (s1 * (1.0 + s1));
  b.upper = num / (sr * (1.0 + sr));
  b.middle = norm_of(a - truncated_polar_factor(a, b.rank), norm);
  return b;
}

double nearby_isometry_bound(const Matrix& a, double eps, NormKind norm) {
  const std::vector<double> sigma = singular_values(a);
  const index_t r = eps_rank_from_singular_values(sigma, eps, norm);
  if (r == 0) throw PreconditionError("nearby_isometry_bound: eps-rank is zero");
  const double s1 = sigma.front();
  const double sr = sigma[static_cast<std::size_t>(r - 1)];
  if (sr == 0.0) throw PreconditionError("nearby_isometry_bound: sigma_r is zero");
  const double num = norm_of(a * a.adjoint() * a - a, norm);
  return eps + (num + eps * (1.0 + 3.0 * s1 * s1)) / (sr * (1.0 + sr));
}

StabilityReport stability_report(const Matrix& a, const CsdResult& result) {
  StabilityReport rep;
  rep.n = a.cols();
  rep.k = result.k();
  rep.residual_2norm = norm2(reconstruct(result) - a);
  rep.d_of_a = dist_to_partial_isometry(a);
  rep.scaled_residual = rep.residual_2norm / std::max(rep.d_of_a, unit_roundoff);
  rep.orth_u1 = orth_defect_2(result.u1) / unit_roundoff;
  rep.orth_u2 = orth_defect_2(result.u2) / unit_roundoff;
  rep.orth_v1 = orth_defect_2(result.v1) / unit_roundoff;
  for (std::size_t i = 0; i < result.c.size(); ++i) {
    const double e = std::abs(result.c[i] * result.c[i] + result.s[i] * result.s[i] - 1.0);
    rep.cs_identity_err = std::max(rep.cs_identity_err, e);
  }
  return rep;
}

}  // namespace csdk
