#pragma once

#include "csdk/matrix.hpp"
#include "csdk/zolotarev.hpp"

namespace csdk {

enum class PolarMethod { svd, qdwh, zolo };
enum class PolarMode { exact, interval_modified };

/// A = W H with H Hermitian positive semidefinite. In interval_modified mode W
/// is not orthonormal: singular values below epsilon are mapped into [0, 1].
struct PolarFactors {
  Matrix w;
  Matrix h;
  PolarMode mode = PolarMode::exact;
  PolarMethod method = PolarMethod::svd;
  /// Estimate of sigma_min(A) in the units of A.
  double sigma_min_estimate = 0.0;
  int iterations = 0;
  int p = 1;
};

/// W = P Q^*, H = Q Sigma Q^* from the SVD.
PolarFactors polar_svd(const Matrix& a);

/// QDWH (p = 1) or Zolotarev (p > 1) iteration. ell and the scaling are
/// estimated when the params leave them unset. Throws ConvergenceError when
/// the iterate fails to become orthonormal.
PolarFactors polar_iterative(const Matrix& a, SignApproxParams params = {});

/// Iteration on the fixed interval [epsilon, 1]; singular values below
/// epsilon are damped rather than sent to 1.
PolarFactors polar_modified(const Matrix& a, double epsilon = 1e-15,
                            SignApproxParams params = {.p = 8});

/// Dispatch by method. zolo picks p from the estimated condition number.
PolarFactors polar(const Matrix& a, PolarMethod method);

/// Upper estimate of sigma_min from the R factor: min |R_ii| refined by
/// inverse iteration on R^* R.
double estimate_sigma_min(const Matrix& a);

/// Canonical polar decomposition A = U H at numerical rank count(sigma > rank_tol).
struct CanonicalPolar {
  Matrix u;
  Matrix h;
  index_t rank = 0;
};
CanonicalPolar canonical_polar(const Matrix& a, double rank_tol);

}  // namespace csdk
