#pragma once

#include <vector>

// Rational approximations of sign(x) on [-1, -ell] U [ell, 1] used by the
// iterative polar decompositions. Each iteration applies an odd map
//
//   x -> alpha * x + sum_j beta_j * x / (x^2 + gamma_j)
//
// to the singular values; the matrix iteration evaluates exactly this form.
namespace csdk {

struct SignApproxParams {
  /// Degree parameter in [1, 8]; p = 1 is the QDWH family.
  int p = 1;
  /// Lower endpoint of [ell, 1]. Non-positive means "estimate from the input".
  double ell = 0.0;
  /// Iteration count. Zero means adaptive for p = 1 and two for p > 1.
  int iterations = 0;
  /// Divisor applied to the input before iterating. Non-positive means "estimate".
  double scale = 0.0;
};

struct RationalStep {
  double alpha = 0.0;
  std::vector<double> beta;
  std::vector<double> gamma;
  double ell_in = 0.0;   // interval [ell_in, 1] mapped into [ell_out, 1]
  double ell_out = 0.0;
};

/// Complete elliptic integral K(k') of modulus k' = sqrt(1 - kc^2), computed
/// from the complementary modulus kc so that kc -> 0 stays accurate.
double elliptic_k_from_complement(double kc);

/// Jacobi elliptic functions sn, cn, dn at argument x for complementary
/// parameter mc = 1 - m (descending Landen / AGM).
struct JacobiSnCnDn {
  double sn;
  double cn;
  double dn;
};
JacobiSnCnDn jacobi_sncndn(double x, double mc);

/// Coefficients c_1..c_{2p} of the type (2p+1, 2p) Zolotarev function on [ell, 1].
std::vector<double> zolotarev_coefficients(double ell, int p);

/// One dynamically weighted Halley step for the interval [ell, 1].
RationalStep dwh_step(double ell);

/// One Zolotarev step of degree p for [ell, 1], normalized so that its maximum
/// over [ell, 1] is 1.
RationalStep zolotarev_step(double ell, int p);

/// Iterations until the lower endpoint reaches 1 within rounding, for the
/// adaptive QDWH schedule.
inline constexpr double qdwh_converged_gap = 10 * 1.1102230246251565e-16;
inline constexpr int qdwh_iteration_cap = 10;

/// Full step schedule for the parameters (ell must be positive).
std::vector<RationalStep> sign_schedule(const SignApproxParams& params);

/// Applies one step to a scalar.
double apply_step(const RationalStep& step, double x);

/// The composed scalar map r(x) that the matrix iteration applies to each
/// singular value.
double eval_sign_approx(double x, const SignApproxParams& params);

/// Smallest p in [1, 8] whose two-step map leaves max |1 - r| <= tol on
/// [ell, 1]; 8 when none does.
int choose_zolo_degree(double ell, double tol = 1e-15);

}  // namespace csdk
