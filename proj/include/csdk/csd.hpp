#pragma once

#include <vector>

#include "csdk/matrix.hpp"
#include "csdk/polar.hpp"
#include "csdk/symeig.hpp"

// CS decomposition of a stacked matrix A = [A1; A2] with orthonormal columns,
// or of a rank-deficient partial isometry, from the polar decompositions of the
// two blocks and one Hermitian eigendecomposition:
//
//   A1 = U1 C V1^*,  A2 = U2 S V1^*.
namespace csdk {

enum class RankMode { full, deficient, automatic };
enum class CsExtraction { diag_projection, from_lambda };
enum class CsdBranch { full_rank, ill_conditioned, rank_deficient, rank_deficient_ill_conditioned };

struct CsdOptions {
  PolarMethod polar_method = PolarMethod::qdwh;
  EigMethod eig_method = EigMethod::sdc;
  double epsilon = 1e-15;
  RankMode rank_mode = RankMode::automatic;
  bool postprocess = true;
  CsExtraction cs_extraction = CsExtraction::diag_projection;
  /// Inputs with d(A) above this are rejected.
  double max_distance = 0.1;
  /// Debug only: eigendecompose H1 instead of H2 - H1 (unstable).
  bool b_from_h1 = false;
};

struct CsdDiagnostics {
  double d_of_a = 0.0;
  index_t rank_estimate = 0;
  /// ||offdiag(V1^* Hi V1)||_F before C and S are read off the diagonals.
  double offdiag_h1 = 0.0;
  double offdiag_h2 = 0.0;
  double h1_norm2 = 0.0;
  double h2_norm2 = 0.0;
  /// ||R~ - R||_F / ||R||_F of the QR fix per block; negative when unused.
  double r_agreement[2] = {-1.0, -1.0};
  bool svd_fallback[2] = {false, false};
  std::vector<double> lambda;  // eigenvalues of B matching the columns of V1
};

struct CsdResult {
  Matrix u1;
  Matrix u2;
  Matrix v1;
  std::vector<double> c;
  std::vector<double> s;
  std::vector<double> theta;  // ascending
  index_t rank = 0;
  double mu = 0.0;
  CsdBranch branch = CsdBranch::full_rank;
  CsdDiagnostics diag;

  [[nodiscard]] index_t k() const { return v1.cols(); }
};

CsdResult csd(const Matrix& a, index_t m1, const CsdOptions& opts = {});

/// B = H2 - H1 + mu (I - A^* A), exactly Hermitian.
Matrix build_b(const Matrix& h1, const Matrix& h2, const Matrix& a, double mu);

/// Real diagonals of V^* H1 V and V^* H2 V, clamped to [0, 1].
struct CsPair {
  std::vector<double> c;
  std::vector<double> s;
};
CsPair extract_cs(const Matrix& v1, const Matrix& h1, const Matrix& h2);

/// theta = atan2(S, C) and C = cos theta, S = sin theta. Pairs with
/// C = S = 0 (padding of a rank-deficient output) stay zero.
struct TrigCs {
  std::vector<double> c;
  std::vector<double> s;
  std::vector<double> theta;
};
TrigCs postprocess_trig(const std::vector<double>& c, const std::vector<double>& s);

/// Solves sin(theta) - cos(theta) = lambda for theta in [0, pi/2].
TrigCs cs_from_lambda(const std::vector<double>& lambda);

/// Polar decomposition of an ill-conditioned block: the interval-modified
/// iteration followed by W = Q Q_H^* from the QR factors of A and H~.
/// Falls back to the SVD when the two R factors disagree by more than
/// `threshold` (default 1e3 n u).
struct QrFixedPolar {
  PolarFactors factors;
  double r_agreement = 0.0;
  bool svd_fallback = false;
};
QrFixedPolar polar_via_qr_fix(const Matrix& ai, double epsilon, SignApproxParams params,
                              double threshold = 0.0);

/// Economical decomposition (k = r) of a rank-deficient partial isometry.
CsdResult csd_rank_deficient(const Matrix& a, index_t m1, const CsdOptions& opts = {});

/// Complete 2x2 CS decomposition of a unitary 2n x 2n matrix:
/// A = diag(U1, U2) [C -S; S C] diag(V1, V2)^*.
struct Csd2x2 {
  CsdResult left;
  Matrix v2;
};
Csd2x2 csd_2x2(const Matrix& a, const CsdOptions& opts = {});

/// [U1 C V1^*; U2 S V1^*].
Matrix reconstruct(const CsdResult& r);
/// The full 2n x 2n matrix of a complete 2x2 decomposition.
Matrix reconstruct(const Csd2x2& r);

const char* to_string(CsdBranch b);
const char* to_string(PolarMethod m);

}  // namespace csdk
