#pragma once

#include <vector>

#include "csdk/csd.hpp"
#include "csdk/matrix.hpp"

// Distances to partial isometries, epsilon-ranks and the backward-error
// metrics reported for a computed CS decomposition.
namespace csdk {

enum class NormKind { spectral, frobenius };

/// max_i min(sigma_i, |1 - sigma_i|): the spectral-norm distance from A to
/// the nearest partial isometry.
double dist_to_partial_isometry(const Matrix& a);
double dist_from_singular_values(const std::vector<double>& sigma);

/// Smallest rank within eps of A in the given norm (truncated SVD).
index_t eps_rank(const Matrix& a, double eps, NormKind norm = NormKind::spectral);
index_t eps_rank_from_singular_values(const std::vector<double>& sigma, double eps,
                                      NormKind norm = NormKind::spectral);

/// U factor of the canonical polar decomposition of the rank-r truncation of A.
Matrix truncated_polar_factor(const Matrix& a, index_t r);

double norm_of(const Matrix& a, NormKind norm);

/// lower = ||AA^*A - A|| / (s1 (1 + s1)), middle = ||A - U||,
/// upper = ||AA^*A - A|| / (sr (1 + sr)), for A of exact rank r (sigma_i > rank_tol).
struct SandwichBounds {
  double lower = 0.0;
  double middle = 0.0;
  double upper = 0.0;
  index_t rank = 0;
};
SandwichBounds isometry_sandwich(const Matrix& a, NormKind norm = NormKind::spectral, double rank_tol = -1.0);

/// eps + (||AA^*A - A|| + eps (1 + 3 s1^2)) / (sr (1 + sr)) with r the
/// eps-rank of A. Throws PreconditionError when sigma_r = 0.
double nearby_isometry_bound(const Matrix& a, double eps, NormKind norm = NormKind::spectral);

struct StabilityReport {
  index_t n = 0;
  index_t k = 0;
  double residual_2norm = 0.0;
  double d_of_a = 0.0;
  double scaled_residual = 0.0;  // residual / max(d(A), u)
  double orth_u1 = 0.0;          // ||U1^* U1 - I||_2 / u
  double orth_u2 = 0.0;
  double orth_v1 = 0.0;
  double cs_identity_err = 0.0;  // ||C^2 + S^2 - I_k||_2
};

StabilityReport stability_report(const Matrix& a, const CsdResult& result);

}  // namespace csdk
