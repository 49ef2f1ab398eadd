#pragma once

#include <vector>

#include "csdk/matrix.hpp"

namespace csdk {

enum class EigMethod { sdc, direct };

/// B = V diag(lambda) V^*, lambda ascending. Each column of V has its
/// largest-magnitude entry real and positive.
struct SymEigResult {
  Matrix v;
  std::vector<double> lambda;
  EigMethod method = EigMethod::direct;
};

/// Invariant-subspace split of B at the shift s, from the unitary polar
/// factor W of B - sI and the projector P = (W + I) / 2.
struct SpectralSplit {
  Matrix vplus;   // eigenvalues above s
  Matrix vminus;  // eigenvalues below s
  index_t nplus = 0;
  double projector_defect = 0.0;  // ||P^2 - P||_F
  double decoupling = 0.0;        // ||Vminus^* B Vplus||_F
};
SpectralSplit spectral_split(const Matrix& b, double s);

/// Per-split record kept by symeig_sdc for diagnostics and tests.
struct SplitRecord {
  index_t size = 0;
  index_t nplus = 0;
  double shift = 0.0;
  double projector_defect = 0.0;
  double decoupling = 0.0;
  double b_norm_fro = 0.0;
};
struct SdcTrace {
  std::vector<SplitRecord> splits;
  int direct_blocks = 0;     // blocks solved directly, base cases included
  int failed_shifts = 0;     // shifts rejected before falling back
};

/// Decoupling tolerance of one split, relative to ||B||_F.
double sdc_decoupling_tolerance(index_t n);

/// Spectral divide and conquer down to blocks of size 4.
SymEigResult symeig_sdc(const Matrix& b, SdcTrace* trace = nullptr);

/// Tridiagonalization and implicit QL.
SymEigResult symeig_direct(const Matrix& b);

SymEigResult symeig(const Matrix& b, EigMethod method);

/// Eigenpairs with eigenvalues in [lo - tol, hi + tol], tol = 50 n u ||B||_F.
/// The spectrum is first split at hi + 0.1; the block below is then solved
/// by `method`. Throws PreconditionError when the split does not decouple.
struct IntervalEig {
  Matrix v;
  std::vector<double> lambda;
};
IntervalEig symeig_interval(const Matrix& b, double lo, double hi, EigMethod method = EigMethod::sdc);

/// Scales each column so that its largest-magnitude entry is real positive.
void normalize_phases(Matrix& v);

}  // namespace csdk
