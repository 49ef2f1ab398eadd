#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "csdk/matrix.hpp"

// Seeded generators for the benchmark test classes. Every generator is a pure
// function of its dimensions and seed.
namespace csdk::testgen {

/// mt19937_64 with portable uniform and Box-Muller normal draws (the standard
/// distributions are implementation-defined, the engine is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Index uniform on [0, n).
  index_t below(index_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Entries re + i*im with re, im independent standard normals.
Matrix complex_gaussian(index_t rows, index_t cols, Rng& rng);

/// Haar-distributed m x n matrix with orthonormal columns: QR of a complex
/// Gaussian matrix with the R-diagonal phases moved into Q.
Matrix haar_stiefel(index_t m, index_t n, Rng& rng);
Matrix gen_haar_stiefel(index_t m, index_t n, std::uint64_t seed);

/// A [U1 C V1^*; U2 S V1^*] sample together with the angles used to build it.
struct CsdSample {
  Matrix a;
  std::vector<double> theta;        // ascending, in [0, pi/2)
  std::vector<index_t> zeroed;      // indices whose C_ii and S_ii were zeroed
};

/// Clustered angles: delta_k = 10^(-18 rand), theta = (pi/2) cumsum(delta_1..n) / sum(delta_1..n+1).
CsdSample clustered_sample(index_t n, std::uint64_t seed, bool rank_deficient);

Matrix gen_clustered(index_t n, std::uint64_t seed);
/// 2n x n product X Y^* of Haar factors, rank nint(3n/4).
Matrix gen_rank_deficient_haar(index_t n, std::uint64_t seed);
/// Clustered sample with C_ii = S_ii = 0 at n - nint(3n/4) random indices.
Matrix gen_rank_deficient_clustered(index_t n, std::uint64_t seed);

/// A + level * (G_re + i G_im) with G entries standard normal.
Matrix add_noise(const Matrix& a, double level, std::uint64_t seed);

/// nint(3n/4), the rank used by the rank-deficient classes.
index_t deficient_rank(index_t n);

struct TestCase {
  int class_id = 1;  // 1..4
  bool noisy = false;
  index_t n = 30;
  std::uint64_t seed = 1;
};

inline constexpr double default_noise_level = 1e-10;

/// The 2n x n test matrix described by `tc`.
Matrix generate(const TestCase& tc);

/// Exact rank of the noiseless matrix of `tc`.
index_t expected_rank(const TestCase& tc);

}  // namespace csdk::testgen
