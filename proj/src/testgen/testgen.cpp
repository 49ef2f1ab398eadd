#include "csdk/testgen.hpp"

#include <cmath>
#include <numbers>

#include "csdk/errors.hpp"
#include "csdk/factor.hpp"

namespace csdk::testgen {

double Rng::uniform() {
  // 53 random bits, shifted by half an ulp so that 0 and 1 are excluded.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

index_t Rng::below(index_t n) {
  auto k = static_cast<index_t>(uniform() * static_cast<double>(n));
  return k < n ? k : n - 1;
}

Matrix complex_gaussian(index_t rows, index_t cols, Rng& rng) {
  Matrix g(rows, cols);
  for (auto& v : g.data()) {
    const double re = rng.normal();
    const double im = rng.normal();
    v = {re, im};
  }
  return g;
}

Matrix haar_stiefel(index_t m, index_t n, Rng& rng) {
  if (m < n) throw DimensionError("haar_stiefel: requires m >= n");
  // qr_factor already leaves diag(R) real positive, which is exactly the
  // phase correction that makes Q Haar distributed.
  return qr_factor(complex_gaussian(m, n, rng)).q;
}

Matrix gen_haar_stiefel(index_t m, index_t n, std::uint64_t seed) {
  Rng rng(seed);
  return haar_stiefel(m, n, rng);
}

index_t deficient_rank(index_t n) { return static_cast<index_t>(std::lround(0.75 * static_cast<double>(n))); }

CsdSample clustered_sample(index_t n, std::uint64_t seed, bool rank_deficient) {
  if (n < 2) throw DimensionError("clustered_sample: n must be at least 2");
  Rng rng(seed);
  const Matrix u1 = haar_stiefel(n, n, rng);
  const Matrix u2 = haar_stiefel(n, n, rng);
  const Matrix v1 = haar_stiefel(n, n, rng);

  std::vector<double> delta(static_cast<std::size_t>(n + 1));
  for (auto& d : delta) d = std::pow(10.0, -18.0 * rng.uniform());
  double total = 0.0;
  for (const double d : delta) total += d;

  CsdSample s;
  s.theta.resize(static_cast<std::size_t>(n));
  double partial = 0.0;
  for (index_t i = 0; i < n; ++i) {
    partial += delta[static_cast<std::size_t>(i)];
    s.theta[static_cast<std::size_t>(i)] = std::numbers::pi / 2.0 * partial / total;
  }

  std::vector<double> c(static_cast<std::size_t>(n));
  std::vector<double> sn(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = std::cos(s.theta[i]);
    sn[i] = std::sin(s.theta[i]);
  }

  if (rank_deficient) {
    // Partial Fisher-Yates: the first n - r entries of a random permutation.
    const index_t drop = n - deficient_rank(n);
    std::vector<index_t> idx(static_cast<std::size_t>(n));
    for (index_t i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (index_t i = 0; i < drop; ++i) {
      const index_t j = i + rng.below(n - i);
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
      const auto k = static_cast<std::size_t>(idx[static_cast<std::size_t>(i)]);
      c[k] = 0.0;
      sn[k] = 0.0;
      s.zeroed.push_back(idx[static_cast<std::size_t>(i)]);
    }
  }

  const Matrix top = matmul(scale_columns(u1, c), v1, Op::none, Op::adjoint);
  const Matrix bottom = matmul(scale_columns(u2, sn), v1, Op::none, Op::adjoint);
  s.a = vstack(top, bottom);
  return s;
}

Matrix gen_clustered(index_t n, std::uint64_t seed) { return clustered_sample(n, seed, false).a; }

Matrix gen_rank_deficient_haar(index_t n, std::uint64_t seed) {
  Rng rng(seed);
  const index_t r = deficient_rank(n);
  const Matrix x = haar_stiefel(2 * n, r, rng);
  const Matrix y = haar_stiefel(n, r, rng);
  return matmul(x, y, Op::none, Op::adjoint);
}

Matrix gen_rank_deficient_clustered(index_t n, std::uint64_t seed) {
  return clustered_sample(n, seed, true).a;
}

Matrix add_noise(const Matrix& a, double level, std::uint64_t seed) {
  if (level == 0.0) return a;
  Rng rng(seed);
  Matrix out = a;
  for (auto& v : out.data()) {
    const double re = rng.normal();
    const double im = rng.normal();
    v += level * cplx{re, im};
  }
  return out;
}

Matrix generate(const TestCase& tc) {
  Matrix a;
  switch (tc.class_id) {
    case 1: a = gen_haar_stiefel(2 * tc.n, tc.n, tc.seed); break;
    case 2: a = gen_clustered(tc.n, tc.seed); break;
    case 3: a = gen_rank_deficient_haar(tc.n, tc.seed); break;
    case 4: a = gen_rank_deficient_clustered(tc.n, tc.seed); break;
    default: throw PreconditionError("generate: test class must be 1..4");
  }
  if (tc.noisy) {
    // Independent stream for the perturbation.
    a = add_noise(a, default_noise_level, tc.seed ^ 0x9E3779B97F4A7C15ULL);
  }
  return a;
}

index_t expected_rank(const TestCase& tc) {
  return tc.class_id >= 3 ? deficient_rank(tc.n) : tc.n;
}

}  // namespace csdk::testgen
