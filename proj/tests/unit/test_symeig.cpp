#include <algorithm>
#include <cmath>

#include "csdk/errors.hpp"
#include "csdk/symeig.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace csdk;
using csdk::test::u;

namespace {

void check_decomposition(const Matrix& b, const SymEigResult& r) {
  const index_t n = b.rows();
  CHECK(std::is_sorted(r.lambda.begin(), r.lambda.end()));
  CHECK(orth_defect_fro(r.v) <= 50.0 * n * u);
  const Matrix rebuilt = matmul(scale_columns(r.v, r.lambda), r.v, Op::none, Op::adjoint);
  CHECK(norm_fro(rebuilt - b) <= 50.0 * n * u * norm_fro(b));
  for (index_t j = 0; j < n; ++j) {
    double best = 0.0;
    cplx pivot = 0.0;
    for (const cplx& z : r.v.col(j)) {
      if (std::abs(z) > best) {
        best = std::abs(z);
        pivot = z;
      }
    }
    CHECK(pivot.imag() == 0.0);
    CHECK(pivot.real() > 0.0);
  }
}

// Hermitian matrix with prescribed eigenvalues.
Matrix with_eigenvalues(const std::vector<double>& lambda, std::uint64_t seed) {
  testgen::Rng rng(seed);
  const auto n = static_cast<index_t>(lambda.size());
  const Matrix q = testgen::haar_stiefel(n, n, rng);
  return hermitian_part(matmul(scale_columns(q, lambda), q, Op::none, Op::adjoint));
}

}  // namespace

TEST_CASE("spectral_split small cases") {
  const Matrix b{{-1.0, 0.0}, {0.0, 1.0}};
  auto sp = spectral_split(b, 0.0);
  CHECK(sp.nplus == 1);
  CHECK(std::abs(std::abs(sp.vplus(1, 0)) - 1.0) <= 10 * u);
  CHECK(std::abs(sp.vplus(0, 0)) <= 10 * u);

  sp = spectral_split(Matrix::identity(2), 0.0);
  CHECK(sp.nplus == 2);
  CHECK(sp.vminus.cols() == 0);
}

TEST_CASE("spectral_split counts eigenvalues above the shift") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Matrix b = test::random_hermitian(8, seed);
    std::vector<double> d;
    for (index_t i = 0; i < 8; ++i) d.push_back(b(i, i).real());
    std::sort(d.begin(), d.end());
    const double s = 0.5 * (d[3] + d[4]);
    const auto sp = spectral_split(b, s);
    const auto ev = hermitian_eigvalues(b);
    const auto above = std::count_if(ev.begin(), ev.end(), [&](double x) { return x > s; });
    CHECK(sp.nplus == above);
    CHECK(sp.projector_defect <= 50 * 8 * u);
    CHECK(sp.decoupling <= 50 * 8 * u * norm_fro(b));
  }
}

TEST_CASE("symeig trivial cases") {
  const Matrix d = Matrix::diagonal(std::vector<double>{3.0, 1.0, 2.0});
  for (const auto method : {EigMethod::sdc, EigMethod::direct}) {
    auto r = symeig(d, method);
    CHECK(r.lambda == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(std::abs(r.v(1, 0) - 1.0) <= 10 * u);
    CHECK(std::abs(r.v(2, 1) - 1.0) <= 10 * u);
    CHECK(std::abs(r.v(0, 2) - 1.0) <= 10 * u);
    r = symeig(Matrix::identity(3), method);
    check_decomposition(Matrix::identity(3), r);
  }
  auto r = symeig_direct(Matrix{{5.0}});
  CHECK(r.lambda == std::vector<double>{5.0});
  r = symeig_direct(Matrix{{0.0, 1.0}, {1.0, 0.0}});
  CHECK(r.lambda[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(r.lambda[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(std::abs(r.v(0, 0)) - std::sqrt(0.5)) <= 10 * u);
  CHECK(std::abs(r.v(0, 0) + r.v(1, 0)) <= 10 * u);
}

TEST_CASE("symeig_direct trace identity") {
  const Matrix b = test::random_hermitian(30, 4);
  const auto r = symeig_direct(b);
  double sum = 0.0;
  for (const double l : r.lambda) sum += l;
  CHECK(std::abs(sum - b.trace().real()) <= 1e2 * 30 * u * norm2(b));
  check_decomposition(b, r);
}

TEST_CASE("symeig_sdc agrees with the direct solver") {
  for (const index_t n : {5, 17, 50}) {
    const Matrix b = test::random_hermitian(n, static_cast<std::uint64_t>(n));
    SdcTrace trace;
    const auto sdc = symeig_sdc(b, &trace);
    const auto dir = symeig_direct(b);
    check_decomposition(b, sdc);
    const double scale = norm2(b);
    for (std::size_t i = 0; i < sdc.lambda.size(); ++i) {
      CHECK(std::abs(sdc.lambda[i] - dir.lambda[i]) <= 1e2 * n * u * scale);
    }
    CHECK(!trace.splits.empty());
    for (const auto& s : trace.splits) {
      CHECK(s.projector_defect <= 50.0 * s.size * u);
      CHECK(s.decoupling <= 50.0 * s.size * u * s.b_norm_fro);
    }
  }
}

TEST_CASE("symeig_sdc with repeated and clustered eigenvalues") {
  std::vector<double> lambda(20, 1.0);
  for (int i = 0; i < 8; ++i) lambda[static_cast<std::size_t>(i)] = -1.0;
  lambda[19] = 1.0 + 1e-13;
  const Matrix b = with_eigenvalues(lambda, 6);
  const auto r = symeig_sdc(b);
  check_decomposition(b, r);
  std::sort(lambda.begin(), lambda.end());
  for (std::size_t i = 0; i < lambda.size(); ++i) CHECK(std::abs(r.lambda[i] - lambda[i]) <= 1e3 * u);
}

TEST_CASE("symeig_interval") {
  auto r = symeig_interval(Matrix::diagonal(std::vector<double>{-0.5, 0.5, 2.0}), -1.0, 1.0);
  REQUIRE(r.lambda.size() == 2);
  CHECK(r.lambda[0] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(r.lambda[1] == doctest::Approx(0.5).epsilon(1e-15));

  r = symeig_interval(Matrix::identity(3) * 2.0, -1.0, 1.0);
  CHECK(r.lambda.empty());
  CHECK(r.v.cols() == 0);

  // Shape of the rank-deficient CSD matrix: spectrum in [-1, 1] plus n - r copies of 2.
  const index_t n = 20;
  const index_t rank = testgen::deficient_rank(n);
  std::vector<double> lambda;
  testgen::Rng rng(9);
  for (index_t i = 0; i < rank; ++i) lambda.push_back(2.0 * rng.uniform() - 1.0);
  for (index_t i = rank; i < n; ++i) lambda.push_back(2.0);
  const Matrix b = with_eigenvalues(lambda, 10);
  r = symeig_interval(b, -1.0, 1.0);
  CHECK(static_cast<index_t>(r.lambda.size()) == rank);
  CHECK(orth_defect_fro(r.v) <= 50.0 * n * u);
  CHECK(norm_fro(b * r.v - scale_columns(r.v, r.lambda)) <= 50.0 * n * u * norm_fro(b));
}
