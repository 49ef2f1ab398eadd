#include <algorithm>
#include <cmath>
#include <numbers>

#include "csdk/csd.hpp"
#include "csdk/errors.hpp"
#include "csdk/isometry.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace csdk;
using csdk::test::u;

namespace {

constexpr double pi = std::numbers::pi;

// [U1 C V^*; U2 S V^*] from explicit factors.
Matrix from_factors(const Matrix& u1, const Matrix& u2, const Matrix& v, const std::vector<double>& c,
                    const std::vector<double>& s) {
  return vstack(matmul(scale_columns(u1, c), v, Op::none, Op::adjoint),
                matmul(scale_columns(u2, s), v, Op::none, Op::adjoint));
}

Matrix from_angles(index_t n, const std::vector<double>& theta, std::uint64_t seed) {
  testgen::Rng rng(seed);
  const Matrix u1 = testgen::haar_stiefel(n, n, rng);
  const Matrix u2 = testgen::haar_stiefel(n, n, rng);
  const Matrix v = testgen::haar_stiefel(n, n, rng);
  std::vector<double> c, s;
  for (const double t : theta) {
    c.push_back(std::cos(t));
    s.push_back(std::sin(t));
  }
  return from_factors(u1, u2, v, c, s);
}

Matrix motivating_v() {
  return Matrix{{2.0, -1.0, 2.0}, {2.0, 2.0, -1.0}, {1.0, -2.0, -2.0}} * (1.0 / 3.0);
}

void check_contract(const Matrix& a, const CsdResult& r) {
  const index_t n = a.cols();
  const double tol = 50.0 * static_cast<double>(n) * u;
  const StabilityReport rep = stability_report(a, r);
  CHECK(rep.residual_2norm <= std::max(tol, 10.0 * rep.d_of_a));
  CHECK(rep.orth_u1 <= 50.0 * n);
  CHECK(rep.orth_u2 <= 50.0 * n);
  CHECK(rep.orth_v1 <= 50.0 * n);
  CHECK(rep.cs_identity_err <= 1e2 * u);
  CHECK(std::is_sorted(r.theta.begin(), r.theta.end()));
  for (std::size_t i = 0; i < r.c.size(); ++i) {
    CHECK(r.c[i] >= 0.0);
    CHECK(r.s[i] >= 0.0);
  }
}

Matrix swap_blocks(const Matrix& a, index_t m1) {
  return vstack(a.rows_range(m1, a.rows() - m1), a.rows_range(0, m1));
}

}  // namespace

TEST_CASE("csd of [I; 0] and [I; I]/sqrt 2") {
  for (const auto method : {PolarMethod::svd, PolarMethod::qdwh, PolarMethod::zolo}) {
    CsdOptions opts;
    opts.polar_method = method;
    const index_t n = 4;
    Matrix a = vstack(Matrix::identity(n), Matrix::zeros(n, n));
    auto r = csd(a, n, opts);
    // A2 = 0 is singular, so the iterative methods take the QR-fixed branch.
    CHECK((r.branch == CsdBranch::full_rank || r.branch == CsdBranch::ill_conditioned));
    for (index_t i = 0; i < n; ++i) {
      CHECK(r.theta[static_cast<std::size_t>(i)] == doctest::Approx(0.0));
      CHECK(std::abs(r.c[static_cast<std::size_t>(i)] - 1.0) <= 10 * u);
      CHECK(r.s[static_cast<std::size_t>(i)] <= 10 * u);
    }
    // U1 = V1 up to the phase freedom of the decomposition.
    CHECK(norm_fro(r.u1 - r.v1) <= 50 * n * u);
    check_contract(a, r);

    a = vstack(Matrix::identity(n), Matrix::identity(n)) * (1.0 / std::sqrt(2.0));
    r = csd(a, n, opts);
    for (index_t i = 0; i < n; ++i) {
      CHECK(std::abs(r.theta[static_cast<std::size_t>(i)] - pi / 4) <= 50 * u);
      CHECK(std::abs(r.c[static_cast<std::size_t>(i)] - std::sqrt(0.5)) <= 50 * u);
    }
    check_contract(a, r);
  }
}

TEST_CASE("csd recovers tiny clustered angles") {
  const std::vector<double> theta{1e-8, 2e-8, 3e-8};
  const Matrix q = motivating_v();
  std::vector<double> c, s;
  for (const double t : theta) {
    c.push_back(std::cos(t));
    s.push_back(std::sin(t));
  }
  const Matrix a = from_factors(q, q, q, c, s);
  for (const auto method : {PolarMethod::svd, PolarMethod::qdwh, PolarMethod::zolo}) {
    CsdOptions opts;
    opts.polar_method = method;
    const auto r = csd(a, 3, opts);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(r.theta[i] - theta[i]) <= 1e-15);
    CHECK(norm2(reconstruct(r) - a) <= 1e-14);
    check_contract(a, r);
  }
}

TEST_CASE("eigenvectors of H2 - H1 diagonalize both blocks, those of H1 do not") {
  const std::vector<double> theta{1e-8, 2e-8, 3e-8};
  const Matrix q = motivating_v();
  std::vector<double> c, s;
  for (const double t : theta) {
    c.push_back(std::cos(t));
    s.push_back(std::sin(t));
  }
  const Matrix h1 = hermitian_part(matmul(scale_columns(q, c), q, Op::none, Op::adjoint));
  const Matrix h2 = hermitian_part(matmul(scale_columns(q, s), q, Op::none, Op::adjoint));
  const Matrix zero_a = vstack(Matrix::identity(3), Matrix::zeros(3, 3));

  const auto good = symeig_direct(build_b(h1, h2, zero_a, 0.0));
  CHECK(max_offdiag_abs(matmul(good.v, h2 * good.v, Op::adjoint)) <= 1e-15);
  const auto bad = symeig_direct(h1);
  CHECK(max_offdiag_abs(matmul(bad.v, h2 * bad.v, Op::adjoint)) >= 1e-10);

  const auto cs = extract_cs(good.v, h1, h2);
  std::vector<double> got = cs.s;
  std::sort(got.begin(), got.end());
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(got[i] - std::sin(theta[i])) <= 1e2 * u);
}

TEST_CASE("build_b") {
  const index_t n = 5;
  const Matrix a = testgen::gen_haar_stiefel(2 * n, n, 3);
  const Matrix h1 = test::random_hermitian(n, 1);
  const Matrix h2 = test::random_hermitian(n, 2);
  CHECK(norm_fro(build_b(h1, h2, a, 0.0) - (h2 - h1)) == 0.0);
  CHECK(norm_fro(build_b(h1, h1, a, 0.0)) == 0.0);

  // Exact rank-r partial isometry: spectrum in [-1, 1] plus n - r copies of mu.
  const index_t m = 12;
  const auto sample = testgen::clustered_sample(m, 5, true);
  const index_t rank = m - static_cast<index_t>(sample.zeroed.size());
  const auto p1 = canonical_polar(sample.a.rows_range(0, m), 1e-8);
  const auto p2 = canonical_polar(sample.a.rows_range(m, m), 1e-8);
  const Matrix b = build_b(p1.h, p2.h, sample.a, 2.0);
  CHECK(norm_fro(b - b.adjoint()) == 0.0);
  const auto ev = hermitian_eigvalues(b);
  index_t at_two = 0;
  for (const double x : ev) {
    if (std::abs(x - 2.0) <= 1e2 * u * m) {
      ++at_two;
    } else {
      CHECK(std::abs(x) <= 1.0 + 1e2 * u * m);
    }
  }
  CHECK(at_two == m - rank);
}

TEST_CASE("extract_cs") {
  const Matrix h1 = Matrix::diagonal(std::vector<double>{0.6, 0.8});
  const Matrix h2 = Matrix::diagonal(std::vector<double>{0.8, 0.6});
  const auto cs = extract_cs(Matrix::identity(2), h1, h2);
  CHECK(cs.c == std::vector<double>{0.6, 0.8});
  CHECK(cs.s == std::vector<double>{0.8, 0.6});

  // Slightly negative diagonals are clamped.
  const auto neg = extract_cs(Matrix::identity(1), Matrix{{-1e-17}}, Matrix{{1.0}});
  CHECK(neg.c[0] == 0.0);

  const index_t n = 10;
  testgen::Rng rng(7);
  const Matrix v = testgen::haar_stiefel(n, n, rng);
  std::vector<double> c, s;
  for (index_t i = 0; i < n; ++i) {
    const double t = 0.15 * static_cast<double>(i);
    c.push_back(std::cos(t));
    s.push_back(std::sin(t));
  }
  const Matrix g1 = hermitian_part(matmul(scale_columns(v, c), v, Op::none, Op::adjoint));
  const Matrix g2 = hermitian_part(matmul(scale_columns(v, s), v, Op::none, Op::adjoint));
  const auto got = extract_cs(v, g1, g2);
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(std::abs(got.c[i] - c[i]) <= 1e2 * u);
    CHECK(std::abs(got.s[i] - s[i]) <= 1e2 * u);
  }
}

TEST_CASE("postprocess_trig") {
  const double h = std::sqrt(0.5);
  auto t = postprocess_trig({h}, {h});
  CHECK(std::abs(t.theta[0] - pi / 4) <= u);
  CHECK(std::abs(t.c[0] - h) <= u);
  CHECK(std::abs(t.s[0] - h) <= u);

  t = postprocess_trig({0.0}, {1.0});
  CHECK(t.theta[0] == pi / 2);
  CHECK(t.s[0] == 1.0);

  t = postprocess_trig({0.6 + 1e-9}, {0.8 - 1e-9});
  CHECK(std::abs(t.c[0] * t.c[0] + t.s[0] * t.s[0] - 1.0) <= 2 * u);
  CHECK(std::abs(t.theta[0] - std::atan(0.8 / 0.6)) <= 1e-8);

  t = postprocess_trig({0.0, 0.5}, {0.0, 0.5});
  CHECK(t.c[0] == 0.0);
  CHECK(t.s[0] == 0.0);
  CHECK(std::abs(t.theta[1] - pi / 4) <= u);
}

TEST_CASE("cs_from_lambda") {
  const auto t = cs_from_lambda({0.0, -1.0, 1.0, -1.0 - 1e-15});
  CHECK(std::abs(t.theta[0] - pi / 4) <= u);
  CHECK(std::abs(t.c[0] - std::sqrt(0.5)) <= u);
  CHECK(std::abs(t.s[0] - std::sqrt(0.5)) <= u);
  CHECK(std::abs(t.theta[1]) <= u);
  CHECK(std::abs(t.c[1] - 1.0) <= u);
  CHECK(std::abs(t.s[1]) <= u);
  CHECK(std::abs(t.theta[2] - pi / 2) <= 2 * u);
  CHECK(std::abs(t.c[2]) <= 2 * u);
  CHECK(std::abs(t.s[2] - 1.0) <= u);
  CHECK(std::abs(t.theta[3]) <= u);
}

TEST_CASE("polar_via_qr_fix") {
  const Matrix a = Matrix::diagonal(std::vector<double>{1.0, 1e-16});
  for (const int p : {1, 8}) {
    SignApproxParams params;
    params.p = p;
    if (p == 8) params.iterations = 2;
    const auto fixed = polar_via_qr_fix(a, 1e-15, params);
    CHECK_FALSE(fixed.svd_fallback);
    CHECK(fixed.r_agreement <= 1e2 * u);
    const auto oracle = polar_svd(a);
    for (index_t j = 0; j < 2; ++j) {
      CHECK(std::abs(std::abs(fixed.factors.w(j, j)) - 1.0) <= 1e2 * u);
    }
    CHECK(norm_fro(fixed.factors.w - oracle.w) <= 1e2 * u);
    CHECK(orth_defect_fro(fixed.factors.w) <= 1e2 * u);
  }
  CHECK_THROWS_AS(polar_via_qr_fix(Matrix::identity(3), 1e-15, {}), PreconditionError);

  // Ill-conditioned block of a clustered sample.
  const index_t n = 30;
  const Matrix full = testgen::gen_clustered(n, 2);
  const Matrix a2 = full.rows_range(n, n);
  const auto sigma = singular_values(a2);
  if (sigma.back() < 1e-15 * sigma.front()) {
    const auto fixed = polar_via_qr_fix(a2, 1e-15, {});
    CHECK(norm_fro(fixed.factors.w * fixed.factors.h - a2) <= 50 * n * u);
    CHECK(orth_defect_fro(fixed.factors.w) <= 50 * n * u);
  }
}

TEST_CASE("csd_rank_deficient") {
  Matrix a(4, 2);
  a(0, 0) = 1.0;
  const auto r = csd_rank_deficient(a, 2);
  REQUIRE(r.k() == 1);
  CHECK(std::abs(r.c[0] - 1.0) <= 10 * u);
  CHECK(std::abs(r.s[0]) <= 10 * u);
  CHECK(r.mu == 2.0);
  CHECK(norm2(reconstruct(r) - a) <= 10 * u);

  for (const int cls : {3, 4}) {
    const testgen::TestCase tc{cls, false, 20, 1};
    const Matrix m = testgen::generate(tc);
    const auto res = csd(m, 20);
    CHECK(res.k() == testgen::deficient_rank(20));
    CHECK((res.branch == CsdBranch::rank_deficient || res.branch == CsdBranch::rank_deficient_ill_conditioned));
    check_contract(m, res);
    // mu = 2 separates the null space from the spectrum in [-1, 1].
    const auto p1 = canonical_polar(m.rows_range(0, 20), 1e-8);
    const auto p2 = canonical_polar(m.rows_range(20, 20), 1e-8);
    const auto ev = hermitian_eigvalues(build_b(p1.h, p2.h, m, 2.0));
    double below = -2.0, above = 4.0;
    for (const double x : ev) {
      if (x <= 1.5) below = std::max(below, x);
      else above = std::min(above, x);
    }
    CHECK(above - below >= 0.9);
  }
}

TEST_CASE("csd on class 3, n = 16") {
  const testgen::TestCase tc{3, false, 16, 4};
  const Matrix a = testgen::generate(tc);
  const auto r = csd(a, 16);
  CHECK(r.branch == CsdBranch::rank_deficient);
  CHECK(r.k() == 12);
  CHECK(r.rank == 12);
  for (std::size_t i = 0; i < r.c.size(); ++i) CHECK(std::abs(r.c[i] * r.c[i] + r.s[i] * r.s[i] - 1.0) <= 1e-14);
  check_contract(a, r);
}

TEST_CASE("csd over generated classes") {
  for (const auto method : {PolarMethod::svd, PolarMethod::qdwh, PolarMethod::zolo}) {
    for (int cls = 1; cls <= 4; ++cls) {
      for (const bool noisy : {false, true}) {
        const testgen::TestCase tc{cls, noisy, 24, 3};
        const Matrix a = testgen::generate(tc);
        CsdOptions opts;
        opts.polar_method = method;
        const auto r = csd(a, 24, opts);
        CAPTURE(cls);
        CAPTURE(noisy);
        CAPTURE(to_string(method));
        CHECK(r.k() == testgen::expected_rank(tc));
        check_contract(a, r);
      }
    }
  }
}

TEST_CASE("recovered clustered angles match the construction") {
  const auto sample = testgen::clustered_sample(20, 8, false);
  const auto r = csd(sample.a, 20);
  for (std::size_t i = 0; i < r.theta.size(); ++i) CHECK(std::abs(r.theta[i] - sample.theta[i]) <= 1e-7);
}

TEST_CASE("from_lambda extraction and raw output") {
  const Matrix a = from_angles(12, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2}, 11);
  CsdOptions opts;
  opts.cs_extraction = CsExtraction::from_lambda;
  auto r = csd(a, 12, opts);
  CHECK(norm2(reconstruct(r) - a) <= 1e3 * 12 * u);
  for (std::size_t i = 0; i < 12; ++i) CHECK(std::abs(r.theta[i] - 0.1 * static_cast<double>(i + 1)) <= 1e-13);

  opts = {};
  opts.postprocess = false;
  r = csd(a, 12, opts);
  check_contract(a, r);
}

TEST_CASE("swapping the blocks reflects the angles") {
  const index_t n = 15;
  const Matrix a = testgen::gen_haar_stiefel(2 * n, n, 21);
  const auto r = csd(a, n);
  const auto rs = csd(swap_blocks(a, n), n);
  for (index_t i = 0; i < n; ++i) {
    const double lhs = rs.theta[static_cast<std::size_t>(i)];
    const double rhs = pi / 2 - r.theta[static_cast<std::size_t>(n - 1 - i)];
    CHECK(std::abs(lhs - rhs) <= 10.0 * n * u);
  }
}

TEST_CASE("angle gaps dominate cosine and sine gaps") {
  const Matrix a = testgen::gen_haar_stiefel(40, 20, 5);
  const auto r = csd(a, 20);
  const auto g = [](double t) { return std::sin(t) - std::cos(t); };
  for (std::size_t i = 0; i < r.theta.size(); ++i) {
    for (std::size_t j = 0; j < r.theta.size(); ++j) {
      const double gap = std::abs(g(r.theta[i]) - g(r.theta[j]));
      CHECK(std::abs(std::cos(r.theta[i]) - std::cos(r.theta[j])) <= gap + 4 * u);
      CHECK(std::abs(std::sin(r.theta[i]) - std::sin(r.theta[j])) <= gap + 4 * u);
    }
  }
}

TEST_CASE("unequal block heights") {
  const Matrix a = testgen::gen_haar_stiefel(23, 8, 2);
  const auto r = csd(a, 11);
  CHECK(r.u1.rows() == 11);
  CHECK(r.u2.rows() == 12);
  check_contract(a, r);
}

TEST_CASE("csd errors") {
  const Matrix a = testgen::gen_haar_stiefel(10, 5, 1);
  CHECK_THROWS_AS(csd(a, 4), DimensionError);
  CHECK_THROWS_AS(csd(a, 6), DimensionError);
  CsdOptions bad;
  bad.epsilon = 1e-6;
  CHECK_THROWS_AS(csd(a, 5, bad), PreconditionError);
  // d(A) = 0.5.
  CHECK_THROWS_AS(csd(a * 0.5, 5), InputRejected);

  const Matrix deficient = testgen::gen_rank_deficient_haar(12, 2);
  CsdOptions full;
  full.rank_mode = RankMode::full;
  CHECK_THROWS_AS(csd(deficient, 12, full), RankInconsistency);
}

TEST_CASE("csd_2x2") {
  auto r = csd_2x2(Matrix::identity(6));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(r.left.c[i] - 1.0) <= 10 * u);
    CHECK(r.left.s[i] <= 10 * u);
  }
  CHECK(orth_defect_fro(r.v2) <= 10 * u);
  CHECK(norm2(reconstruct(r) - Matrix::identity(6)) <= 10 * u);

  const double t0 = 0.3, t1 = 0.7;
  Matrix rot(4, 4);
  const double th[2] = {t0, t1};
  for (index_t i = 0; i < 2; ++i) {
    rot(i, i) = std::cos(th[i]);
    rot(i, i + 2) = -std::sin(th[i]);
    rot(i + 2, i) = std::sin(th[i]);
    rot(i + 2, i + 2) = std::cos(th[i]);
  }
  r = csd_2x2(rot);
  CHECK(std::abs(r.left.theta[0] - t0) <= 1e-14);
  CHECK(std::abs(r.left.theta[1] - t1) <= 1e-14);
  CHECK(norm2(reconstruct(r) - rot) <= 50 * 2 * u);

  for (const index_t n : {10, 20}) {
    const Matrix q = testgen::gen_haar_stiefel(2 * n, 2 * n, static_cast<std::uint64_t>(n));
    r = csd_2x2(q);
    CHECK(norm_fro(reconstruct(r) - q) <= 50 * n * u);
    CHECK(orth_defect_2(r.v2) <= 50 * n * u);
  }
  CHECK_THROWS_AS(csd_2x2(Matrix::identity(4) * 1.1), PreconditionError);
}
