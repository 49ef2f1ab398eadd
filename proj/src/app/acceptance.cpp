#include "csdk/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "csdk/config.hpp"
#include "csdk/csd.hpp"
#include "csdk/errors.hpp"
#include "csdk/factor.hpp"
#include "csdk/isometry.hpp"
#include "csdk/polar.hpp"
#include "csdk/symeig.hpp"
#include "csdk/testgen.hpp"

namespace csdk::acceptance {
namespace {

constexpr double u = unit_roundoff;

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

struct MaxTracker {
  double worst = 0.0;   // largest measured / threshold ratio
  std::string where;

  void add(double measured, double threshold, const std::string& label) {
    double ratio = measured / threshold;
    if (std::isnan(ratio)) ratio = INFINITY;
    if (where.empty() || ratio > worst) {
      worst = ratio;
      where = label;
    }
  }
  [[nodiscard]] bool ok() const { return worst <= 1.0; }
};

Outcome finish(int id, std::string description, const MaxTracker& t, std::string extra = {}) {
  Outcome o;
  o.id = id;
  o.description = std::move(description);
  o.pass = t.ok() && std::isfinite(t.worst);
  o.detail = fmt("worst measured/threshold = %.3g", t.worst) + (t.where.empty() ? "" : " at " + t.where);
  if (!extra.empty()) o.detail += "; " + extra;
  return o;
}

std::string label(const testgen::TestCase& tc, PolarMethod m) {
  std::ostringstream s;
  s << "class " << tc.class_id << (tc.noisy ? "'" : "") << " n=" << tc.n << " seed=" << tc.seed << " "
    << to_string(m);
  return s.str();
}

// Shared by criteria 2 and 3: thresholds from the residual and orthogonality contract.
void check_class_run(const testgen::TestCase& tc, PolarMethod method, bool rank_deficient, MaxTracker& t,
                     std::string& failures) {
  const Matrix a = testgen::generate(tc);
  CsdOptions opts;
  opts.polar_method = method;
  const std::string where = label(tc, method);
  CsdResult r;
  try {
    r = csd(a, tc.n, opts);
  } catch (const Error& e) {
    t.add(INFINITY, 1.0, where);
    failures += where + ": " + e.what() + "; ";
    return;
  }
  const StabilityReport rep = stability_report(a, r);
  const double n = static_cast<double>(tc.n);
  t.add(rep.orth_u1, 50.0 * n, where + " orth U1");
  t.add(rep.orth_u2, 50.0 * n, where + " orth U2");
  t.add(rep.orth_v1, 50.0 * n, where + " orth V1");
  if (tc.noisy) {
    t.add(rep.scaled_residual, 10.0, where + " residual/d(A)");
  } else {
    t.add(rep.residual_2norm, 50.0 * n * u, where + " residual");
  }
  if (rank_deficient) {
    const index_t want = testgen::deficient_rank(tc.n);
    if (r.k() != want) {
      t.add(INFINITY, 1.0, where + " k");
      failures += where + ": k = " + std::to_string(r.k()) + ", expected " + std::to_string(want) + "; ";
    }
    t.add(rep.cs_identity_err, 1e2 * u, where + " C^2+S^2-I");
  }
}

Outcome class_criterion(int id, std::string description, const std::vector<int>& classes,
                        const std::vector<PolarMethod>& methods, bool rank_deficient, const Config& cfg) {
  MaxTracker t;
  std::string failures;
  for (const int cls : classes) {
    for (const bool noisy : {false, true}) {
      for (const index_t n : cfg.sizes) {
        for (int seed = 1; seed <= cfg.seeds; ++seed) {
          const testgen::TestCase tc{cls, noisy, n, static_cast<std::uint64_t>(seed)};
          for (const auto m : methods) check_class_run(tc, m, rank_deficient, t, failures);
        }
      }
    }
  }
  return finish(id, std::move(description), t, failures);
}

// Eigenvector route comparison on H1 = V C V^*, H2 = V S V^* with tiny angles.
Outcome criterion1() {
  const Matrix v = Matrix{{2.0, -1.0, 2.0}, {2.0, 2.0, -1.0}, {1.0, -2.0, -2.0}} * (1.0 / 3.0);
  const std::vector<double> theta{1e-8, 2e-8, 3e-8};
  std::vector<double> c, s;
  for (const double x : theta) {
    c.push_back(std::cos(x));
    s.push_back(std::sin(x));
  }
  const Matrix h1 = hermitian_part(matmul(scale_columns(v, c), v, Op::none, Op::adjoint));
  const Matrix h2 = hermitian_part(matmul(scale_columns(v, s), v, Op::none, Op::adjoint));
  const auto off = [&](const Matrix& w) { return max_offdiag_abs(matmul(w, h2 * w, Op::adjoint)); };

  double good = 0.0;
  double bad = INFINITY;
  for (const auto method : {EigMethod::sdc, EigMethod::direct}) {
    good = std::max(good, off(symeig(h2 - h1, method).v));
    bad = std::min(bad, off(symeig(h1, method).v));
  }
  Outcome o;
  o.id = 1;
  o.description = "eig(H2-H1) diagonalizes H2 to <= 1e-15, eig(H1) leaves >= 1e-10";
  o.pass = good <= 1e-15 && bad >= 1e-10;
  o.detail = fmt("max off-diagonal via H2-H1 = %.3g, via H1 = %.3g", good, bad);
  return o;
}

Outcome criterion4() {
  double best = 0.0;
  int witnesses = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Matrix a = testgen::generate({2, false, 30, seed});
    CsdOptions opts;
    opts.b_from_h1 = true;
    const auto r = csd(a, 30, opts);
    const double ratio = r.diag.offdiag_h2 / (u * r.diag.h2_norm2);
    best = std::max(best, ratio);
    if (ratio >= 1e3) ++witnesses;
  }
  Outcome o;
  o.id = 4;
  o.description = "B = H1 on class 2, n=30: some seed has ||offdiag(V^*H2V)|| >= 1e3 u ||H2||";
  o.pass = witnesses > 0;
  o.detail = fmt("largest ||offdiag||/(u ||H2||) = %.3g over 5 seeds, %.0f witnesses", best,
                 static_cast<double>(witnesses));
  return o;
}

Outcome criterion5() {
  MaxTracker t;
  int max_qdwh_iters = 0;
  for (int i = 0; i < 50; ++i) {
    const double kappa = std::pow(10.0, 8.0 * i / 49.0);
    const index_t n = 10 + 10 * (i % 4);
    const index_t m = n + 5 * (i % 3);
    testgen::Rng rng(static_cast<std::uint64_t>(1000 + i));
    const Matrix x = testgen::haar_stiefel(m, n, rng);
    const Matrix y = testgen::haar_stiefel(n, n, rng);
    std::vector<double> sigma(static_cast<std::size_t>(n));
    for (index_t j = 0; j < n; ++j) {
      sigma[static_cast<std::size_t>(j)] = std::pow(kappa, -static_cast<double>(j) / static_cast<double>(n - 1));
    }
    const Matrix a = matmul(scale_columns(x, sigma), y, Op::none, Op::adjoint);
    const double tol = 50.0 * static_cast<double>(n) * u * norm_fro(a);
    const std::string where = "instance " + std::to_string(i) + fmt(" (kappa %.1e)", kappa);
    for (const auto method : {PolarMethod::svd, PolarMethod::qdwh, PolarMethod::zolo}) {
      const auto f = polar(a, method);
      t.add(norm_fro(f.w * f.h - a), tol, where + " " + to_string(method));
      if (method == PolarMethod::qdwh) max_qdwh_iters = std::max(max_qdwh_iters, f.iterations);
    }
    const auto exact = polar_svd(a);
    const auto mod = polar_modified(a);
    t.add(norm2(mod.h - exact.h), 1e3 * u, where + " modified ||H~-H||");
    t.add(norm2(mod.w * mod.h - a), 1e3 * u, where + " modified ||W~H~-A||");
  }
  t.add(static_cast<double>(max_qdwh_iters), 6.0, "qdwh iterations");
  return finish(5, "polar: ||WH-A||_F <= 50nu||A||_F, qdwh <= 6 iterations, modified H and WH within 1e3 u", t,
                "max qdwh iterations = " + std::to_string(max_qdwh_iters));
}

Outcome criterion6() {
  MaxTracker t;
  for (int i = 0; i < 50; ++i) {
    const index_t n = 2 + (i * 37) % 99;
    testgen::Rng rng(static_cast<std::uint64_t>(2000 + i));
    const Matrix b = hermitian_part(testgen::complex_gaussian(n, n, rng));
    SdcTrace trace;
    const auto sdc = symeig_sdc(b, &trace);
    const auto dir = symeig_direct(b);
    const double scale = norm2(b);
    double diff = 0.0;
    for (std::size_t k = 0; k < sdc.lambda.size(); ++k) diff = std::max(diff, std::abs(sdc.lambda[k] - dir.lambda[k]));
    const std::string where = "n=" + std::to_string(n);
    t.add(diff, 1e3 * static_cast<double>(n) * u * scale, where + " eigenvalues");
    for (const auto& s : trace.splits) {
      t.add(s.projector_defect, sdc_decoupling_tolerance(s.size), where + " projector");
      t.add(s.decoupling, sdc_decoupling_tolerance(s.size) * std::max(s.b_norm_fro, 1.0), where + " decoupling");
    }
  }
  return finish(6, "symeig: sdc vs direct within 1e3 n u ||B||_2; split invariants hold", t);
}

Outcome criterion7() {
  MaxTracker t;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    testgen::Rng rng(seed + 5000);
    const index_t n = 2 + rng.below(9);
    const index_t m = n + rng.below(6);
    const index_t r = 1 + rng.below(n);
    std::vector<double> sigma;
    for (index_t i = 0; i < r; ++i) sigma.push_back(0.7 + 0.6 * rng.uniform());
    std::sort(sigma.rbegin(), sigma.rend());
    const Matrix x = testgen::haar_stiefel(m, r, rng);
    const Matrix y = testgen::haar_stiefel(n, r, rng);
    const Matrix a = matmul(scale_columns(x, sigma), y, Op::none, Op::adjoint);
    const std::string where = "seed " + std::to_string(seed);
    for (const auto norm : {NormKind::spectral, NormKind::frobenius}) {
      const auto b = isometry_sandwich(a, norm);
      // Equality holds when sigma_r is the extreme singular value, so allow for
      // the rounding error of forming AA^*A - A.
      const double slack = 10.0 * static_cast<double>(std::max(m, n)) * u;
      // Excess over each bound, in units of the slack.
      t.add(b.lower - b.middle, slack, where + " sandwich lower");
      t.add(b.middle - b.upper, slack, where + " sandwich upper");
    }

    // Near-isometry with a small perturbation for the bound.
    std::vector<double> near;
    for (index_t i = 0; i < r; ++i) near.push_back(1.0 + 1e-6 * (2.0 * rng.uniform() - 1.0));
    const Matrix e = testgen::complex_gaussian(m, n, rng) * 1e-8;
    const Matrix p = matmul(scale_columns(x, near), y, Op::none, Op::adjoint) + e;
    for (const auto norm : {NormKind::spectral, NormKind::frobenius}) {
      const double eps = 1e-6;
      const index_t k = eps_rank(p, eps, norm);
      const double dist = norm_of(p - truncated_polar_factor(p, k), norm);
      t.add(dist - nearby_isometry_bound(p, eps, norm), 10.0 * u, where + " bound");
    }
  }
  return finish(7, "partial-isometry sandwich (both norms) and nearby-isometry bound on 100 instances", t);
}

Outcome criterion8(const Config& cfg) {
  MaxTracker t;
  for (const index_t n : {10, 30}) {
    for (int seed = 1; seed <= cfg.seeds; ++seed) {
      const Matrix a = testgen::gen_haar_stiefel(2 * n, 2 * n, static_cast<std::uint64_t>(7000 + seed));
      const auto r = csd_2x2(a);
      const std::string where = "n=" + std::to_string(n) + " seed=" + std::to_string(seed);
      const double tol = 50.0 * static_cast<double>(n) * u;
      t.add(norm2(reconstruct(r) - a), tol, where + " residual");
      t.add(orth_defect_2(r.v2), tol, where + " V2 orth");
    }
  }
  return finish(8, "complete 2x2 CSD of Haar unitaries: residual and V2 orthogonality <= 50 n u", t);
}

Outcome criterion9(const Config& cfg, const std::vector<Outcome>& earlier) {
  bool substitutes = true;
  for (const int id : {2, 3}) {
    const auto it = std::find_if(earlier.begin(), earlier.end(), [&](const Outcome& o) { return o.id == id; });
    substitutes = substitutes && (it != earlier.end() ? it->pass : run_criterion(id, cfg).pass);
  }
  // The numeric table cells are machine- and seed-dependent; what can be pinned
  // is that the property-based substitutes hold and our own runs repeat exactly.
  const testgen::TestCase tc{2, true, 30, 1};
  const Matrix a = testgen::generate(tc);
  const auto r1 = stability_report(a, csd(a, 30));
  const auto r2 = stability_report(a, csd(a, 30));
  const bool repeatable = r1.residual_2norm == r2.residual_2norm && r1.orth_u1 == r2.orth_u1 &&
                          r1.orth_u2 == r2.orth_u2 && r1.orth_v1 == r2.orth_v1;
  Outcome o;
  o.id = 9;
  o.description = "numeric table cells are machine and seed dependent and not reproduced; property substitutes (2, 3) hold and runs repeat";
  o.pass = substitutes && repeatable;
  o.detail = std::string("criteria 2 and 3 ") + (substitutes ? "pass" : "fail") + ", repeated run " +
             (repeatable ? "identical" : "differs");
  return o;
}

}  // namespace

Outcome run_criterion(int id, const Config& cfg, const std::vector<Outcome>& earlier) {
  switch (id) {
    case 1:
      return criterion1();
    case 2:
      return class_criterion(2, "full rank, classes 1, 2 (and noisy), svd + qdwh: orth <= 50n, residual <= 50nu or <= 10 d(A)",
                             {1, 2}, {PolarMethod::svd, PolarMethod::qdwh}, false, cfg);
    case 3:
      return class_criterion(3, "rank deficient, classes 3, 4 (and noisy), svd + qdwh: same thresholds, k = nint(3n/4), C^2+S^2 = I within 1e2 u",
                             {3, 4}, {PolarMethod::svd, PolarMethod::qdwh}, true, cfg);
    case 4:
      return criterion4();
    case 5:
      return criterion5();
    case 6:
      return criterion6();
    case 7:
      return criterion7();
    case 8:
      return criterion8(cfg);
    case 9:
      return criterion9(cfg, earlier);
    default:
      throw PreconditionError("unknown acceptance criterion " + std::to_string(id));
  }
}

std::string format_line(const Outcome& o) {
  return std::string(o.pass ? "PASS" : "FAIL") + " " + std::to_string(o.id) + " " + o.description + " | " + o.detail;
}

std::vector<Outcome> run_all(std::ostream& out, const Config& cfg) {
  std::vector<Outcome> all;
  for (int id = 1; id <= 9; ++id) {
    Outcome o;
    try {
      o = run_criterion(id, cfg, all);
    } catch (const std::exception& e) {
      o.id = id;
      o.pass = false;
      o.description = "criterion " + std::to_string(id);
      o.detail = std::string("exception: ") + e.what();
    }
    out << format_line(o) << std::endl;
    all.push_back(std::move(o));
  }
  return all;
}

}  // namespace csdk::acceptance
