#include "csdk/zolotarev.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "csdk/errors.hpp"

namespace csdk {

namespace {

constexpr double smallest_ell = 1e-20;

double agm(double a, double b) {
  for (int i = 0; i < 64; ++i) {
    const double an = 0.5 * (a + b);
    const double bn = std::sqrt(a * b);
    if (std::abs(an - bn) <= 1e-17 * an) return an;
    a = an;
    b = bn;
  }
  return 0.5 * (a + b);
}

template <class F>
double golden_extremum(F f, double lo, double hi, bool maximize) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  auto val = [&](double x) { return maximize ? f(x) : -f(x); };
  double a = lo;
  double b = hi;
  double x1 = b - g * (b - a);
  double x2 = a + g * (b - a);
  double f1 = val(x1);
  double f2 = val(x2);
  for (int it = 0; it < 80 && (b - a) > 1e-15 * b; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = val(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = val(x1);
    }
  }
  return maximize ? std::max(f1, f2) : -std::max(f1, f2);
}

struct Extrema {
  double min;
  double max;
};

// Extrema of f over [ell, 1] from a log-spaced grid, with each interior
// local extremum refined by golden-section search.
template <class F>
Extrema extrema_on_interval(F f, double ell) {
  constexpr int points = 2000;
  const double lo = std::log(ell);
  std::vector<double> xs(points + 1);
  std::vector<double> fs(points + 1);
  for (int i = 0; i <= points; ++i) {
    xs[i] = i == points ? 1.0 : std::exp(lo * (1.0 - static_cast<double>(i) / points));
    if (i == 0) xs[i] = ell;
    fs[i] = f(xs[i]);
  }
  Extrema e{std::min(fs.front(), fs.back()), std::max(fs.front(), fs.back())};
  for (int i = 1; i < points; ++i) {
    if (fs[i] >= fs[i - 1] && fs[i] >= fs[i + 1]) {
      e.max = std::max(e.max, golden_extremum(f, xs[i - 1], xs[i + 1], true));
    }
    if (fs[i] <= fs[i - 1] && fs[i] <= fs[i + 1]) {
      e.min = std::min(e.min, golden_extremum(f, xs[i - 1], xs[i + 1], false));
    }
  }
  return e;
}

}  // namespace

double elliptic_k_from_complement(double kc) {
  return std::numbers::pi / (2.0 * agm(1.0, kc));
}

JacobiSnCnDn jacobi_sncndn(double x, double mc) {
  if (mc <= 0.0) {
    const double ch = std::cosh(x);
    return {std::tanh(x), 1.0 / ch, 1.0 / ch};
  }
  std::array<double, 32> em{};
  std::array<double, 32> en{};
  double a = 1.0;
  double emc = mc;
  double c = 1.0;
  double dn = 1.0;
  std::size_t l = 0;
  for (std::size_t i = 0; i < em.size(); ++i) {
    l = i;
    em[i] = a;
    emc = std::sqrt(emc);
    en[i] = emc;
    c = 0.5 * (a + emc);
    if (std::abs(a - emc) <= 1e-9 * a) break;
    emc *= a;
    a = c;
  }
  const double u = x * c;
  double sn = std::sin(u);
  double cn = std::cos(u);
  if (sn != 0.0) {
    a = cn / sn;
    c *= a;
    for (std::size_t ii = l + 1; ii-- > 0;) {
      const double b = em[ii];
      a *= c;
      c *= dn;
      dn = (en[ii] + a) / (b + a);
      a = c / b;
    }
    a = 1.0 / std::sqrt(c * c + 1.0);
    sn = sn >= 0.0 ? a : -a;
    cn = c * sn;
  }
  return {sn, cn, dn};
}

std::vector<double> zolotarev_coefficients(double ell, int p) {
  if (p < 1) throw PreconditionError("zolotarev_coefficients: p must be positive");
  ell = std::clamp(ell, smallest_ell, 1.0);
  const double kprime = elliptic_k_from_complement(ell);
  const double mc = ell * ell;
  std::vector<double> c(static_cast<std::size_t>(2 * p));
  for (int i = 1; i <= 2 * p; ++i) {
    const auto f = jacobi_sncndn(i * kprime / (2 * p + 1), mc);
    const double ratio = f.sn / f.cn;
    c[static_cast<std::size_t>(i - 1)] = mc * ratio * ratio;
  }
  return c;
}

RationalStep dwh_step(double ell) {
  ell = std::clamp(ell, smallest_ell, 1.0);
  const double l2 = ell * ell;
  const double gamma = std::cbrt(4.0 * (1.0 - l2) / (l2 * l2));
  const double sg = std::sqrt(1.0 + gamma);
  const double a = sg + 0.5 * std::sqrt(8.0 - 4.0 * gamma + 8.0 * (2.0 - l2) / (l2 * sg));
  const double b = (a - 1.0) * (a - 1.0) / 4.0;
  const double c = a + b - 1.0;
  // x (a + b x^2) / (1 + c x^2) = (b/c) x + ((a - b/c) / c) x / (x^2 + 1/c)
  RationalStep s;
  s.alpha = b / c;
  s.beta = {(a - b / c) / c};
  s.gamma = {1.0 / c};
  s.ell_in = ell;
  s.ell_out = std::min(1.0, ell * (a + b * l2) / (1.0 + c * l2));
  return s;
}

RationalStep zolotarev_step(double ell, int p) {
  ell = std::clamp(ell, smallest_ell, 1.0);
  const auto c = zolotarev_coefficients(ell, p);

  RationalStep s;
  s.alpha = 1.0;
  s.ell_in = ell;
  for (int j = 0; j < p; ++j) {
    const double pole = c[static_cast<std::size_t>(2 * j)];
    double num = 1.0;
    double den = 1.0;
    for (int k = 0; k < p; ++k) {
      num *= c[static_cast<std::size_t>(2 * k + 1)] - pole;
      if (k != j) den *= c[static_cast<std::size_t>(2 * k)] - pole;
    }
    s.beta.push_back(num / den);
    s.gamma.push_back(pole);
  }
  // Normalize the partial-fraction form itself, so that rounding in the
  // residues is absorbed by the scale factor instead of showing up as an
  // offset from 1 after the last step.
  const auto ext = extrema_on_interval([&](double x) { return apply_step(s, x); }, ell);
  const double m = 1.0 / ext.max;
  s.alpha = m;
  for (auto& b : s.beta) b *= m;
  s.ell_out = std::min(1.0, m * ext.min);
  return s;
}

std::vector<RationalStep> sign_schedule(const SignApproxParams& params) {
  if (params.p < 1 || params.p > 8) throw PreconditionError("sign_schedule: p must be in [1, 8]");
  if (!(params.ell > 0.0)) throw PreconditionError("sign_schedule: ell must be positive");
  std::vector<RationalStep> steps;
  double ell = std::min(params.ell, 1.0);
  if (params.p == 1 && params.iterations == 0) {
    do {
      steps.push_back(dwh_step(ell));
      ell = steps.back().ell_out;
    } while (1.0 - ell > qdwh_converged_gap && static_cast<int>(steps.size()) < qdwh_iteration_cap);
    return steps;
  }
  const int iters = params.iterations > 0 ? params.iterations : 2;
  for (int k = 0; k < iters; ++k) {
    steps.push_back(params.p == 1 ? dwh_step(ell) : zolotarev_step(ell, params.p));
    ell = steps.back().ell_out;
  }
  return steps;
}

double apply_step(const RationalStep& step, double x) {
  // Neumaier summation: the terms are O(1) near x = 1 and cancel nowhere, but
  // eight plain additions already cost several ulps of the result.
  const double x2 = x * x;
  double sum = step.alpha * x;
  double comp = 0.0;
  for (std::size_t j = 0; j < step.beta.size(); ++j) {
    const double t = step.beta[j] * x / (x2 + step.gamma[j]);
    const double s = sum + t;
    comp += std::abs(sum) >= std::abs(t) ? (sum - s) + t : (t - s) + sum;
    sum = s;
  }
  return sum + comp;
}

double eval_sign_approx(double x, const SignApproxParams& params) {
  for (const auto& s : sign_schedule(params)) x = apply_step(s, x);
  return x;
}

int choose_zolo_degree(double ell, double tol) {
  ell = std::clamp(ell, smallest_ell, 1.0);
  for (int p = 1; p <= 8; ++p) {
    const auto steps = sign_schedule({.p = p, .ell = ell, .iterations = 2});
    if (1.0 - steps.back().ell_out <= tol) return p;
  }
  return 8;
}

}  // namespace csdk
