#include "llob/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "llob/error.hpp"

namespace llob::numerics {

namespace {

GaussRule build_gauss_legendre(std::size_t n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
      p0 = p1;
      p1 = pk;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    if (n == 1) {
      slot = std::make_unique<GaussRule>(GaussRule{{0.0}, {2.0}});
    } else {
      slot = std::make_unique<GaussRule>(build_gauss_legendre(n));
    }
  }
  return *slot;
}

double gauss_fixed(const std::function<double(double)>& f, double a, double b, std::size_t n) {
  const auto& rule = gauss_legendre(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol, unsigned max_depth) {
  QuadratureResult out;
  if (a == b) return out;
  out.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, max_depth, rel_tol, &out.error, &out.l1);
  if (!std::isfinite(out.value)) fail(ErrorCode::QuadratureFailure, "non-finite integral");
  return out;
}

QuadratureResult integrate_endpoint_singular(const std::function<double(double)>& f, double a,
                                             double b, double rel_tol) {
  QuadratureResult out;
  if (a == b) return out;
  static thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  out.value = integrator.integrate(f, a, b, rel_tol, &out.error, &out.l1);
  if (!std::isfinite(out.value)) fail(ErrorCode::QuadratureFailure, "non-finite integral");
  return out;
}

double erfcx(double x) {
  if (x < 25.0) return std::exp(x * x) * std::erfc(x);
  // asymptotic series, terms decrease monotonically for x >= 25 well past double precision
  const double inv2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n < 30; ++n) {
    term *= -(2.0 * n - 1.0) * inv2x2;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / (x * kSqrtPi);
}

double erfcx_deficit(double x) {
  if (x < 8.0) return kInvSqrtPi - x * erfcx(x);
  // 1/sqrt(pi) * sum_{n>=1} (-1)^{n+1} (2n-1)!! / (2x^2)^n, avoids the cancellation
  const double inv2x2 = 1.0 / (2.0 * x * x);
  double term = inv2x2;
  double sum = term;
  for (int n = 2; n < 40; ++n) {
    term *= -(2.0 * n - 1.0) * inv2x2;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum * kInvSqrtPi;
}

double find_root(const std::function<double(double)>& f, double lo, double hi, double f_lo,
                 double f_hi, double rel_tol, unsigned max_iter) {
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo < 0.0) == (f_hi < 0.0)) fail(ErrorCode::BracketFailure, "no sign change in bracket");
  std::uintmax_t iters = max_iter;
  rel_tol = std::max(rel_tol, 4.0 * std::numeric_limits<double>::epsilon());
  auto tol = [rel_tol](double a, double b) {
    return std::abs(b - a) <= rel_tol * std::max(std::abs(a), std::abs(b)) ||
           std::abs(b - a) <= std::numeric_limits<double>::min() * 4;
  };
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, iters);
  return 0.5 * (a + b);
}

double find_root(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
                 unsigned max_iter) {
  return find_root(f, lo, hi, f(lo), f(hi), rel_tol, max_iter);
}

Bracket bracket_sign_change(const std::function<double(double)>& f, double guess, double step,
                            unsigned max_expansions) {
  double f0 = f(guess);
  if (f0 == 0.0) return {guess, guess, 0.0, 0.0};
  double lo = guess;
  double hi = guess;
  double f_lo = f0;
  double f_hi = f0;
  for (unsigned i = 0; i < max_expansions; ++i) {
    const double new_hi = hi + step;
    const double f_new_hi = f(new_hi);
    if ((f_new_hi < 0.0) != (f_hi < 0.0) || f_new_hi == 0.0) return {hi, new_hi, f_hi, f_new_hi};
    hi = new_hi;
    f_hi = f_new_hi;
    const double new_lo = lo - step;
    const double f_new_lo = f(new_lo);
    if ((f_new_lo < 0.0) != (f_lo < 0.0) || f_new_lo == 0.0) return {new_lo, lo, f_new_lo, f_lo};
    lo = new_lo;
    f_lo = f_new_lo;
    step *= 2.0;
  }
  fail(ErrorCode::BracketFailure, "could not bracket a sign change");
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i)
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  out.back() = b;
  return out;
}

std::vector<double> logspace(double log10_a, double log10_b, std::size_t n) {
  auto exps = linspace(log10_a, log10_b, n);
  for (auto& e : exps) e = std::pow(10.0, e);
  return exps;
}

double interp_linear(std::span<const double> xs, std::span<const double> ys, double x) {
  if (xs.empty()) return 0.0;
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const auto j = static_cast<std::size_t>(it - xs.begin());
  const double w = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return (1.0 - w) * ys[j - 1] + w * ys[j];
}

}  // namespace llob::numerics
