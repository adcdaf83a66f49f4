#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

// Shared numerical kernels: Gauss rules, adaptive quadrature and bracketed
// root finding (Boost.Math underneath), plus the scaled error functions used
// by the closed-form book shapes.
namespace llob::numerics {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrtPi = 1.77245385090551602730;
inline constexpr double kInvSqrtPi = 0.56418958354775628695;

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule with n points. Rules are cached; the reference stays valid.
const GaussRule& gauss_legendre(std::size_t n);

// Integrates f over [a, b] with a fixed Gauss-Legendre rule.
double gauss_fixed(const std::function<double(double)>& f, double a, double b, std::size_t n);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

// Adaptive Gauss-Kronrod. Infinite limits are allowed. The tolerance is
// relative to the L1 norm of the integrand, so sign-changing integrands that
// nearly cancel do not force pointless refinement.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-12, unsigned max_depth = 15);

// Double-exponential rule for integrands with endpoint singularities.
QuadratureResult integrate_endpoint_singular(const std::function<double(double)>& f, double a,
                                             double b, double rel_tol = 1e-12);

// exp(x^2) erfc(x), finite for all x >= 0 without overflow.
double erfcx(double x);

// 1/sqrt(pi) - x erfcx(x); positive for x >= 0, ~ 1/(2 sqrt(pi) x^2) at large x.
double erfcx_deficit(double x);

// Root of f in [lo, hi]; requires a sign change. Uses TOMS 748.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double rel_tol = 1e-14, unsigned max_iter = 200);

// Same, with the end values already known.
double find_root(const std::function<double(double)>& f, double lo, double hi, double f_lo,
                 double f_hi, double rel_tol, unsigned max_iter = 200);

struct Bracket {
  double lo, hi, f_lo, f_hi;
};

// Expands geometrically outward from `guess` until f changes sign.
// Throws BracketFailure after max_expansions.
Bracket bracket_sign_change(const std::function<double(double)>& f, double guess, double step,
                            unsigned max_expansions = 80);

// Evenly spaced and log-spaced grids.
std::vector<double> linspace(double a, double b, std::size_t n);
std::vector<double> logspace(double log10_a, double log10_b, std::size_t n);

// Linear interpolation on a sorted abscissa; clamps outside the range.
double interp_linear(std::span<const double> xs, std::span<const double> ys, double x);

}  // namespace llob::numerics
