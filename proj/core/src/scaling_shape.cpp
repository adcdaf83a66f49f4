#include "llob/scaling_shape.hpp"

#include <algorithm>
#include <cmath>

#include "llob/error.hpp"
#include "llob/numerics.hpp"
#include "llob/price_solver.hpp"

namespace llob {

namespace nm = numerics;

namespace {

// sqrt(pi) q(u/2) / u, where e^{-u^2/4} p(u) = int_u^inf e^{-v^2/4} / v^2 dv
double p_fn(double u) { return nm::kSqrtPi * nm::erfcx_deficit(0.5 * u) / u; }

// int_a^b e^{-v^2/4} / v^2 dv by Gauss-Legendre; for short intervals away from 0
double gl_inv_sq(double a, double b, double shift) {
  return nm::gauss_fixed(
      [shift](double v) { return std::exp(-(v * v - shift) / 4.0) / (v * v); }, a, b, 48);
}

constexpr double kNear = 1.0;  // switch to direct quadrature within this distance of A

}  // namespace

ScalingShape::ScalingShape(double rate_ratio) : ScalingShape(rate_ratio, solve_A(rate_ratio)) {}

ScalingShape::ScalingShape(double rate_ratio, double A) : r_(rate_ratio), A_(A) {
  if (!(rate_ratio > 0.0)) fail(ErrorCode::NonPositiveParameter, "rate ratio must be positive");
  F0_ = nm::erfcx_deficit(0.5 * A_);
  c_ = F0_ * std::exp(-A_ * A_ / 4.0) + A_;
}

double ScalingShape::full_book(double u) const {
  if (u <= A_) {
    // F0 u int_u^A e^{-v^2/4}/v^2 dv
    if (u > 0.5 * A_ && A_ - u < std::min(kNear, 0.5 * A_)) return F0_ * u * gl_inv_sq(u, A_, 0.0);
    const double ea = std::exp(-A_ * A_ / 4.0);
    return F0_ * (std::exp(-u * u / 4.0) - u * ea / A_ -
                  0.5 * nm::kSqrtPi * u * (std::erfc(0.5 * u) - std::erfc(0.5 * A_)));
  }
  // -u c e^{A^2/4} int_A^u e^{-v^2/4}/v^2 dv
  if (u - A_ < std::min(kNear, 0.5 * A_)) return -u * c_ * gl_inv_sq(A_, u, A_ * A_);
  return -u * c_ * (p_fn(A_) - std::exp(-(u - A_) * (u + A_) / 4.0) * p_fn(u));
}

double ScalingShape::F(double u) const {
  if (u > A_ + kNear) {
    // F(A) = A/r and decay fix the branch; positive without relying on the
    // amplitude equation to cancel the linear parts
    return u / r_ * std::exp(-(u - A_) * (u + A_) / 4.0) * p_fn(u) / p_fn(A_);
  }
  return u / r_ + full_book(u);
}

double ScalingShape::G(double u) const { return F(u) / u; }

double ScalingShape::H(double u) const {
  const double e = std::exp(-u * u / 4.0) / (u * u);
  if (u < A_) return -F0_ * e;
  return -c_ * std::exp(-(u - A_) * (u + A_) / 4.0) / (u * u);
}

double ScalingShape::dF(double u) const {
  if (u < A_) {
    const double ea = std::exp(-A_ * A_ / 4.0);
    return 1.0 / r_ -
           F0_ * (ea / A_ + 0.5 * nm::kSqrtPi * (std::erfc(0.5 * u) - std::erfc(0.5 * A_)));
  }
  return G(u) + u * H(u);
}

double ScalingShape::slope_minus() const {
  return 1.0 / r_ - F0_ / A_ * std::exp(-A_ * A_ / 4.0);
}

double ScalingShape::slope_plus() const { return slope_minus() - 1.0; }

double shape_F(double u, double rate_ratio) { return ScalingShape(rate_ratio).F(u); }

double shape_F0(double rate_ratio) { return ScalingShape(rate_ratio).F0(); }

ScalingSolution tabulate_shape(double rate_ratio, std::size_t n) {
  if (n < 4) fail(ErrorCode::ConfigError, "need at least 4 points");
  const ScalingShape shape(rate_ratio);
  const double A = shape.A();
  ScalingSolution out;
  out.rate_ratio = rate_ratio;
  out.A = A;
  out.F0 = shape.F0();
  out.slope_minus = shape.slope_minus();
  out.slope_plus = shape.slope_plus();
  const std::size_t below = n / 2;
  const std::size_t above = n - below;
  // quadratic clustering toward u = A from both sides
  for (std::size_t i = 1; i <= below; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(below);
    out.u.push_back(A * (1.0 - (1.0 - s) * (1.0 - s)));
  }
  for (std::size_t i = 1; i <= above; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(above);
    out.u.push_back(A + 10.0 * s * s);
  }
  for (double u : out.u) {
    out.F.push_back(shape.F(u));
    out.G.push_back(shape.G(u));
    out.H.push_back(shape.H(u));
  }
  return out;
}

PriceSlopes slopes_at_price(double rate_ratio) {
  const ScalingShape s(rate_ratio);
  return {s.slope_minus(), s.slope_plus()};
}

double initial_relaxation_root(double rate_ratio) {
  const ScalingShape s(rate_ratio);
  const double A = s.A();
  const double qa = s.F0();
  // log of  z F0 e^{-A^2/4} / A = e^{-z^2/4} q(z/2); the full-book slopes enter
  // through J/m0 - F'(A-) and the unit slope jump.
  auto g = [A, qa](double z) {
    return std::log(z * qa / A) + (z * z - A * A) / 4.0 - std::log(nm::erfcx_deficit(0.5 * z));
  };
  const double lo = std::min(1e-6, 0.5 * A);
  const double hi = std::max(2.0 * A, 10.0);
  try {
    return nm::find_root(g, lo, hi, 1e-15);
  } catch (const Error&) {
    fail(ErrorCode::RootFindFailure, "initial relaxation root not bracketed");
  }
}

}  // namespace llob
