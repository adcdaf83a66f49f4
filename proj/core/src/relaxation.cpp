#include "llob/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "llob/error.hpp"
#include "llob/numerics.hpp"
#include "llob/scaling_shape.hpp"

namespace llob {

namespace nm = numerics;

double decay_propagator_ratio(double t, double T) {
  if (!(T > 0.0) || !(t >= T)) fail(ErrorCode::ParameterOutOfRange, "need t >= T > 0");
  return (std::sqrt(t) - std::sqrt(t - T)) / std::sqrt(T);
}

namespace {

// Book at time T + delta^2 T evaluated at u = a (units of sqrt(D T)), divided by m0 sqrt(T/D).
double evolved_book(const ScalingShape& shape, double a, double delta, double rel_tol) {
  const double A = shape.A();
  constexpr double W = 12.0;
  auto f = [&](double w) {
    return shape.full_book(a + 2.0 * delta * w) * std::exp(-w * w) * nm::kInvSqrtPi;
  };
  std::vector<double> cuts{-W, W};
  for (double u : {A, 0.0, -10.0, A + 10.0}) {
    const double w = (u - a) / (2.0 * delta);
    if (w > -W && w < W) cuts.push_back(w);
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) total += nm::integrate(f, cuts[i], cuts[i + 1], rel_tol).value;
  return total;
}

}  // namespace

PricePath decay_trajectory(double m0, double T, std::span<const double> times,
                           const ModelParams& params, double rel_tol) {
  if (!(m0 > 0.0) || !(T > 0.0)) fail(ErrorCode::NonPositiveParameter, "m0 and T must be positive");
  const double r = m0 / params.J;
  const ScalingShape shape(r);
  const double A = shape.A();
  const double unit = std::sqrt(params.D * T);  // price per unit of a
  PricePath out;
  for (double t : times) {
    if (!(t > T)) fail(ErrorCode::ParameterOutOfRange, "decay times must exceed T");
    const double delta = std::sqrt((t - T) / T);
    auto phi = [&](double a) { return evolved_book(shape, a, delta, rel_tol); };
    double lo = 0.0;
    double hi = A;
    double f_lo = phi(lo);
    double f_hi = phi(hi);
    while (f_hi > 0.0 && hi < 64.0 * (A + 1.0)) {
      lo = hi;
      f_lo = f_hi;
      hi *= 2.0;
      f_hi = phi(hi);
    }
    const double a = nm::find_root(phi, lo, hi, f_lo, f_hi, 1e-14);
    out.t.push_back(t);
    out.y.push_back(a * unit);
    out.residual.push_back(phi(a) * r * unit);
  }
  return out;
}

PricePath decay_trajectory(double m0, double T, double t_max, const ModelParams& params,
                           std::size_t n_points) {
  if (!(t_max > T)) fail(ErrorCode::ParameterOutOfRange, "t_max must exceed T");
  const auto offsets = nm::logspace(-6.0, std::log10((t_max - T) / T), n_points);
  std::vector<double> times;
  times.reserve(offsets.size());
  for (double o : offsets) times.push_back(T + o * T);
  times.back() = t_max;
  return decay_trajectory(m0, T, times, params);
}

double decay_equation_residual(double m0, double T, double t, double y, const ModelParams& params) {
  const auto schedule = TradingSchedule::constant(m0, T);
  const double A = solve_A(m0 / params.J);
  const double sd = std::sqrt(params.D);
  auto path = [A, sd](double s) { return A * sd * std::sqrt(std::max(s, 0.0)); };
  return y - price_equation_rhs(schedule, params, path, t, y);
}

namespace {

std::optional<double> first_return(const PricePath& path, double T) {
  for (std::size_t k = 1; k < path.size(); ++k) {
    if (path.t[k] <= T) continue;
    if (path.y[k] <= 0.0) {
      const double y0 = path.y[k - 1];
      const double y1 = path.y[k];
      if (y0 == y1) return path.t[k];
      return path.t[k - 1] + (path.t[k] - path.t[k - 1]) * y0 / (y0 - y1);
    }
  }
  return std::nullopt;
}

}  // namespace

ReversalResult reversal_trajectory(double m0, double T, const ModelParams& params,
                                   const SolverConfig& config) {
  if (!(m0 > 0.0) || !(T > 0.0)) fail(ErrorCode::NonPositiveParameter, "m0 and T must be positive");
  const auto schedule = TradingSchedule::buy_then_sell(m0, T);
  const double A = solve_A(m0 / params.J);
  const double sd = std::sqrt(params.D);
  const KnownHistory growth{T, [A, sd](double s) { return A * sd * std::sqrt(std::max(s, 0.0)); }};
  const double dt = config.dt > 0.0 ? config.dt : T / 2000.0;

  const auto coarse_grid = marching_grid(schedule, dt, 2.0 * T);
  const auto coarse = solve_price_path(schedule, params, config, coarse_grid, growth);
  const auto t_coarse = first_return(coarse, T);
  if (!t_coarse) fail(ErrorCode::NoReturnWithinHorizon, "price did not return to zero by 2T");

  std::vector<double> grid = coarse_grid;
  const double from = std::max(T, *t_coarse - 20.0 * dt);
  const double to = std::min(2.0 * T, *t_coarse + 2.0 * dt);
  const double fine = dt / 10.0;
  for (double t = from + fine; t < to; t += fine) grid.push_back(t);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [fine](double a, double b) { return b - a < 1e-6 * fine; }),
             grid.end());

  ReversalResult out;
  out.path = solve_price_path(schedule, params, config, grid, growth);
  const auto t_ret = first_return(out.path, T);
  if (!t_ret) fail(ErrorCode::NoReturnWithinHorizon, "price did not return to zero by 2T");
  out.return_time = *t_ret;
  return out;
}

}  // namespace llob
