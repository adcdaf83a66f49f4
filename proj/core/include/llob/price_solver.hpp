#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "llob/model.hpp"
#include "llob/schedule.hpp"

namespace llob {

struct SolverConfig {
  double dt = 0.0;             // 0 means horizon / 2000
  double tolerance = 1e-10;    // relative, on the fixed-point defect
  int max_iterations = 200;
  int quad_nodes = 64;         // Gauss points on the singular (latest) interval
  double damping = 0.5;

  void validate() const;
};

// A stretch of price history supplied exactly instead of being solved for,
// e.g. the constant-rate law on [0, T] when only the decay is of interest.
struct KnownHistory {
  double t_end = 0.0;
  std::function<double(double)> y;  // physical units
};

// Marches y_t on t_k = k dt (schedule breakpoints are inserted into the grid).
PricePath solve_price_path(const TradingSchedule& schedule, const ModelParams& params,
                           const SolverConfig& config = {});

// Same on a caller-supplied increasing grid starting at 0. Points up to
// history->t_end are filled from the known history.
PricePath solve_price_path(const TradingSchedule& schedule, const ModelParams& params,
                           const SolverConfig& config, std::span<const double> times,
                           const std::optional<KnownHistory>& history = std::nullopt);

// Linear limit: y_t = (1/L) int_0^t m_s ds / sqrt(4 pi D (t - s)), exact per segment.
double propagator_value(const TradingSchedule& schedule, const ModelParams& params, double t);
PricePath propagator_price(const TradingSchedule& schedule, const ModelParams& params,
                           std::span<const double> times);
PricePath propagator_price(const TradingSchedule& schedule, const ModelParams& params,
                           double dt = 0.0);

// Right-hand side of the self-consistent price equation at time t for a trial
// price y, given the past path. Adaptive quadrature; used as an independent check.
double price_equation_rhs(const TradingSchedule& schedule, const ModelParams& params,
                          const std::function<double(double)>& path, double t, double y,
                          double rel_tol = 1e-13);

// Amplitude of the exact constant-rate solution y = A sqrt(D t).
double solve_A(double rate_ratio);
double y_ratio(double rate_ratio);
double impact(double Q, double m0, const ModelParams& params);

// Time grid used by solve_price_path: multiples of dt plus breakpoints.
std::vector<double> marching_grid(const TradingSchedule& schedule, double dt, double t_end);

}  // namespace llob
