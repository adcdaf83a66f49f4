#pragma once

#include <span>

#include "llob/model.hpp"
#include "llob/price_solver.hpp"
#include "llob/schedule.hpp"

namespace llob {

// (sqrt(t) - sqrt(t - T)) / sqrt(T): normalized decay in the linear limit.
double decay_propagator_ratio(double t, double T);

// Price after a constant-rate buy of m0 over [0, T], at each requested t > T.
// The book at T is the exact self-similar profile; the price at t is the zero
// of its heat-kernel evolution. Residuals are the book value at the returned
// price divided by L (price units).
PricePath decay_trajectory(double m0, double T, std::span<const double> times,
                           const ModelParams& params, double rel_tol = 1e-12);

// n points with t - T log-spaced from 1e-6 T to t_max - T.
PricePath decay_trajectory(double m0, double T, double t_max, const ModelParams& params,
                           std::size_t n_points = 200);

// Defect of the price equation during decay, y - rhs, with the growth path
// A sqrt(D s) on [0, T]. Independent of decay_trajectory; accurate for moderate m0/J.
double decay_equation_residual(double m0, double T, double t, double y, const ModelParams& params);

struct ReversalResult {
  PricePath path;
  double return_time = 0.0;  // first t > T with y_t = 0
};

// +m0 on [0, T], -m0 on (T, 2T]; the growth phase uses the exact constant-rate
// law and the marching grid is refined tenfold near the zero crossing.
ReversalResult reversal_trajectory(double m0, double T, const ModelParams& params,
                                   const SolverConfig& config = {});

}  // namespace llob
