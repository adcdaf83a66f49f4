#pragma once

#include <array>
#include <span>

#include "llob/model.hpp"
#include "llob/schedule.hpp"

namespace llob {

// m and its first three time derivatives at one instant.
struct RateJet {
  double m = 0.0;
  std::array<double, 3> dm{};  // m', m'', m'''
};

// First four time derivatives of y at one instant.
struct PriceJet {
  double y = 0.0;
  std::array<double, 4> dy{};  // y', y'', y''', y''''
};

// Contributions of each order in D / (m-scale) to L y |y'|, large-rate expansion
// of the price equation. Order n carries D^n.
struct ExpansionTerms {
  std::array<double, 4> order{};

  [[nodiscard]] double sum(int up_to) const;
};

ExpansionTerms expansion_terms(const RateJet& m, const PriceJet& y, double D);

// m times the bracket truncated after `order` (0..3).
double expansion_rhs(const RateJet& m, const PriceJet& y, double D, int order);

RateJet rate_jet(const TradingSchedule& schedule, double t);

// Derivatives of sqrt(2 Q / L) from those of Q (Q, m, m', m'', m''').
PriceJet leading_jet(const TradingSchedule& schedule, double L, double t);

// y = sqrt(2 Q / L) on the given times.
PricePath leading_trajectory(const TradingSchedule& schedule, const ModelParams& params,
                             std::span<const double> times);

// (1/2) L y^2 = Q - J (t + 2 Q / m).
PricePath first_order_trajectory(const TradingSchedule& schedule, const ModelParams& params,
                                 std::span<const double> times);

// Right-hand side of the inverted relation L y y' = m + J(...) + J^2(...).
// In the J^2 bracket the lone `s` multiplying m'/m^2 is read as the current
// time and the history integral runs from 0 to t. Validation use only.
double inverted_rhs(const TradingSchedule& schedule, const ModelParams& params, double t,
                    int order);

// integral of m y over [0, T] with y from the leading (order 0) or first-order
// trajectory; order 1 integrates the J-linearized integrand.
double execution_cost(const TradingSchedule& schedule, const ModelParams& params, int order);

// (2/3) sqrt(2/L) Q^{3/2} [1 - 3 J T / (2 Q)] (order 1), bracket dropped at order 0.
double execution_cost_closed_form(double Q, double T, const ModelParams& params, int order);

}  // namespace llob
