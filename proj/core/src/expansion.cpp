#include "llob/expansion.hpp"

#include <cmath>
#include <string>

#include "llob/error.hpp"
#include "llob/numerics.hpp"

namespace llob {

namespace nm = numerics;

double ExpansionTerms::sum(int up_to) const {
  if (up_to < 0 || up_to > 3) fail(ErrorCode::ParameterOutOfRange, "expansion order must be 0..3");
  double s = 0.0;
  for (int n = 0; n <= up_to; ++n) s += order[static_cast<std::size_t>(n)];
  return s;
}

ExpansionTerms expansion_terms(const RateJet& mj, const PriceJet& yj, double D) {
  const double v = yj.dy[0];
  if (v == 0.0) fail(ErrorCode::StationaryPriceSingularity, "expansion needs a moving price");
  const double m = mj.m, m1 = mj.dm[0], m2 = mj.dm[1], m3 = mj.dm[2];
  const double y2 = yj.dy[1], y3 = yj.dy[2], y4 = yj.dy[3];
  const double v2 = v * v, v3 = v2 * v;
  // terms already multiplied by m, so m = 0 needs no special case
  ExpansionTerms e;
  e.order[0] = m;
  e.order[1] = D * (3.0 * m * y2 / v3 - 2.0 * m1 / v2);
  e.order[2] = D * D * (6.0 * m2 * v2 - 30.0 * m1 * y2 * v - 10.0 * m * y3 * v + 45.0 * m * y2 * y2) /
               (v3 * v3);
  const double b3 = -4.0 * m3 * v3 + 42.0 * m2 * y2 * v2 + 28.0 * m1 * y3 * v2 + 7.0 * m * y4 * v2 -
                    168.0 * m1 * y2 * y2 * v - 112.0 * m * y2 * y3 * v + 252.0 * m * y2 * y2 * y2;
  e.order[3] = 5.0 * D * D * D * b3 / (v3 * v3 * v3);
  return e;
}

double expansion_rhs(const RateJet& m, const PriceJet& y, double D, int order) {
  return expansion_terms(m, y, D).sum(order);
}

RateJet rate_jet(const TradingSchedule& schedule, double t) {
  return {schedule.rate(t),
          {schedule.derivative(t, 1), schedule.derivative(t, 2), schedule.derivative(t, 3)}};
}

PriceJet leading_jet(const TradingSchedule& schedule, double L, double t) {
  const RateJet mj = rate_jet(schedule, t);
  const double Q = schedule.cumulative(t);
  if (!(Q > 0.0)) fail(ErrorCode::StationaryPriceSingularity, "leading jet needs Q > 0");
  // y^2 = g with g = 2 Q / L, differentiated repeatedly
  const double g1 = 2.0 * mj.m / L, g2 = 2.0 * mj.dm[0] / L, g3 = 2.0 * mj.dm[1] / L,
               g4 = 2.0 * mj.dm[2] / L;
  PriceJet j;
  j.y = std::sqrt(2.0 * Q / L);
  const double y = j.y;
  j.dy[0] = g1 / (2.0 * y);
  j.dy[1] = (0.5 * g2 - j.dy[0] * j.dy[0]) / y;
  j.dy[2] = (0.5 * g3 - 3.0 * j.dy[0] * j.dy[1]) / y;
  j.dy[3] = (0.5 * g4 - 3.0 * j.dy[1] * j.dy[1] - 4.0 * j.dy[0] * j.dy[2]) / y;
  return j;
}

namespace {

// +1 for buy programs, -1 for sell programs; mixed signs are outside the expansion.
double program_sign(const TradingSchedule& schedule) {
  if (schedule.changes_sign()) fail(ErrorCode::SignChange, "expansion needs a constant-sign schedule");
  return schedule.total_volume() < 0.0 ? -1.0 : 1.0;
}

PricePath make_path(std::span<const double> times) {
  PricePath p;
  p.t.assign(times.begin(), times.end());
  p.y.assign(times.size(), 0.0);
  p.residual.assign(times.size(), 0.0);
  return p;
}

}  // namespace

PricePath leading_trajectory(const TradingSchedule& schedule, const ModelParams& params,
                             std::span<const double> times) {
  const double sign = program_sign(schedule);
  PricePath p = make_path(times);
  for (std::size_t k = 0; k < times.size(); ++k)
    p.y[k] = sign * std::sqrt(2.0 * std::abs(schedule.cumulative(times[k])) / params.L);
  return p;
}

PricePath first_order_trajectory(const TradingSchedule& schedule, const ModelParams& params,
                                 std::span<const double> times) {
  const double sign = program_sign(schedule);
  PricePath p = make_path(times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    const double Q = sign * schedule.cumulative(t);
    if (Q == 0.0 && t <= 0.0) continue;
    const double m = sign * schedule.rate(t);
    if (!(m > 0.0)) fail(ErrorCode::StationaryPriceSingularity, "first-order trajectory needs m > 0");
    const double radicand = Q - params.J * (t + 2.0 * Q / m);
    if (radicand < 0.0)
      fail(ErrorCode::NegativeRadicand,
           "first-order correction exceeds the leading term at t = " + std::to_string(t));
    p.y[k] = sign * std::sqrt(2.0 * radicand / params.L);
  }
  return p;
}

double inverted_rhs(const TradingSchedule& schedule, const ModelParams& params, double t,
                    int order) {
  if (order < 0 || order > 2) fail(ErrorCode::ParameterOutOfRange, "inverted relation order must be 0..2");
  const RateJet mj = rate_jet(schedule, t);
  const double m = mj.m, m1 = mj.dm[0], m2 = mj.dm[1];
  if (m == 0.0) fail(ErrorCode::StationaryPriceSingularity, "inverted relation needs m != 0");
  const double Q = schedule.cumulative(t);
  const double J = params.J;
  double v = m;
  if (order >= 1) v += J * (-3.0 + 2.0 * Q * m1 / (m * m));
  if (order >= 2) {
    double history = 0.0;
    std::vector<double> cuts{0.0};
    for (double b : schedule.breakpoints())
      if (b > 0.0 && b < t) cuts.push_back(b);
    cuts.push_back(t);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      history += nm::integrate(
                     [&](double s) {
                       const double ms = schedule.rate(s);
                       return schedule.cumulative(s) * schedule.derivative(s, 1) / (ms * ms);
                     },
                     cuts[i], cuts[i + 1], 1e-13)
                     .value;
    const double m2sq = m * m;
    v += J * J *
         (-12.0 * Q * m1 / (m2sq * m) - 6.0 * t * m1 / m2sq + 4.0 * m1 / m2sq * history +
          16.0 * Q * Q * m1 * m1 / (m2sq * m2sq * m) - 4.0 * Q * Q * m2 / (m2sq * m2sq));
  }
  return v;
}

double execution_cost(const TradingSchedule& schedule, const ModelParams& params, int order) {
  if (order != 0 && order != 1) fail(ErrorCode::ParameterOutOfRange, "execution cost order must be 0 or 1");
  if (schedule.changes_sign() || schedule.total_volume() < 0.0)
    fail(ErrorCode::SignChange, "execution cost is defined for buy programs");
  const double L = params.L;
  const double J = params.J;
  auto integrand = [&](double s) {
    const double Q = schedule.cumulative(s);
    const double m = schedule.rate(s);
    const double root = std::sqrt(std::max(Q, 0.0));
    double v = std::sqrt(2.0 / L) * m * root;
    if (order == 1) v -= J / std::sqrt(2.0 * L) * (2.0 * root + (Q > 0.0 ? s * m / root : 0.0));
    return v;
  };
  if (order == 1) {
    // the linearized integrand presumes a valid first-order trajectory
    auto times = nm::linspace(0.0, schedule.horizon(), 257);
    for (double b : schedule.breakpoints()) times.push_back(b);
    (void)first_order_trajectory(schedule, params, times);
  }
  double total = 0.0;
  for (const auto& seg : schedule.segments())
    total += nm::integrate_endpoint_singular(integrand, seg.t0, seg.t1, 1e-14).value;
  return total;
}

double execution_cost_closed_form(double Q, double T, const ModelParams& params, int order) {
  if (!(Q > 0.0) || !(T > 0.0)) fail(ErrorCode::NonPositiveParameter, "cost needs Q > 0 and T > 0");
  double c = 2.0 / 3.0 * std::sqrt(2.0 / params.L) * std::pow(Q, 1.5);
  if (order == 1) c *= 1.0 - 3.0 * params.J * T / (2.0 * Q);
  return c;
}

}  // namespace llob
