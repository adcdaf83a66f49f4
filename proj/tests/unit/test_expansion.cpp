#include <cmath>
#include <vector>

#include "doctest.h"
#include "llob/expansion.hpp"
#include "llob/numerics.hpp"
#include "llob/price_solver.hpp"
#include "unit/support.hpp"

using namespace llob;

namespace {

TradingSchedule ramp(double scale) {
  // m = scale (1 + t + t^2 / 2) on [0, 1]
  return TradingSchedule({{0.0, 1.0, {scale, scale, 0.5 * scale}}});
}

}  // namespace

TEST_CASE("leading order balances exactly on the leading trajectory") {
  ModelParams p;
  p.L = 2.0;
  p.D = 0.5;
  p.J = 1.0;
  const auto s = ramp(50.0);
  for (double t : {0.05, 0.3, 0.7, 1.0}) {
    const auto yj = leading_jet(s, p.L, t);
    const auto e = expansion_terms(rate_jet(s, t), yj, p.D);
    CHECK(std::abs(e.order[0] - p.L * yj.y * yj.dy[0]) < 1e-12 * e.order[0]);
    CHECK(expansion_rhs(rate_jet(s, t), yj, p.D, 0) == e.order[0]);
  }
}

TEST_CASE("first-order term at constant rate") {
  // y = sqrt(2 m t / L): y'' = -y' / (2t), so 3 D m y'' / y'^3 = -3 D L = -3 J
  const ModelParams p;
  for (double m0 : {10.0, 1000.0}) {
    const auto s = TradingSchedule::constant(m0, 1.0);
    for (double t : {0.1, 0.5, 1.0}) {
      const auto e = expansion_terms(rate_jet(s, t), leading_jet(s, p.L, t), p.D);
      CHECK(e.order[1] == doctest::Approx(-3.0 * p.J).epsilon(1e-12));
      CHECK(inverted_rhs(s, p, t, 1) == doctest::Approx(m0 - 3.0 * p.J).epsilon(1e-14));
      CHECK(inverted_rhs(s, p, t, 2) == inverted_rhs(s, p, t, 1));
    }
  }
}

TEST_CASE("order n scales as (J/m)^n") {
  const ModelParams p;
  for (double t : {0.2, 0.9}) {
    const auto e1 = expansion_terms(rate_jet(ramp(10.0), t), leading_jet(ramp(10.0), p.L, t), p.D);
    const auto e2 = expansion_terms(rate_jet(ramp(1000.0), t), leading_jet(ramp(1000.0), p.L, t), p.D);
    for (int n = 1; n <= 3; ++n) {
      const auto k = static_cast<std::size_t>(n);
      const double ratio = (e2.order[k] / e2.order[0]) / (e1.order[k] / e1.order[0]);
      CHECK(ratio == doctest::Approx(std::pow(1e-2, n)).epsilon(1e-2));
    }
  }
}

TEST_CASE("expansion needs a moving price") {
  PriceJet y;
  CHECK_THROWS_CODE(expansion_terms(RateJet{1.0, {}}, y, 1.0), ErrorCode::StationaryPriceSingularity);
  CHECK_THROWS_CODE(expansion_terms(RateJet{1.0, {}}, y, 1.0).sum(4), ErrorCode::StationaryPriceSingularity);
  y.dy[0] = 1.0;
  CHECK_THROWS_CODE(expansion_terms(RateJet{1.0, {}}, y, 1.0).sum(4), ErrorCode::ParameterOutOfRange);
}

TEST_CASE("leading trajectory depends on Q only") {
  ModelParams p;
  p.L = 0.5;
  const std::vector<double> T{1.0};
  const auto a = leading_trajectory(TradingSchedule::constant(3.0, 1.0), p, T);
  const auto b = leading_trajectory(TradingSchedule({{0.0, 1.0, {0.0, 6.0}}}), p, T);
  CHECK(a.y[0] == doctest::Approx(std::sqrt(2.0 * 3.0 / p.L)).epsilon(1e-15));
  CHECK(a.y[0] == doctest::Approx(b.y[0]).epsilon(1e-15));
  const std::vector<double> zero{0.0};
  CHECK(leading_trajectory(TradingSchedule::constant(3.0, 1.0), p, zero).y[0] == 0.0);
  CHECK_THROWS_CODE(leading_trajectory(TradingSchedule::buy_then_sell(1.0, 1.0), p, T), ErrorCode::SignChange);
}

TEST_CASE("first-order trajectory") {
  const auto s = TradingSchedule::constant(100.0, 1.0);
  const auto times = numerics::linspace(0.01, 1.0, 100);
  ModelParams no_j;
  no_j.J = 0.0;
  const auto lead = leading_trajectory(s, no_j, times);
  const auto first = first_order_trajectory(s, no_j, times);
  for (std::size_t k = 0; k < times.size(); ++k) CHECK(first.y[k] == lead.y[k]);

  const ModelParams p;
  CHECK_THROWS_CODE(first_order_trajectory(TradingSchedule::constant(1.0, 1.0), p, times), ErrorCode::NegativeRadicand);
}

TEST_CASE("gaps to the exact solution shrink by order") {
  const ModelParams p;
  const std::vector<double> T{1.0};
  std::vector<double> g1, g2;
  for (double r : {1e2, 1e3, 1e4}) {
    const auto s = TradingSchedule::constant(r * p.J, 1.0);
    const double full = solve_A(r) * std::sqrt(p.D);
    g1.push_back(std::abs(full - leading_trajectory(s, p, T).y[0]) / full);
    g2.push_back(std::abs(full - first_order_trajectory(s, p, T).y[0]) / full);
  }
  CHECK(g2[0] < 5e-4);  // 5 (J/m)^2
  for (std::size_t k = 0; k + 1 < g1.size(); ++k) {
    CHECK(g1[k] / g1[k + 1] >= 5.0);
    CHECK(g1[k] / g1[k + 1] <= 20.0);
    CHECK(g2[k] / g2[k + 1] >= 50.0);
    CHECK(g2[k] / g2[k + 1] <= 200.0);
  }
  // the marching solver sees the same thing at m0 = 100 J
  const auto path = solve_price_path(TradingSchedule::constant(100.0, 1.0), p, {.dt = 1e-3});
  CHECK(test::rel(path.y.back(), first_order_trajectory(TradingSchedule::constant(100.0, 1.0), p, T).y[0]) < 1e-3);
}

TEST_CASE("second-order inverted relation on a ramp") {
  // m = a + b s: Q = a s + b s^2 / 2, history integral of Q m' / m^2 by brute force
  const ModelParams p;
  const double a = 20.0, b = 10.0, t = 0.8;
  const TradingSchedule s({{0.0, 1.0, {a, b}}});
  const double m = a + b * t, Q = a * t + 0.5 * b * t * t;
  const double hist = test::trapezoid([&](double u) { return (a * u + 0.5 * b * u * u) * b / ((a + b * u) * (a + b * u)); },
                                      0.0, t, 200000);
  const double o1 = m + p.J * (-3.0 + 2.0 * Q * b / (m * m));
  const double o2 = o1 + p.J * p.J *
                             (-12.0 * Q * b / (m * m * m) - 6.0 * t * b / (m * m) + 4.0 * b / (m * m) * hist +
                              16.0 * Q * Q * b * b / (m * m * m * m * m));
  CHECK(inverted_rhs(s, p, t, 0) == doctest::Approx(m).epsilon(1e-15));
  CHECK(inverted_rhs(s, p, t, 1) == doctest::Approx(o1).epsilon(1e-14));
  CHECK(inverted_rhs(s, p, t, 2) == doctest::Approx(o2).epsilon(1e-12));
  CHECK_THROWS_CODE(inverted_rhs(s, p, t, 3), ErrorCode::ParameterOutOfRange);
}

TEST_CASE("execution cost") {
  ModelParams p;
  CHECK(execution_cost(TradingSchedule::constant(1.0, 1.0), p, 0) == doctest::Approx(2.0 / 3.0 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(execution_cost_closed_form(1.0, 1.0, p, 0) == doctest::Approx(2.0 / 3.0 * std::sqrt(2.0)).epsilon(1e-15));

  p.D = 0.5;
  p.J = 1.0;
  p.L = 2.0;
  const double M = 50.0, T = 1.0;
  const std::vector<TradingSchedule> family{
      TradingSchedule::constant(M, T),
      TradingSchedule({{0.0, T, {0.5 * M, M / T}}}),
      TradingSchedule({{0.0, T, {1.5 * M, -M / T}}}),
      TradingSchedule({{0.0, T, {0.75 * M, 0.0, 0.75 * M / (T * T)}}}),
      TradingSchedule({{0.0, 0.4, {0.9 * M}}, {0.4, T, {M + 0.4 * 0.1 * M / 0.6}}}),
  };
  const double closed = execution_cost_closed_form(M * T, T, p, 1);
  double lo = 1e300, hi = -1e300;
  for (const auto& s : family) {
    CHECK(s.total_volume() == doctest::Approx(M * T).epsilon(1e-14));
    const double c1 = execution_cost(s, p, 1);
    CHECK(std::abs(c1 - closed) < 1e-10 * closed);
    CHECK(c1 < execution_cost(s, p, 0));
    lo = std::min(lo, c1);
    hi = std::max(hi, c1);
  }
  CHECK((hi - lo) / closed < 1e-6);
  CHECK_THROWS_CODE(execution_cost(TradingSchedule::buy_then_sell(1.0, 1.0), p, 0), ErrorCode::SignChange);
  CHECK_THROWS_CODE(execution_cost(family[0], p, 2), ErrorCode::ParameterOutOfRange);
}
