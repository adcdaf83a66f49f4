#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "llob/numerics.hpp"
#include "llob/relaxation.hpp"
#include "unit/support.hpp"

using namespace llob;

namespace {

// 1 - y/y_T = c sqrt(tau), least squares over tau in [1e-4, 1e-2]
double short_time_prefactor(double r) {
  const ModelParams p;
  const double T = 1.0;
  const auto taus = numerics::logspace(-4.0, -2.0, 21);
  std::vector<double> times;
  for (double tau : taus) times.push_back(T * (1.0 + tau));
  const auto d = decay_trajectory(r * p.J, T, times, p);
  const double yT = solve_A(r) * std::sqrt(p.D * T);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    num += (1.0 - d.y[k] / yT) * std::sqrt(taus[k]);
    den += taus[k];
  }
  return num / den;
}

double normalized(double r, double t) {
  const ModelParams p;
  const std::vector<double> ts{t};
  return decay_trajectory(r, 1.0, ts, p).y[0] / (solve_A(r) * std::sqrt(p.D));
}

}  // namespace

TEST_CASE("linear decay ratio") {
  CHECK(decay_propagator_ratio(1.0, 1.0) == 1.0);
  CHECK(decay_propagator_ratio(2.0, 1.0) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-15));
  CHECK(test::rel(decay_propagator_ratio(1e4, 1.0), 0.5 * std::sqrt(1e-4)) < 1e-4);
  CHECK_THROWS_CODE(decay_propagator_ratio(0.5, 1.0), ErrorCode::ParameterOutOfRange);

  // against the propagator evaluated on the finished schedule
  const ModelParams p;
  const double T = 0.7;
  const auto s = TradingSchedule::constant(1.0, T);
  for (double t : {0.8, 1.0, 2.5, 40.0})
    CHECK(decay_propagator_ratio(t, T) ==
          doctest::Approx(propagator_value(s, p, t) / propagator_value(s, p, T)).epsilon(1e-12));
}

TEST_CASE("decay solves the price equation") {
  const ModelParams p;
  const std::vector<double> ts{1.001, 1.1, 2.0, 5.0};
  for (double r : {0.1, 1.0, 10.0}) {
    const auto d = decay_trajectory(r, 1.0, ts, p);
    for (std::size_t k = 0; k < ts.size(); ++k)
      CHECK(std::abs(decay_equation_residual(r, 1.0, ts[k], d.y[k], p)) < 1e-10 * d.y[k]);
  }
  // frozen after the residual check above
  CHECK(normalized(1.0, 2.0) * solve_A(1.0) == doctest::Approx(0.23178465798651954).epsilon(1e-10));
}

TEST_CASE("small rates decay like the propagator") {
  const ModelParams p;
  const double r = 1e-2;
  std::vector<double> ts;
  for (double t : numerics::linspace(1.0, 10.0, 91)) ts.push_back(t);
  ts.front() = 1.0 + 1e-6;
  const auto d = decay_trajectory(r, 1.0, ts, p);
  const double yT = solve_A(r) * std::sqrt(p.D);
  for (std::size_t k = 0; k < ts.size(); ++k)
    CHECK(test::rel(d.y[k] / yT, decay_propagator_ratio(ts[k], 1.0)) < 1e-2);
}

TEST_CASE("short-time decay has a unit prefactor") {
  for (double r : {0.1, 1.0, 10.0, 100.0}) {
    const double c = short_time_prefactor(r);
    CHECK(c >= 0.9);
    CHECK(c <= 1.1);
  }
}

TEST_CASE("decay is monotone and goes to zero") {
  const ModelParams p;
  for (double r : {0.1, 1.0, 10.0, 100.0}) {
    const auto d = decay_trajectory(r, 1.0, 1e4, p, 40);
    for (std::size_t k = 1; k < d.size(); ++k) CHECK(d.y[k] < d.y[k - 1]);
    const double yT = solve_A(r) * std::sqrt(p.D);
    // the large-rate book is much flatter, so it needs longer
    const double horizon = r <= 10.0 ? 100.0 : 1e4;
    CHECK(d.at(horizon) < 0.1 * yT);
  }
}

TEST_CASE("normalized curves at m0/J = 0.1 and 1 nearly coincide") {
  double worst = 0.0;
  for (double t : numerics::logspace(-4.0, 2.0, 25))
    worst = std::max(worst, std::abs(normalized(0.1, 1.0 + t) - normalized(1.0, 1.0 + t)));
  CHECK(worst < 0.02);
}

TEST_CASE("reversal") {
  const ModelParams p;
  // small rate: closed form sqrt(t) = 2 sqrt(t - T) gives t = 4T/3
  const auto small = reversal_trajectory(0.01, 1.0, p);
  CHECK(test::rel(small.return_time - 1.0, 1.0 / 3.0) < 2e-2);
  // large rate: the book is nearly symmetric, return after about J T / (2 m0)
  const auto large = reversal_trajectory(100.0, 1.0, p);
  CHECK(test::rel(large.return_time - 1.0, 1.0 / 200.0) < 0.15);
  CHECK(large.return_time - 1.0 < small.return_time - 1.0);

  const auto mid = reversal_trajectory(1.0, 1.0, p);
  CHECK(mid.return_time - 1.0 < small.return_time - 1.0);
  CHECK(mid.return_time - 1.0 > large.return_time - 1.0);
  for (const auto* res : {&small, &mid, &large}) {
    const double delay = res->return_time - 1.0;
    CHECK(delay > 0.0);
    CHECK(delay <= 1.1 / 3.0);
  }
  CHECK(large.return_time - 1.0 >= 0.5 / 200.0);
}

TEST_CASE("sell then buy is the mirror image") {
  const ModelParams p;
  const auto bs = TradingSchedule::buy_then_sell(2.0, 1.0);
  const SolverConfig c{.dt = 2e-3};
  const auto a = solve_price_path(bs, p, c);
  const auto b = solve_price_path(bs.scaled(-1.0), p, c);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(b.y[k] == -a.y[k]);
}

TEST_CASE("bad arguments") {
  const ModelParams p;
  const std::vector<double> ts{0.5};
  CHECK_THROWS_CODE(decay_trajectory(1.0, 1.0, ts, p), ErrorCode::ParameterOutOfRange);
  CHECK_THROWS_CODE(decay_trajectory(0.0, 1.0, 2.0, p), ErrorCode::NonPositiveParameter);
  CHECK_THROWS_CODE(reversal_trajectory(-1.0, 1.0, p), ErrorCode::NonPositiveParameter);
}
