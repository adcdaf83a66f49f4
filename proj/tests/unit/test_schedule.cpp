#include <cmath>
#include <random>

#include "doctest.h"
#include "llob/numerics.hpp"
#include "llob/schedule.hpp"
#include "unit/support.hpp"

using namespace llob;

TEST_CASE("constant and piecewise schedules") {
  const auto c = TradingSchedule::constant(2.0, 3.0);
  CHECK(c.horizon() == 3.0);
  CHECK(c.rate(1.0) == 2.0);
  CHECK(c.rate(3.5) == 0.0);
  CHECK(c.cumulative(1.5) == 3.0);
  CHECK(c.cumulative(10.0) == 6.0);

  const std::vector<double> br{0.0, 1.0, 2.0}, lv{1.0, -2.0};
  const auto p = TradingSchedule::piecewise_constant(br, lv);
  CHECK(p.rate(1.0) == -2.0);  // right-continuous
  CHECK(p.rate(2.0) == -2.0);  // last segment closed
  CHECK(p.changes_sign());
  CHECK(p.total_volume() == -1.0);
  CHECK(p.absolute_volume() == 3.0);
  CHECK(p.breakpoints() == std::vector<double>{0.0, 1.0, 2.0});
  CHECK(p.segment_at(0.5) == 0);
  CHECK(p.segment_at(1.0) == 1);
  CHECK(p.segment_at(2.5) == TradingSchedule::npos);

  const auto bs = TradingSchedule::buy_then_sell(1.0, 1.0);
  CHECK(bs.total_volume() == 0.0);
}

TEST_CASE("invalid schedules") {
  CHECK_THROWS_CODE(TradingSchedule({{0.0, 1.0, {1.0}}, {1.5, 2.0, {1.0}}}), ErrorCode::InvalidSchedule);
  CHECK_THROWS_CODE(TradingSchedule({{0.0, 1.0, {1.0}}, {0.5, 2.0, {1.0}}}), ErrorCode::InvalidSchedule);
  CHECK_THROWS_CODE(TradingSchedule({{0.2, 1.0, {1.0}}}), ErrorCode::InvalidSchedule);
  CHECK_THROWS_CODE(TradingSchedule({{0.0, 0.0, {1.0}}}), ErrorCode::InvalidSchedule);
  CHECK_THROWS_CODE(TradingSchedule({{0.0, 1.0, {NAN}}}), ErrorCode::InvalidSchedule);
  const std::vector<double> br{0.0, 1.0};
  CHECK_THROWS_CODE(make_round_trip(br, std::span<const double>{}), ErrorCode::InvalidSchedule);
}

TEST_CASE("Q is the exact integral of m and continuous") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ScheduleSegment> segs;
    double t = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double len = 0.25 + std::abs(u(rng));
      segs.push_back({t, t + len, {u(rng), u(rng), u(rng), u(rng)}});
      t += len;
    }
    const TradingSchedule s(segs);
    for (const auto& seg : segs) {
      // left limit of Q equals the value at the breakpoint
      const double left = s.cumulative(seg.t0) + numerics::gauss_fixed([&](double x) { return s.rate(x); }, seg.t0,
                                                                        seg.t1, 8);
      if (seg.t1 < s.horizon()) CHECK(left == doctest::Approx(s.cumulative(seg.t1)).epsilon(1e-13));
      const double mid = 0.5 * (seg.t0 + seg.t1);
      const double dq = (s.cumulative(mid + 1e-5) - s.cumulative(mid - 1e-5)) / 2e-5;
      CHECK(dq == doctest::Approx(s.rate(mid)).epsilon(1e-7));
      const double dm = (s.rate(mid + 1e-5) - s.rate(mid - 1e-5)) / 2e-5;
      CHECK(dm == doctest::Approx(s.derivative(mid, 1)).epsilon(1e-7));
    }
  }
}

TEST_CASE("round trips close and scale") {
  const std::vector<double> br{0.0, 0.2, 0.7, 1.0}, lv{3.0, -1.0};
  const auto s = make_round_trip(br, lv);
  CHECK(std::abs(s.total_volume()) < 1e-15);
  CHECK(s.scaled(-2.0).rate(0.1) == -6.0);
  CHECK(TradingSchedule::constant(0.0, 1.0).is_zero());
}

TEST_CASE("price path interpolation") {
  PricePath p{{0.0, 1.0, 2.0}, {0.0, 1.0, 4.0}, {0.0, -3e-12, 1e-12}};
  CHECK(p.at(1.5) == doctest::Approx(2.5));
  CHECK(p.max_abs_residual() == doctest::Approx(3e-12));
}
