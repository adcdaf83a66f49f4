#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "doctest.h"
#include "llob/manipulation.hpp"
#include "unit/support.hpp"

using namespace llob;

namespace {

// (D/L) int dz z^2 int du K_z(s,u) K_z*(s',u) with both integrals done
// numerically (u measured back from min(s, s')), then divided by pi, which is
// the normalization under which the quadratic form reproduces the direct cost.
double kernel_2d(double tau, double dy, const ModelParams& p) {
  boost::math::quadrature::exp_sinh<double> q;
  const double inf = std::numeric_limits<double>::infinity();
  auto inner = [&](double z) {
    if (z == 0.0) return 0.0;
    const double zz = z * z;
    auto f = [&](double w) { return std::exp(-p.D * zz * (tau + 2.0 * w)); };
    return zz * std::cos(z * dy) * q.integrate(f, 0.0, inf, 1e-13);
  };
  const double half = q.integrate(inner, 0.0, inf, 1e-11);
  return 2.0 * half * p.D / p.L / M_PI;
}

}  // namespace

TEST_CASE("round trip schedules close") {
  const std::vector<double> br{0.0, 0.3, 0.5, 1.0}, lv{1.0, -3.0};
  const auto rt = RoundTripSchedule::from_levels(br, lv);
  CHECK(std::abs(rt.schedule().total_volume()) <= 1e-12 * rt.schedule().absolute_volume());
  CHECK_THROWS_CODE(RoundTripSchedule(TradingSchedule::constant(1.0, 1.0)), ErrorCode::InvalidSchedule);
}

TEST_CASE("zero and mirrored schedules") {
  const ModelParams p;
  const std::vector<double> br{0.0, 1.0, 2.0}, zero{0.0};
  const auto flat = RoundTripSchedule::from_levels(br, zero);
  CHECK(round_trip_cost(flat, p) == 0.0);
  const auto path = solve_price_path(flat.schedule(), p, {.dt = 0.02});
  CHECK(kernel_quadratic_cost(flat.schedule(), path, p) == 0.0);

  const std::vector<double> up{1.0}, down{-1.0};
  const SolverConfig c{.dt = 1e-3};
  const double cb = round_trip_cost(RoundTripSchedule::from_levels(br, up), p, c);
  const double cs = round_trip_cost(RoundTripSchedule::from_levels(br, down), p, c);
  CHECK(cb > 0.0);
  CHECK(cb == cs);
}

TEST_CASE("kernel closed form against 2-D quadrature") {
  ModelParams p;
  p.D = 1.5;
  p.J = 3.0;
  p.L = 2.0;
  for (auto [tau, dy] : {std::pair{0.3, 0.2}, std::pair{1.0, 0.0}, std::pair{0.05, 0.4}, std::pair{2.0, -1.5}})
    CHECK(kernel_M(tau, dy, p) == doctest::Approx(kernel_2d(tau, dy, p)).epsilon(1e-7));
}

TEST_CASE("kernel matrix on a buy-sell path") {
  const ModelParams p;
  const auto s = TradingSchedule::buy_then_sell(1.0, 1.0);
  const auto path = solve_price_path(s, p, {.dt = 0.02});  // 100 steps
  REQUIRE(path.size() == 101);
  const auto K = kernel_matrix(path, p);
  REQUIRE(K.n == 100);
  double worst = 0.0, big = 0.0;
  for (std::size_t i = 0; i < K.n; ++i)
    for (std::size_t j = 0; j < K.n; ++j) {
      worst = std::max(worst, std::abs(K(i, j) - K(j, i)));
      big = std::max(big, std::abs(K(i, j)));
    }
  CHECK(worst <= 1e-12 * big);
  const auto eig = eigen_range(K);
  CHECK(eig.min >= -1e-10 * eig.max);
  CHECK(eig.min > 0.0);

  const double direct = path_cost(s, path);
  const double via_kernel = kernel_quadratic_cost(s, path, p);
  CHECK(test::rel(via_kernel, direct) < 1e-2);
}

TEST_CASE("path cost integrates m times the linear interpolant") {
  const TradingSchedule s({{0.0, 1.0, {1.0, 2.0}}});
  PricePath path;
  path.t = {0.0, 0.4, 1.0};
  path.y = {0.0, 1.0, 0.5};
  path.residual = {0.0, 0.0, 0.0};
  // int_0^0.4 (1+2t)(t/0.4) + int_0.4^1 (1+2t)(1 - (t-0.4)/1.2)
  const double a = test::trapezoid([](double t) { return (1.0 + 2.0 * t) * t / 0.4; }, 0.0, 0.4, 200000);
  const double b = test::trapezoid([](double t) { return (1.0 + 2.0 * t) * (1.0 - (t - 0.4) / 1.2); }, 0.4, 1.0, 200000);
  CHECK(path_cost(s, path) == doctest::Approx(a + b).epsilon(1e-10));
}

TEST_CASE("random closed schedules") {
  const ModelParams p;
  AuditConfig cfg;
  for (std::size_t i = 0; i < 200; ++i) {
    const auto s = random_round_trip(cfg, p, i);
    CHECK(s == random_round_trip(cfg, p, i));
    const auto n = static_cast<int>(s.segments().size());
    CHECK(n >= 2);
    CHECK(n <= 12);
    CHECK(std::abs(s.total_volume()) <= 1e-12 * s.absolute_volume());
    CHECK(s.horizon() == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK_FALSE(random_round_trip(cfg, p, 0) == random_round_trip(cfg, p, 1));
  AuditConfig bad = cfg;
  bad.segments_min = 1;
  CHECK_THROWS_CODE(bad.validate(), ErrorCode::ConfigError);
}

TEST_CASE("small audit: nonnegative, deterministic, converging with dt") {
  const ModelParams p;
  AuditConfig cfg;
  cfg.trials = 12;
  std::vector<AuditResult> runs;
  for (double dt : {1.0 / 100.0, 1.0 / 200.0, 1.0 / 400.0}) {
    cfg.solver.dt = dt;
    runs.push_back(random_round_trip_audit(cfg, p));
    CHECK(runs.back().min_cost >= -1e-3 * runs.back().median_abs_cost);
    CHECK_NOTHROW(require_no_manipulation(runs.back()));
  }
  double e1 = 0.0, e2 = 0.0;
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    e1 = std::max(e1, std::abs(runs[0].costs[i] - runs[1].costs[i]));
    e2 = std::max(e2, std::abs(runs[1].costs[i] - runs[2].costs[i]));
  }
  CHECK(e2 < e1);

  cfg.jobs = 3;
  const auto again = random_round_trip_audit(cfg, p);
  CHECK(again.costs == runs[2].costs);

  AuditResult forged = runs[2];
  forged.min_cost = -1.0;
  forged.tolerance = 0.1;
  CHECK_THROWS_CODE(require_no_manipulation(forged), ErrorCode::InvariantBreach);
}
