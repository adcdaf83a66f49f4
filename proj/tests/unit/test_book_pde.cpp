#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "llob/book_pde.hpp"
#include "llob/price_solver.hpp"
#include "llob/scaling_shape.hpp"
#include "unit/support.hpp"

using namespace llob;

namespace {

ModelParams finite_nu(double D, double nu, double lam) { return validate_and_derive({.D = D, .nu = nu, .lam = lam}); }

// Volume walked from the price on one side of a nodal book, linear between
// nodes, inverted by bisection.
double walk_oracle(const BookProfile& p, double price, double q, int dir) {
  const auto& g = p.grid;
  // piecewise linear through the nodes and (price, 0)
  auto phi = [&](double x) {
    const double s = (x + g.W) / g.h();
    const auto i = std::min(static_cast<std::size_t>(s), g.N - 2);
    double xa = g.node(i), xb = g.node(i + 1), fa = p.phi[i], fb = p.phi[i + 1];
    if (price > xa && price < xb) {
      if (x <= price) xb = price, fb = 0.0;
      else xa = price, fa = 0.0;
    }
    return fa + (fb - fa) * (x - xa) / (xb - xa);
  };
  auto volume = [&](double x) {  // |integral from price to x|, sign-adjusted
    const double a = std::min(price, x), b = std::max(price, x);
    std::vector<double> pts{a};
    for (std::size_t i = 0; i < g.N; ++i)
      if (g.node(i) > a && g.node(i) < b) pts.push_back(g.node(i));
    pts.push_back(b);
    double v = 0.0;
    for (std::size_t k = 1; k < pts.size(); ++k) v += 0.5 * (phi(pts[k - 1]) + phi(pts[k])) * (pts[k] - pts[k - 1]);
    return dir < 0 ? v : -v;
  };
  double lo = price, hi = price + dir * 0.5 * g.W;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (volume(mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("grid") {
  const Grid1D g{2.0, 401};
  CHECK(g.h() == doctest::Approx(0.01));
  CHECK(g.node(200) == 0.0);
  CHECK(g.node(0) == -g.node(400));
  CHECK_THROWS_CODE(Grid1D({1.0, 400}).validate(), ErrorCode::ConfigError);
}

TEST_CASE("stationary profile") {
  const auto p = finite_nu(1.0, 4.0, 2.0);
  CHECK(stationary_profile(0.0, p) == 0.0);
  const double gamma = *p.gamma;
  CHECK(test::rel(stationary_profile(-100.0 / gamma, p), p.lam / p.nu) < 1e-12);
  const double e = 1e-7;
  CHECK((stationary_profile(0.0, p) - stationary_profile(-e, p)) / e == doctest::Approx(-p.L).epsilon(1e-6));
  CHECK(stationary_profile(0.7, p) == -stationary_profile(-0.7, p));
  CHECK_THROWS_CODE(stationary_profile(0.1, ModelParams{}), ErrorCode::ParameterOutOfRange);
}

TEST_CASE("general stationary profile: no asymmetry") {
  const auto p = finite_nu(1.3, 0.7, 0.9);
  for (double y : {-3.0, -1.0, -0.2, 0.0, 0.4, 2.5})
    CHECK(stationary_profile_general([](double) { return 0.0; }, p, y) ==
          doctest::Approx(stationary_profile(y, p)).epsilon(1e-12));
}

TEST_CASE("general stationary profile: exponential asymmetry") {
  const auto p = finite_nu(1.0, 1.0, 1.0);
  auto xi = [](double d) { return std::exp(-d); };

  // from-scratch nested Gauss-Kronrod of the two-level integral at distance 1
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto inner = [&](double yp) {
    return GK::integrate([&](double s) { return std::exp(-s) * xi(s); }, yp, INFINITY, 15, 1e-12);
  };
  const double outer = GK::integrate([&](double yp) { return std::exp(2.0 * yp) * inner(yp); }, 0.0, 1.0, 15, 1e-12);
  const double oracle = (1.0 - std::exp(-1.0)) + std::exp(-1.0) * outer;
  CHECK(oracle == doctest::Approx(1.0 - 0.5 * std::exp(-1.0)).epsilon(1e-10));  // closed form for this xi
  // distance 1 into the bid side
  CHECK(stationary_profile_general(xi, p, -1.0) == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(stationary_profile_general(xi, p, 1.0) == doctest::Approx(-oracle).epsilon(1e-10));

  // locally linear at the price
  const double s1 = stationary_profile_general(xi, p, -1e-3) / 1e-3;
  const double s2 = stationary_profile_general(xi, p, -1e-4) / 1e-4;
  CHECK(std::isfinite(s1));
  CHECK(s1 == doctest::Approx(s2).epsilon(2e-3));

  CHECK_THROWS_CODE(stationary_profile_general([](double d) { return std::exp(2.0 * d); }, p, -1.0),
                    ErrorCode::DivergentDeposition);
}

TEST_CASE("price extraction") {
  const ModelParams p;
  const Grid1D g{3.0, 601};
  auto b = linear_book(g, p);
  CHECK(extract_price(b) == 0.0);
  for (std::size_t i = 0; i < g.N; ++i) b.phi[i] = -(g.node(i) - 0.3);
  CHECK(extract_price(b) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(extract_price(b, 0.31) == doctest::Approx(0.3).epsilon(1e-12));

  for (auto& v : b.phi) v = std::abs(v) + 1.0;
  CHECK_THROWS_CODE(extract_price(b), ErrorCode::NoZeroCrossing);
  for (std::size_t i = 0; i < g.N; ++i) {
    const double y = g.node(i);
    b.phi[i] = -y * (y * y - 1.0);
  }
  CHECK_THROWS_CODE(extract_price(b), ErrorCode::NonUniqueZeroCrossing);
  for (std::size_t i = 0; i < g.N; ++i) b.phi[i] = g.node(i) - 0.2;
  CHECK_THROWS_CODE(extract_price(b), ErrorCode::NonUniqueZeroCrossing);  // rising book
}

TEST_CASE("bid and ask on the equilibrium book") {
  ModelParams p;
  p.L = 2.0;
  p.J = 2.0;
  const auto b = linear_book({4.0, 801}, p);
  const double q = 0.37;
  const auto ba = bid_ask(b, q);
  CHECK(ba.bid == doctest::Approx(-std::sqrt(2.0 * q / p.L)).epsilon(1e-12));
  CHECK(ba.ask == doctest::Approx(std::sqrt(2.0 * q / p.L)).epsilon(1e-12));
  const auto z = bid_ask(b, 0.0);
  CHECK(z.bid == 0.0);
  CHECK(z.ask == 0.0);
  CHECK_THROWS_CODE(bid_ask(b, 100.0), ErrorCode::InsufficientDepth);
  CHECK_THROWS_CODE(bid_ask(b, -1.0), ErrorCode::ParameterOutOfRange);
}

TEST_CASE("zero source leaves the linear book in place") {
  const ModelParams p;
  const auto s = TradingSchedule::constant(0.0, 1.0);
  const auto init = linear_book({6.0, 1201}, p);
  PdeConfig c;
  c.snapshot_times = {0.5, 1.0};
  const auto ev = evolve_book(init, s, p, c);
  for (double y : ev.path.y) CHECK(std::abs(y) < 1e-14);  // rounding in the implicit solve
  // accumulated rounding over ~1000 implicit steps, relative to the book's scale
  double scale = 0.0;
  for (double v : init.phi) scale = std::max(scale, std::abs(v));
  for (const auto& snap : ev.snapshots)
    for (std::size_t i = 0; i < init.phi.size(); ++i) CHECK(std::abs(snap.phi[i] - init.phi[i]) < 1e-12 * scale);
}

TEST_CASE("antisymmetry survives the march") {
  const ModelParams p;
  const Grid1D g{6.0, 1201};
  auto init = linear_book(g, p);
  const std::size_t mid = g.N / 2;
  for (std::size_t i = 0; i < g.N; ++i) {
    const double off = static_cast<double>(static_cast<long>(i) - static_cast<long>(mid)) * g.h();
    init.phi[i] += 0.3 * off * std::exp(-off * off);
  }
  PdeConfig c;
  c.snapshot_times = {0.25, 1.0};
  const auto ev = evolve_book(init, TradingSchedule::constant(0.0, 1.0), p, c);
  for (const auto& snap : ev.snapshots) {
    double worst = 0.0;
    for (std::size_t i = 0; i < g.N; ++i) worst = std::max(worst, std::abs(snap.phi[i] + snap.phi[g.N - 1 - i]));
    CHECK(worst < 1e-12);
    CHECK(extract_price(snap) == 0.0);
  }
}

TEST_CASE("constant-rate book reaches A sqrt(D T)") {
  const ModelParams p;
  const auto s = TradingSchedule::constant(1.0, 1.0);
  PdeConfig c;
  c.snapshot_times = {1.0};
  const auto ev = evolve_book(linear_book(default_grid(s, p), p), s, p, c);
  const double A = solve_A(1.0);
  CHECK(test::rel(ev.path.y.back(), A) < 1e-2);
  CHECK(test::rel(ev.path.y.back(), A) < 1e-5);  // what the default resolution actually achieves
  CHECK(test::rel(extract_price(ev.snapshots.back()), A) < 1e-2);
}

TEST_CASE("mass balance") {
  const ModelParams p;
  for (double r : {1.0, 10.0}) {
    const auto s = TradingSchedule::constant(r, 1.0);
    const auto g = default_grid(s, p);
    PdeConfig c;
    c.snapshot_times = {0.01, 0.1, 0.5, 1.0};
    const auto ev = evolve_book(linear_book(g, p), s, p, c);
    REQUIRE(ev.excess.size() == ev.snapshots.size());
    const double QT = s.total_volume();
    for (std::size_t k = 0; k < ev.snapshots.size(); ++k) {
      const double t = ev.snapshots[k].t;
      const double Q = s.cumulative(t);
      // an absorbing edge at distance d has taken at most Q erfc(d / (2 sqrt(D t)))
      const double d = g.W - ev.path.at(t);
      const double tol = std::max(1e-6 * QT, Q * std::erfc(d / (2.0 * std::sqrt(p.D * t))));
      CHECK(std::abs(ev.excess[k] - Q) <= tol);
      // nodal trapezoid: off by the kink at the price, O(m h^2 / D)
      const double h = g.h();
      CHECK(std::abs(excess_volume(ev.snapshots[k], p) - Q) <= tol + r * h * h / p.D);
    }
  }
}

TEST_CASE("grid convergence is second order") {
  const ModelParams p;
  const auto s = TradingSchedule::constant(1.0, 1.0);
  std::vector<double> y;
  for (std::size_t N : {2001u, 4001u, 8001u}) {
    PdeConfig c;
    c.dt = 1.0 / static_cast<double>(N - 1);
    y.push_back(evolve_book(linear_book(default_grid(s, p, N), p), s, p, c).path.y.back());
  }
  const double d1 = std::abs(y[1] - y[0]);
  const double d2 = std::abs(y[2] - y[1]);
  CHECK(d2 * 3.0 <= d1);
}

TEST_CASE("source placements agree") {
  const ModelParams p;
  const auto s = TradingSchedule::constant(1.0, 1.0);
  const auto init = linear_book(default_grid(s, p), p);
  PdeConfig c;
  const double path = evolve_book(init, s, p, c).path.y.back();
  for (auto pl : {SourcePlacement::StartOfStep, SourcePlacement::EndOfStepIterated, SourcePlacement::Midpoint}) {
    c.placement = pl;
    const double y = evolve_book(init, s, p, c).path.y.back();
    CHECK(test::rel(y, path) < 5e-3);
  }
}

TEST_CASE("two-node split at small steps") {
  const ModelParams p;
  const auto s = TradingSchedule::constant(1.0, 1.0);
  PdeConfig c;
  c.near_field_fraction = 0.0;
  c.dt = 2e-5;
  c.t_end = 0.1;
  const auto g = default_grid(s, p);
  REQUIRE(c.dt < p.L * g.h() * g.h());
  const double y = evolve_book(linear_book(g, p), s, p, c).path.y.back();
  CHECK(test::rel(y, solve_A(1.0) * std::sqrt(0.1)) < 1e-2);
}

TEST_CASE("shape collapse at m0/J = 10") {
  const ModelParams p;
  const double r = 10.0;
  const auto s = TradingSchedule::constant(r, 1.0);
  const auto g = default_grid(s, p);
  PdeConfig c;
  c.snapshot_times = {0.01, 0.1, 1.0};
  const auto ev = evolve_book(linear_book(g, p), s, p, c);
  const ScalingShape shape(r);
  for (const auto& snap : ev.snapshots) {
    const double t = snap.t;
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < g.N; ++i) {
      const double x = g.node(i);
      const double u = x / std::sqrt(p.D * t);
      if (u < -6.0 || u > shape.A() + 10.0) continue;
      const double F_pde = (snap.phi[i] + p.L * x) * std::sqrt(p.D / t) / r;
      worst = std::max(worst, std::abs(F_pde - shape.F(u)));
      scale = std::max(scale, std::abs(shape.F(u)));
    }
    CHECK(worst / scale < 0.02);
  }
}

TEST_CASE("liquidity is thin ahead of a buy") {
  const ModelParams p;
  const double r = 10.0;
  const auto s = TradingSchedule::constant(r, 1.0);
  PdeConfig c;
  c.snapshot_times = {0.5, 1.0};
  const auto ev = evolve_book(linear_book(default_grid(s, p), p), s, p, c);
  const double q = 1e-3 * s.total_volume();
  for (const auto& snap : ev.snapshots) {
    const double y = ev.path.at(snap.t);
    const auto ba = bid_ask(snap, q, y);
    CHECK(ba.bid == doctest::Approx(walk_oracle(snap, y, q, -1)).epsilon(1e-9));
    CHECK(ba.ask == doctest::Approx(walk_oracle(snap, y, q, +1)).epsilon(1e-9));
    CHECK(ba.ask - y < y - ba.bid);
  }
}

TEST_CASE("escaping the grid and bad configs") {
  const ModelParams p;
  const auto s = TradingSchedule::constant(100.0, 1.0);
  CHECK_THROWS_CODE(evolve_book(linear_book({2.0, 401}, p), s, p), ErrorCode::PriceEscapedGrid);
  PdeConfig c;
  c.near_field_fraction = -1.0;
  CHECK_THROWS_CODE(evolve_book(linear_book({2.0, 401}, p), s, p, c), ErrorCode::ConfigError);
}
