#include "llob/price_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "llob/error.hpp"
#include "llob/numerics.hpp"

namespace llob {

namespace nm = numerics;

void SolverConfig::validate() const {
  if (!(dt >= 0.0)) fail(ErrorCode::ConfigError, "dt must be non-negative");
  if (!(tolerance > 0.0 && tolerance <= 1e-4))
    fail(ErrorCode::ConfigError, "tolerance must lie in (0, 1e-4]");
  if (max_iterations < 10) fail(ErrorCode::ConfigError, "max_iterations must be at least 10");
  if (quad_nodes < 2) fail(ErrorCode::ConfigError, "quad_nodes must be at least 2");
  if (!(damping > 0.0 && damping <= 1.0)) fail(ErrorCode::ConfigError, "damping must lie in (0, 1]");
}

namespace {

constexpr double kInvSqrt4Pi = 0.28209479177387814347;  // 1/sqrt(4 pi)

// Nondimensional propagator (D = J = 1).
double propagator_nd(const TradingSchedule& m, double t) {
  double total = 0.0;
  for (const auto& seg : m.segments()) {
    if (seg.t0 >= t) break;
    const double b = std::min(seg.t1, t);
    const double ta = t - seg.t0;
    const double tau_lo = t - b;
    for (std::size_t j = 0; j < seg.coeffs.size(); ++j) {
      if (seg.coeffs[j] == 0.0) continue;
      double binom = 1.0;
      double acc = 0.0;
      for (std::size_t i = 0; i <= j; ++i) {
        const double e = static_cast<double>(i) + 0.5;
        const double piece = (std::pow(ta, e) - std::pow(tau_lo, e)) / e;
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        acc += binom * std::pow(ta, static_cast<double>(j - i)) * sign * piece;
        binom = binom * static_cast<double>(j - i) / static_cast<double>(i + 1);
      }
      total += seg.coeffs[j] * acc;
    }
  }
  return total * kInvSqrt4Pi;
}

struct Term {
  double c;  // weight
  double Y;  // past price at the node
  double g;  // 1 / (4 tau)
};

class Marcher {
 public:
  Marcher(const TradingSchedule& m, const SolverConfig& cfg, std::span<const double> t,
          double hist_end, std::function<double(double)> hist)
      : m_(m), cfg_(cfg), t_(t), hist_end_(hist_end), hist_(std::move(hist)) {}

  PricePath run() {
    const std::size_t n = t_.size();
    y_.assign(n, 0.0);
    std::vector<double> res(n, 0.0);
    s8_.assign(n * 8, 0.0);
    w8_.assign(n * 8, 0.0);
    Y8_.assign(n * 8, 0.0);
    s4_.assign(n * 4, 0.0);
    w4_.assign(n * 4, 0.0);
    Y4_.assign(n * 4, 0.0);
    if (n == 0) return {};
    y_[0] = in_history(t_[0]) ? hist_(t_[0]) : 0.0;
    double ymax = std::abs(y_[0]);

    for (std::size_t k = 1; k < n; ++k) {
      build_terms(k);
      const double tk = t_[k];
      const double yp = y_[k - 1];
      const bool known = in_history(tk);
      if (known) {
        // last interval is fully known: fold it into the fixed terms
        add_u_space(k - 1, k, static_cast<std::size_t>(cfg_.quad_nodes));
        y_[k] = hist_(tk);
        res[k] = y_[k] - eval_fixed(y_[k]);
      } else {
        build_last(k);
        double seed;
        if (k == 1) {
          seed = propagator_nd(m_, tk);
        } else {
          const double r = (tk - t_[k - 1]) / (t_[k - 1] - t_[k - 2]);
          seed = yp + (yp - y_[k - 2]) * r;
        }
        const double sigma = seed < 0.0 || (seed == 0.0 && yp < 0.0) ? -1.0 : 1.0;
        const auto [z, defect] = solve_step(sigma, seed * sigma, yp, ymax, k);
        y_[k] = sigma * z;
        res[k] = sigma * defect;
      }
      ymax = std::max(ymax, std::abs(y_[k]));
      cache_interval(k - 1);
    }
    PricePath out;
    out.t.assign(t_.begin(), t_.end());
    out.y = y_;
    out.residual = std::move(res);
    return out;
  }

 private:
  bool in_history(double t) const { return hist_ && t <= hist_end_; }

  double past_y(std::size_t j, double s) const {
    if (in_history(t_[j + 1])) return hist_(s);
    const double w = (s - t_[j]) / (t_[j + 1] - t_[j]);
    return (1.0 - w) * y_[j] + w * y_[j + 1];
  }

  void cache_interval(std::size_t j) {
    const double mid = 0.5 * (t_[j] + t_[j + 1]);
    const double half = 0.5 * (t_[j + 1] - t_[j]);
    const auto& r8 = nm::gauss_legendre(8);
    for (std::size_t i = 0; i < 8; ++i) {
      const double s = mid + half * r8.nodes[i];
      s8_[j * 8 + i] = s;
      w8_[j * 8 + i] = r8.weights[i] * half * m_.rate(s);
      Y8_[j * 8 + i] = past_y(j, s);
    }
    const auto& r4 = nm::gauss_legendre(4);
    for (std::size_t i = 0; i < 4; ++i) {
      const double s = mid + half * r4.nodes[i];
      s4_[j * 4 + i] = s;
      w4_[j * 4 + i] = r4.weights[i] * half * m_.rate(s);
      Y4_[j * 4 + i] = past_y(j, s);
    }
  }

  // interval j integrated in u = sqrt(t_k - s), which absorbs the kernel singularity
  void add_u_space(std::size_t j, std::size_t k, std::size_t nodes) {
    const double tk = t_[k];
    const double ua = std::sqrt(std::max(tk - t_[j + 1], 0.0));
    const double ub = std::sqrt(tk - t_[j]);
    const double mid = 0.5 * (ua + ub);
    const double half = 0.5 * (ub - ua);
    const auto& rule = nm::gauss_legendre(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
      const double u = mid + half * rule.nodes[i];
      const double s = tk - u * u;
      const double c = rule.weights[i] * half * m_.rate(s) * nm::kInvSqrtPi;
      if (c == 0.0) continue;
      terms_.push_back({c, past_y(j, s), 0.25 / (u * u)});
    }
  }

  void build_terms(std::size_t k) {
    terms_.clear();
    const double tk = t_[k];
    for (std::size_t j = 0; j + 1 < k; ++j) {
      const double len = t_[j + 1] - t_[j];
      const double ratio = (tk - t_[j + 1]) / len;
      if (ratio < 2.0) {
        add_u_space(j, k, 16);
        continue;
      }
      const bool fine = ratio < 16.0;
      const std::size_t nn = fine ? 8 : 4;
      const double* s = fine ? &s8_[j * 8] : &s4_[j * 4];
      const double* w = fine ? &w8_[j * 8] : &w4_[j * 4];
      const double* Y = fine ? &Y8_[j * 8] : &Y4_[j * 4];
      for (std::size_t i = 0; i < nn; ++i) {
        if (w[i] == 0.0) continue;
        const double tau = tk - s[i];
        terms_.push_back({w[i] * kInvSqrt4Pi / std::sqrt(tau), Y[i], 0.25 / tau});
      }
    }
  }

  void build_last(std::size_t k) {
    last_.clear();
    const double dtk = t_[k] - t_[k - 1];
    const double ub = std::sqrt(dtk);
    const auto nodes = static_cast<std::size_t>(cfg_.quad_nodes);
    const auto& rule = nm::gauss_legendre(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
      const double u = 0.5 * ub * (1.0 + rule.nodes[i]);
      const double c = rule.weights[i] * 0.5 * ub * m_.rate(t_[k] - u * u) * nm::kInvSqrtPi;
      if (c == 0.0) continue;
      // linear past path on the last interval: y - Y(s) = (y - y_prev) u^2 / dt
      last_.push_back({c, 0.0, u * u / (4.0 * dtk * dtk)});
    }
  }

  double eval_fixed(double y) const {
    double g = 0.0;
    for (const auto& term : terms_) {
      const double d = y - term.Y;
      g += term.c * std::exp(-d * d * term.g);
    }
    return g;
  }

  double eval(double y, double yp) const {
    double g = eval_fixed(y);
    const double d2 = (y - yp) * (y - yp);
    for (const auto& term : last_) g += term.c * std::exp(-d2 * term.g);
    return g;
  }

  struct StepResult {
    double z;
    double defect;
  };

  // Solves z = sigma G(sigma z); the mirrored form makes sign-flipped schedules
  // produce bit-identical magnitudes.
  StepResult solve_step(double sigma, double z0, double yp, double ymax, std::size_t k) const {
    auto F = [&](double z) { return z - sigma * eval(sigma * z, yp); };
    const double tol = cfg_.tolerance;
    auto scale = [&](double z) {
      return std::max({std::abs(z), ymax, std::numeric_limits<double>::min()});
    };

    double z = z0;
    double f = F(z);
    double best_z = z;
    double best_f = f;
    for (int it = 0; it < cfg_.max_iterations; ++it) {
      if (std::abs(f) <= tol * scale(z)) return {z, f};
      const double zn = z - cfg_.damping * f;
      const double fn = F(zn);
      if (!std::isfinite(fn) || std::abs(fn) > 0.9 * std::abs(f)) break;
      z = zn;
      f = fn;
      if (std::abs(f) < std::abs(best_f)) {
        best_z = z;
        best_f = f;
      }
    }
    if (std::abs(best_f) <= tol * scale(best_z)) return {best_z, best_f};

    // sign-change fallback
    const double step = std::max({std::abs(best_f), 1e-6 * scale(best_z), 1e-300});
    nm::Bracket br;
    try {
      br = nm::bracket_sign_change(F, best_z, step, 200);
    } catch (const Error&) {
      fail(ErrorCode::FixedPointDivergence,
           "no sign change of the price defect at t = " + std::to_string(t_[k]));
    }
    double zr = br.lo == br.hi ? br.lo : nm::find_root(F, br.lo, br.hi, br.f_lo, br.f_hi, 1e-16, 400);

    // Far behind a fast-moving price the defect can be flat to rounding over a
    // wide band; pick a representative point of the band instead of noise.
    const double G = eval(sigma * zr, yp);
    const double delta = 256.0 * std::numeric_limits<double>::epsilon() * (std::abs(G) + std::abs(zr));
    auto band_edge = [&](double shift) -> std::optional<double> {
      auto Fs = [&](double z) { return F(z) - shift; };
      try {
        const auto b = nm::bracket_sign_change(Fs, zr, 1e-12 * scale(zr), 120);
        if (b.lo == b.hi) return b.lo;
        return nm::find_root(Fs, b.lo, b.hi, b.f_lo, b.f_hi, 1e-16, 400);
      } catch (const Error&) {
        return std::nullopt;
      }
    };
    const auto hi_edge = band_edge(delta);
    const auto lo_edge = band_edge(-delta);
    if (hi_edge && lo_edge) {
      const double width = std::abs(*hi_edge - *lo_edge);
      if (width <= 1e-9 * scale(zr)) {
        zr = 0.5 * (*hi_edge + *lo_edge);
      } else {
        const double zp = sigma * yp;
        zr = std::abs(*hi_edge - zp) < std::abs(*lo_edge - zp) ? *hi_edge : *lo_edge;
      }
    }
    const double fr = F(zr);
    const double accept = std::max(tol * scale(zr), 4.0 * delta);
    if (!std::isfinite(fr) || std::abs(fr) > accept)
      fail(ErrorCode::FixedPointDivergence,
           "price defect " + std::to_string(fr) + " above tolerance at t = " + std::to_string(t_[k]));
    return {zr, fr};
  }

  const TradingSchedule& m_;
  const SolverConfig& cfg_;
  std::span<const double> t_;
  double hist_end_;
  std::function<double(double)> hist_;
  std::vector<double> y_;
  std::vector<double> s8_, w8_, Y8_, s4_, w4_, Y4_;
  std::vector<Term> terms_;
  std::vector<Term> last_;
};

void check_grid(std::span<const double> times) {
  if (times.empty()) fail(ErrorCode::ConfigError, "empty time grid");
  if (times[0] != 0.0) fail(ErrorCode::ConfigError, "time grid must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) fail(ErrorCode::ConfigError, "time grid must increase strictly");
}

}  // namespace

std::vector<double> marching_grid(const TradingSchedule& schedule, double dt, double t_end) {
  if (!(dt > 0.0) || !(t_end > 0.0)) fail(ErrorCode::ConfigError, "dt and horizon must be positive");
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  std::vector<double> grid;
  grid.reserve(steps + schedule.segments().size() + 2);
  for (std::size_t k = 0; k < steps; ++k) grid.push_back(static_cast<double>(k) * dt);
  grid.push_back(t_end);
  for (double b : schedule.breakpoints())
    if (b > 0.0 && b < t_end) grid.push_back(b);
  std::sort(grid.begin(), grid.end());
  std::vector<double> out;
  out.reserve(grid.size());
  const double merge = 1e-9 * dt;
  for (double g : grid) {
    if (!out.empty() && g - out.back() <= merge) {
      // keep breakpoints exact
      for (double b : schedule.breakpoints())
        if (b == g) out.back() = g;
      continue;
    }
    out.push_back(g);
  }
  return out;
}

PricePath solve_price_path(const TradingSchedule& schedule, const ModelParams& params,
                           const SolverConfig& config, std::span<const double> times,
                           const std::optional<KnownHistory>& history) {
  config.validate();
  check_grid(times);
  const auto nd = nondimensionalize(params, schedule);
  const double ps = nd.scales.price;
  std::function<double(double)> hist;
  double hist_end = -1.0;
  if (history) {
    hist_end = history->t_end;
    hist = [f = history->y, ps](double s) { return f(s) / ps; };
  }
  Marcher marcher(nd.schedule, config, times, hist_end, hist);
  auto path = marcher.run();
  for (auto& v : path.y) v *= ps;
  for (auto& v : path.residual) v *= ps;
  return path;
}

PricePath solve_price_path(const TradingSchedule& schedule, const ModelParams& params,
                           const SolverConfig& config) {
  const double T = schedule.horizon();
  if (!(T > 0.0)) fail(ErrorCode::InvalidSchedule, "empty schedule");
  const double dt = config.dt > 0.0 ? config.dt : T / 2000.0;
  const auto grid = marching_grid(schedule, dt, T);
  return solve_price_path(schedule, params, config, grid);
}

double propagator_value(const TradingSchedule& schedule, const ModelParams& params, double t) {
  const auto nd = nondimensionalize(params, schedule);
  return propagator_nd(nd.schedule, t) * nd.scales.price;
}

PricePath propagator_price(const TradingSchedule& schedule, const ModelParams& params,
                           std::span<const double> times) {
  const auto nd = nondimensionalize(params, schedule);
  PricePath out;
  out.t.assign(times.begin(), times.end());
  out.y.reserve(times.size());
  for (double t : times) out.y.push_back(propagator_nd(nd.schedule, t) * nd.scales.price);
  out.residual.assign(times.size(), 0.0);
  return out;
}

PricePath propagator_price(const TradingSchedule& schedule, const ModelParams& params, double dt) {
  const double T = schedule.horizon();
  const auto grid = marching_grid(schedule, dt > 0.0 ? dt : T / 2000.0, T);
  return propagator_price(schedule, params, grid);
}

double price_equation_rhs(const TradingSchedule& schedule, const ModelParams& params,
                          const std::function<double(double)>& path, double t, double y,
                          double rel_tol) {
  if (!(t > 0.0)) return 0.0;
  const auto nd = nondimensionalize(params, schedule);
  const double ps = nd.scales.price;
  const double yn = y / ps;
  auto integrand = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double s = t - u * u;
    const double d = yn - path(s) / ps;
    return nd.schedule.rate(s) * std::exp(-d * d / (4.0 * u * u));
  };
  std::vector<double> cuts{0.0};
  for (double b : nd.schedule.breakpoints())
    if (b > 0.0 && b < t) cuts.push_back(std::sqrt(t - b));
  cuts.push_back(std::sqrt(t));
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += nm::integrate(integrand, cuts[i], cuts[i + 1], rel_tol).value;
  return total * nm::kInvSqrtPi * ps;
}

namespace {

// (1/sqrt(pi)) int_0^1 exp(-A^2 v^2 / (4 (1 + sqrt(1 - v^2))^2)) dv
double amplitude_integral(double A) {
  auto f = [A](double v) {
    const double w = std::sqrt(std::max(0.0, 1.0 - v * v));
    const double x = A * v / (2.0 * (1.0 + w));
    return std::exp(-x * x);
  };
  const double cut = A > 40.0 ? 40.0 / A : 1.0;
  double total = nm::integrate_endpoint_singular(f, 0.0, cut, 1e-15).value;
  if (cut < 1.0) total += nm::integrate_endpoint_singular(f, cut, 1.0, 1e-15).value;
  return total * nm::kInvSqrtPi;
}

}  // namespace

double solve_A(double rate_ratio) {
  if (!(rate_ratio > 0.0) || !std::isfinite(rate_ratio))
    fail(ErrorCode::NonPositiveParameter, "rate ratio must be positive");
  auto f = [rate_ratio](double A) { return A - rate_ratio * amplitude_integral(A); };
  const double hi = 2.0 * std::sqrt(2.0 * rate_ratio);
  return nm::find_root(f, 0.0, hi, 1e-16, 400);
}

double y_ratio(double rate_ratio) { return solve_A(rate_ratio) / std::sqrt(rate_ratio); }

double impact(double Q, double m0, const ModelParams& params) {
  if (!(Q > 0.0) || !(m0 > 0.0)) fail(ErrorCode::NonPositiveParameter, "Q and m0 must be positive");
  return solve_A(m0 / params.J) * std::sqrt(params.D * Q / m0);
}

}  // namespace llob
