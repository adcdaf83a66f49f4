#include "llob/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "llob/error.hpp"
#include "llob/numerics.hpp"

namespace llob {

namespace {

double horner(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

double poly_integral(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (std::size_t j = c.size(); j-- > 0;) v = v * x + c[j] / static_cast<double>(j + 1);
  return v * x;
}

}  // namespace

TradingSchedule::TradingSchedule(std::vector<ScheduleSegment> segments)
    : segments_(std::move(segments)) {
  double expected = 0.0;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!std::isfinite(s.t0) || !std::isfinite(s.t1) || !(s.t1 > s.t0))
      fail(ErrorCode::InvalidSchedule, "segment " + std::to_string(i) + " has non-positive length");
    if (s.t0 != expected)
      fail(ErrorCode::InvalidSchedule,
           "segment " + std::to_string(i) + " does not start where the previous one ends");
    for (double c : s.coeffs)
      if (!std::isfinite(c)) fail(ErrorCode::InvalidSchedule, "non-finite coefficient");
    expected = s.t1;
  }
  q_start_.resize(segments_.size());
  double q = 0.0;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    q_start_[i] = q;
    q += poly_integral(segments_[i].coeffs, segments_[i].t1 - segments_[i].t0);
  }
}

TradingSchedule TradingSchedule::constant(double m0, double T) {
  return TradingSchedule({{0.0, T, {m0}}});
}

TradingSchedule TradingSchedule::piecewise_constant(std::span<const double> breaks,
                                                    std::span<const double> levels) {
  if (breaks.size() != levels.size() + 1)
    fail(ErrorCode::InvalidSchedule, "need one more break than levels");
  std::vector<ScheduleSegment> segs;
  segs.reserve(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) segs.push_back({breaks[i], breaks[i + 1], {levels[i]}});
  return TradingSchedule(std::move(segs));
}

TradingSchedule TradingSchedule::buy_then_sell(double m0, double T) {
  return TradingSchedule({{0.0, T, {m0}}, {T, 2.0 * T, {-m0}}});
}

double TradingSchedule::horizon() const noexcept {
  return segments_.empty() ? 0.0 : segments_.back().t1;
}

std::size_t TradingSchedule::segment_at(double t) const {
  if (segments_.empty() || t < 0.0 || t > segments_.back().t1) return npos;
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double x, const ScheduleSegment& s) { return x < s.t0; });
  auto idx = static_cast<std::size_t>(it - segments_.begin());
  return idx == 0 ? 0 : idx - 1;
}

double TradingSchedule::rate(double t) const { return derivative(t, 0); }

double TradingSchedule::derivative(double t, int order) const {
  const auto i = segment_at(t);
  if (i == npos) return 0.0;
  const auto& s = segments_[i];
  std::vector<double> c = s.coeffs;
  for (int k = 0; k < order; ++k) {
    if (c.empty()) break;
    for (std::size_t j = 1; j < c.size(); ++j) c[j - 1] = c[j] * static_cast<double>(j);
    c.pop_back();
  }
  return horner(c, t - s.t0);
}

double TradingSchedule::cumulative(double t) const {
  if (segments_.empty() || t <= 0.0) return 0.0;
  const double tc = std::min(t, horizon());
  const auto i = segment_at(tc);
  return q_start_[i] + poly_integral(segments_[i].coeffs, tc - segments_[i].t0);
}

double TradingSchedule::absolute_volume() const {
  double total = 0.0;
  for (const auto& s : segments_) {
    if (s.coeffs.size() <= 1) {
      total += std::abs(s.coeffs.empty() ? 0.0 : s.coeffs[0]) * (s.t1 - s.t0);
    } else {
      const auto& c = s.coeffs;
      total += numerics::integrate([&c](double x) { return std::abs(horner(c, x)); }, 0.0,
                                   s.t1 - s.t0, 1e-13)
                   .value;
    }
  }
  return total;
}

std::vector<double> TradingSchedule::breakpoints() const {
  std::vector<double> out;
  out.reserve(segments_.size() + 1);
  for (const auto& s : segments_) out.push_back(s.t0);
  if (!segments_.empty()) out.push_back(segments_.back().t1);
  return out;
}

bool TradingSchedule::changes_sign() const {
  bool pos = false;
  bool neg = false;
  for (const auto& s : segments_) {
    const auto& c = s.coeffs;
    const double len = s.t1 - s.t0;
    for (int k = 0; k <= 64; ++k) {
      const double v = horner(c, len * k / 64.0);
      pos = pos || v > 0.0;
      neg = neg || v < 0.0;
    }
  }
  return pos && neg;
}

bool TradingSchedule::is_zero() const {
  for (const auto& s : segments_)
    for (double c : s.coeffs)
      if (c != 0.0) return false;
  return true;
}

TradingSchedule TradingSchedule::scaled(double factor) const {
  auto segs = segments_;
  for (auto& s : segs)
    for (auto& c : s.coeffs) c *= factor;
  return TradingSchedule(std::move(segs));
}

TradingSchedule make_round_trip(std::span<const double> breaks, std::span<const double> levels) {
  if (levels.empty() || breaks.size() != levels.size() + 2)
    fail(ErrorCode::InvalidSchedule, "closed schedule needs at least two segments");
  double q = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) q += levels[i] * (breaks[i + 1] - breaks[i]);
  std::vector<double> all(levels.begin(), levels.end());
  const double last_len = breaks[breaks.size() - 1] - breaks[breaks.size() - 2];
  all.push_back(-q / last_len);
  return TradingSchedule::piecewise_constant(breaks, all);
}

double PricePath::at(double time) const { return numerics::interp_linear(t, y, time); }

double PricePath::max_abs_residual() const {
  double r = 0.0;
  for (double v : residual) r = std::max(r, std::abs(v));
  return r;
}

}  // namespace llob
