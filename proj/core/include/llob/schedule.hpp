#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace llob {

// One piece of m(t): m = sum_j coeffs[j] * (t - t0)^j on [t0, t1].
struct ScheduleSegment {
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<double> coeffs;

  bool operator==(const ScheduleSegment&) const = default;
};

// Signed trading intensity (m > 0 buys) as a piecewise polynomial on [0, T].
// Outside the horizon the rate is zero and Q stays at Q(T).
class TradingSchedule {
 public:
  TradingSchedule() = default;
  explicit TradingSchedule(std::vector<ScheduleSegment> segments);

  static TradingSchedule constant(double m0, double T);
  static TradingSchedule piecewise_constant(std::span<const double> breaks,
                                            std::span<const double> levels);
  // +m0 on [0, T], -m0 on [T, 2T]
  static TradingSchedule buy_then_sell(double m0, double T);

  [[nodiscard]] const std::vector<ScheduleSegment>& segments() const noexcept { return segments_; }
  [[nodiscard]] double horizon() const noexcept;
  [[nodiscard]] bool empty() const noexcept { return segments_.empty(); }

  // Right-continuous at interior breakpoints; the last segment is closed.
  [[nodiscard]] double rate(double t) const;
  [[nodiscard]] double derivative(double t, int order) const;
  [[nodiscard]] double cumulative(double t) const;  // Q(t)
  [[nodiscard]] double total_volume() const { return cumulative(horizon()); }
  [[nodiscard]] double absolute_volume() const;      // integral of |m|
  [[nodiscard]] std::vector<double> breakpoints() const;
  [[nodiscard]] bool changes_sign() const;
  [[nodiscard]] bool is_zero() const;

  // Index of the segment containing t (by the right-continuity rule); npos if outside.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  [[nodiscard]] std::size_t segment_at(double t) const;

  [[nodiscard]] TradingSchedule scaled(double factor) const;

  bool operator==(const TradingSchedule&) const = default;

 private:
  std::vector<ScheduleSegment> segments_;
  std::vector<double> q_start_;  // Q at each segment start
};

// Closed schedule: piecewise constant, the last level chosen so that Q(T) = 0.
// `levels` holds all but the last level.
TradingSchedule make_round_trip(std::span<const double> breaks, std::span<const double> levels);

struct PricePath {
  std::vector<double> t;
  std::vector<double> y;
  std::vector<double> residual;

  [[nodiscard]] std::size_t size() const noexcept { return t.size(); }
  [[nodiscard]] double at(double time) const;  // linear interpolation
  [[nodiscard]] double max_abs_residual() const;
};

}  // namespace llob
