#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "llob/model.hpp"
#include "llob/price_solver.hpp"
#include "llob/schedule.hpp"

namespace llob {

// A schedule with zero net volume, checked on construction.
class RoundTripSchedule {
 public:
  explicit RoundTripSchedule(TradingSchedule schedule);
  // Piecewise constant; the last level is solved for (see make_round_trip).
  static RoundTripSchedule from_levels(std::span<const double> breaks, std::span<const double> levels);

  [[nodiscard]] const TradingSchedule& schedule() const noexcept { return schedule_; }

 private:
  TradingSchedule schedule_;
};

// integral of m y over the path's time span, y linear between path nodes and
// m exact inside each interval.
double path_cost(const TradingSchedule& schedule, const PricePath& path);

double round_trip_cost(const RoundTripSchedule& schedule, const ModelParams& params,
                       const SolverConfig& config = {});

// M(s, s') = exp(-dy^2 / (4 D |s - s'|)) / (L sqrt(4 pi D |s - s'|)), dy = y_s - y_s'.
// With this normalization C = (1/2) int int m M m reproduces the direct cost.
double kernel_M(double tau, double dy, const ModelParams& params);

// Row-major symmetric matrix of M integrated over pairs of path intervals.
struct KernelMatrix {
  std::size_t n = 0;
  std::vector<double> data;

  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

KernelMatrix kernel_matrix(const PricePath& path, const ModelParams& params, std::size_t nodes = 16);

struct EigenRange {
  double min = 0.0;
  double max = 0.0;
};
EigenRange eigen_range(const KernelMatrix& m);

// (1/2) int int m_s M(s, s') m_s' over the path's intervals. O(n^2) in the
// number of intervals; intended for paths of a few hundred points.
double kernel_quadratic_cost(const TradingSchedule& schedule, const PricePath& path,
                             const ModelParams& params, std::size_t nodes = 16);

struct AuditConfig {
  std::size_t trials = 1000;
  std::uint64_t seed = 42;
  int segments_min = 2;
  int segments_max = 12;
  double level_bound = 5.0;  // levels uniform in [-bound J, bound J]
  double horizon = 1.0;
  // breach below -factor * median |C|; a negative factor demands a positive margin
  double tolerance_factor = 1e-3;
  SolverConfig solver{.dt = 1.0 / 400.0};
  unsigned jobs = 1;

  void validate() const;
};

// Trial `index` of the audit family; depends only on (seed, index).
TradingSchedule random_round_trip(const AuditConfig& config, const ModelParams& params, std::size_t index);

struct AuditResult {
  std::vector<double> costs;
  std::size_t argmin = 0;
  double min_cost = 0.0;
  double median_abs_cost = 0.0;
  double tolerance = 0.0;
  TradingSchedule argmin_schedule;

  [[nodiscard]] bool breached() const { return min_cost < -tolerance; }
};

AuditResult random_round_trip_audit(const AuditConfig& config, const ModelParams& params);

// One JSON object describing the schedule (segments and coefficients).
std::string schedule_json(const TradingSchedule& schedule);

// Throws InvariantBreach carrying the offending schedule when the audit found a
// negative cost beyond tolerance.
void require_no_manipulation(const AuditResult& result);

}  // namespace llob
