#include "llob/manipulation.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <json.hpp>
#include <thread>

#include "llob/error.hpp"
#include "llob/numerics.hpp"

namespace llob {

namespace nm = numerics;

RoundTripSchedule::RoundTripSchedule(TradingSchedule schedule) : schedule_(std::move(schedule)) {
  if (schedule_.empty()) fail(ErrorCode::InvalidSchedule, "closed schedule is empty");
  const double gross = schedule_.absolute_volume();
  if (std::abs(schedule_.total_volume()) > 1e-12 * gross)
    fail(ErrorCode::InvalidSchedule, "schedule does not close: Q(T) != 0");
}

RoundTripSchedule RoundTripSchedule::from_levels(std::span<const double> breaks,
                                                 std::span<const double> levels) {
  return RoundTripSchedule(make_round_trip(breaks, levels));
}

double path_cost(const TradingSchedule& schedule, const PricePath& path) {
  const auto& rule = nm::gauss_legendre(4);
  const auto bps = schedule.breakpoints();
  double total = 0.0;
  std::vector<double> cuts;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const double a = path.t[k], b = path.t[k + 1];
    const double ya = path.y[k], slope = (path.y[k + 1] - ya) / (b - a);
    cuts.assign({a});
    for (double p : bps)
      if (p > a && p < b) cuts.push_back(p);
    cuts.push_back(b);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double half = 0.5 * (cuts[c + 1] - cuts[c]), mid = 0.5 * (cuts[c + 1] + cuts[c]);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double s = mid + half * rule.nodes[i];
        total += half * rule.weights[i] * schedule.rate(s) * (ya + slope * (s - a));
      }
    }
  }
  return total;
}

double round_trip_cost(const RoundTripSchedule& schedule, const ModelParams& params,
                       const SolverConfig& config) {
  const auto& s = schedule.schedule();
  if (s.is_zero()) return 0.0;
  return path_cost(s, solve_price_path(s, params, config));
}

double kernel_M(double tau, double dy, const ModelParams& params) {
  const double a = std::abs(tau);
  if (a == 0.0) fail(ErrorCode::ParameterOutOfRange, "kernel is singular at equal times");
  return std::exp(-dy * dy / (4.0 * params.D * a)) / (params.L * std::sqrt(4.0 * nm::kPi * params.D * a));
}

namespace {

// Integrals of M over pairs of path intervals, optionally weighted by m at
// both times. The 1/sqrt singularity on and next to the diagonal is removed by
// s' = s - v^2 (inner) and s = a + w^2 (outer).
class PairIntegrator {
 public:
  PairIntegrator(const PricePath& path, const ModelParams& params, std::size_t nodes,
                 const TradingSchedule* weights)
      : path_(path), D_(params.D), rule_(nm::gauss_legendre(nodes)), weights_(weights) {
    scale_ = 1.0 / (params.L * std::sqrt(nm::kPi * params.D));
  }

  [[nodiscard]] std::size_t cells() const { return path_.size() - 1; }

  [[nodiscard]] double operator()(std::size_t k, std::size_t l) const {
    if (k < l) std::swap(k, l);
    return k == l ? diagonal(k) : off_diagonal(k, l);
  }

 private:
  [[nodiscard]] double a(std::size_t k) const { return path_.t[k]; }
  [[nodiscard]] double b(std::size_t k) const { return path_.t[k + 1]; }
  [[nodiscard]] double slope(std::size_t k) const {
    return (path_.y[k + 1] - path_.y[k]) / (b(k) - a(k));
  }
  [[nodiscard]] double y(std::size_t k, double s) const { return path_.y[k] + slope(k) * (s - a(k)); }
  [[nodiscard]] double w(double s) const { return weights_ ? weights_->rate(s) : 1.0; }

  template <class F>
  double gauss(double lo, double hi, F&& f) const {
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule_.nodes.size(); ++i) sum += rule_.weights[i] * f(mid + half * rule_.nodes[i]);
    return half * sum;
  }

  [[nodiscard]] double diagonal(std::size_t k) const {
    const double c = slope(k) * slope(k) / (4.0 * D_);
    const double ak = a(k);
    const double v = gauss(0.0, std::sqrt(b(k) - ak), [&](double om) {
      const double s = ak + om * om;
      const double inner = gauss(0.0, om, [&](double u) { return std::exp(-c * u * u) * w(s - u * u); });
      return 2.0 * om * w(s) * inner;
    });
    return 2.0 * scale_ * v;
  }

  [[nodiscard]] double inner(std::size_t k, std::size_t l, double s) const {
    const double ys = y(k, s);
    return gauss(std::sqrt(std::max(s - b(l), 0.0)), std::sqrt(s - a(l)), [&](double u) {
      const double sp = s - u * u;
      const double dy = ys - y(l, sp);
      return std::exp(-dy * dy / (4.0 * D_ * u * u)) * w(sp);
    });
  }

  [[nodiscard]] double off_diagonal(std::size_t k, std::size_t l) const {
    double v;
    if (k == l + 1) {
      const double ak = a(k);
      v = gauss(0.0, std::sqrt(b(k) - ak), [&](double om) {
        const double s = ak + om * om;
        return 2.0 * om * w(s) * inner(k, l, s);
      });
    } else {
      v = gauss(a(k), b(k), [&](double s) { return w(s) * inner(k, l, s); });
    }
    return scale_ * v;
  }

  const PricePath& path_;
  double D_;
  const nm::GaussRule& rule_;
  const TradingSchedule* weights_;
  double scale_;
};

}  // namespace

KernelMatrix kernel_matrix(const PricePath& path, const ModelParams& params, std::size_t nodes) {
  if (path.size() < 2) fail(ErrorCode::ParameterOutOfRange, "kernel matrix needs at least one interval");
  const PairIntegrator pairs(path, params, nodes, nullptr);
  KernelMatrix m;
  m.n = pairs.cells();
  m.data.assign(m.n * m.n, 0.0);
  for (std::size_t k = 0; k < m.n; ++k)
    for (std::size_t l = 0; l <= k; ++l) {
      const double v = pairs(k, l);
      m.data[k * m.n + l] = v;
      m.data[l * m.n + k] = v;
    }
  return m;
}

EigenRange eigen_range(const KernelMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.n);
  const Eigen::Map<const Eigen::MatrixXd> mat(m.data.data(), n, n);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mat, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(ErrorCode::InvariantBreach, "eigen decomposition failed");
  return {solver.eigenvalues().minCoeff(), solver.eigenvalues().maxCoeff()};
}

double kernel_quadratic_cost(const TradingSchedule& schedule, const PricePath& path,
                             const ModelParams& params, std::size_t nodes) {
  if (path.size() < 2 || schedule.is_zero()) return 0.0;
  for (double p : schedule.breakpoints())
    if (p > path.t.front() && p < path.t.back() &&
        !std::binary_search(path.t.begin(), path.t.end(), p))
      fail(ErrorCode::ParameterOutOfRange, "path grid must contain the schedule breakpoints");
  const PairIntegrator pairs(path, params, nodes, &schedule);
  double total = 0.0;
  for (std::size_t k = 0; k < pairs.cells(); ++k) {
    total += 0.5 * pairs(k, k);
    for (std::size_t l = 0; l < k; ++l) total += pairs(k, l);
  }
  return total;
}

void AuditConfig::validate() const {
  if (trials < 1) fail(ErrorCode::ConfigError, "audit needs at least one trial");
  if (segments_min < 2 || segments_max < segments_min)
    fail(ErrorCode::ConfigError, "closed schedules need 2 <= segments_min <= segments_max");
  if (!(level_bound > 0.0) || !(horizon > 0.0) || !std::isfinite(tolerance_factor))
    fail(ErrorCode::ConfigError, "audit bounds must be positive");
  if (jobs < 1) fail(ErrorCode::ConfigError, "jobs must be >= 1");
  solver.validate();
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double unit(std::uint64_t& state) { return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53; }

}  // namespace

TradingSchedule random_round_trip(const AuditConfig& config, const ModelParams& params, std::size_t index) {
  // independent stream per trial
  std::uint64_t mix = config.seed;
  std::uint64_t state = splitmix64(mix) ^ (0xD1B54A32D192ED03ULL * (static_cast<std::uint64_t>(index) + 1));
  const int span = config.segments_max - config.segments_min + 1;
  const int K = config.segments_min +
                static_cast<int>(std::min<std::uint64_t>(splitmix64(state) % static_cast<std::uint64_t>(span),
                                                         static_cast<std::uint64_t>(span - 1)));
  // lengths drawn from U(0.25, 1) then normalized, so the balancing level stays bounded
  std::vector<double> lengths(static_cast<std::size_t>(K));
  double total = 0.0;
  for (double& len : lengths) {
    len = 0.25 + 0.75 * unit(state);
    total += len;
  }
  std::vector<double> breaks{0.0};
  double acc = 0.0;
  for (int i = 0; i + 1 < K; ++i) {
    acc += lengths[static_cast<std::size_t>(i)] / total;
    breaks.push_back(acc * config.horizon);
  }
  breaks.push_back(config.horizon);
  std::vector<double> levels(static_cast<std::size_t>(K - 1));
  for (double& lv : levels) lv = config.level_bound * params.J * (2.0 * unit(state) - 1.0);
  return make_round_trip(breaks, levels);
}

AuditResult random_round_trip_audit(const AuditConfig& config, const ModelParams& params) {
  config.validate();
  AuditResult out;
  out.costs.assign(config.trials, 0.0);
  std::vector<std::exception_ptr> errors(config.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < config.trials; i = next++) {
      try {
        const RoundTripSchedule s(random_round_trip(config, params, i));
        out.costs[i] = round_trip_cost(s, params, config.solver);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned jobs = std::min<unsigned>(config.jobs, static_cast<unsigned>(config.trials));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  out.argmin = static_cast<std::size_t>(std::min_element(out.costs.begin(), out.costs.end()) - out.costs.begin());
  out.min_cost = out.costs[out.argmin];
  std::vector<double> mags(out.costs.size());
  std::transform(out.costs.begin(), out.costs.end(), mags.begin(), [](double c) { return std::abs(c); });
  const auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
  std::nth_element(mags.begin(), mid, mags.end());
  double median = *mid;
  if (mags.size() % 2 == 0) median = 0.5 * (median + *std::max_element(mags.begin(), mid));
  out.median_abs_cost = median;
  out.tolerance = config.tolerance_factor * median;
  out.argmin_schedule = random_round_trip(config, params, out.argmin);
  return out;
}

std::string schedule_json(const TradingSchedule& schedule) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : schedule.segments()) segs.push_back({{"t0", s.t0}, {"t1", s.t1}, {"coeffs", s.coeffs}});
  return nlohmann::json{{"segments", segs}}.dump();
}

void require_no_manipulation(const AuditResult& result) {
  if (result.breached())
    fail(ErrorCode::InvariantBreach, "closed schedule with negative cost " + std::to_string(result.min_cost) +
                                         ": " + schedule_json(result.argmin_schedule));
}

}  // namespace llob
