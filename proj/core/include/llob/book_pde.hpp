#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "llob/model.hpp"
#include "llob/schedule.hpp"

namespace llob {

struct Grid1D {
  double W = 1.0;       // half-width
  std::size_t N = 2001;  // odd, so y = 0 is a node

  [[nodiscard]] double h() const noexcept { return 2.0 * W / static_cast<double>(N - 1); }
  // exactly antisymmetric, centre node exactly 0
  [[nodiscard]] double node(std::size_t i) const noexcept {
    const double n = static_cast<double>(N - 1);
    return W * (2.0 * static_cast<double>(i) - n) / n;
  }
  void validate() const;
};

struct BookProfile {
  Grid1D grid;
  std::vector<double> phi;
  double t = 0.0;
};

// (lam/nu)(1 - e^{gamma y}) for y <= 0, odd for y > 0. Requires nu > 0.
double stationary_profile(double y, const ModelParams& params);

// Stationary book with a deposition asymmetry xi(d), d = distance from the
// price into the bid side; odd in y. xi = 0 reproduces stationary_profile.
double stationary_profile_general(const std::function<double(double)>& xi,
                                  const ModelParams& params, double y, double rel_tol = 1e-12);

// phi = -L y on the grid.
BookProfile linear_book(const Grid1D& grid, const ModelParams& params);

// Half-width keeping the source well inside the grid for this schedule.
Grid1D default_grid(const TradingSchedule& schedule, const ModelParams& params,
                    std::size_t N = 2001, double t_end = 0.0);

enum class SourcePlacement {
  Path,               // source follows the price linearly across the step (solved jointly)
  StartOfStep,        // deposit at the price found at the start of the step
  EndOfStepIterated,  // one re-solve with the deposit at the predicted end price
  Midpoint,           // one re-solve with the deposit at the mean of both
};

enum class ZeroInterpolation {
  Linear,     // straight line between the bracketing nodes
  KinkAware,  // lines extrapolated from each side; resolves the kink at the price
};

struct PdeConfig {
  double dt = 0.0;  // 0 means horizon / 2000
  double t_end = 0.0;  // 0 means the schedule horizon
  SourcePlacement placement = SourcePlacement::Path;
  std::vector<double> snapshot_times;
  int scan_window = 10;  // nodes either side of the previous price
  ZeroInterpolation interpolation = ZeroInterpolation::Linear;
  // Deposits stay exact heat-kernel terms until this fraction of the run has
  // passed, then move onto the grid. The age is fixed in time rather than in
  // steps: the grid's error on a fresh hand-over goes like dt^2 / age^1.5.
  // Zero selects the bare two-node split of each step's mass; that needs
  // |m| dt well below L h^2, otherwise the fresh spike makes the nodal book
  // non-monotone at the price. In that mode Path behaves like EndOfStepIterated.
  double near_field_fraction = 1.0 / 64.0;
};

struct BookEvolution {
  std::vector<BookProfile> snapshots;
  PricePath path;
  // Per snapshot: integral of phi - initial phi from the solver's own
  // representation, free of the sampling error at the price kink.
  std::vector<double> excess;
};

// March of d phi/dt = D phi'' + m_t delta(y - y_t): TR-BDF2 on the grid with the
// boundary nodes clamped to the initial profile, recent deposits handled exactly.
BookEvolution evolve_book(const BookProfile& initial, const TradingSchedule& schedule,
                          const ModelParams& params, const PdeConfig& config = {});

// Zero crossing of phi (bids above zero below the price). A previous price
// limits the search to the scan window, with a full rescan if it is empty.
double extract_price(const BookProfile& profile, std::optional<double> previous = std::nullopt,
                     int scan_window = 10, ZeroInterpolation method = ZeroInterpolation::Linear);

struct BidAsk {
  double bid;
  double ask;
};

// Prices at which volume q is available on each side of the current price.
// Pass the price when it is already known: behind a fast price the book is
// flat to within discretization error and a fresh scan can be ambiguous.
BidAsk bid_ask(const BookProfile& profile, double q, std::optional<double> price = std::nullopt);

// Trapezoidal integral of phi - (-L y) over the grid. Carries an O(h^2 m / D)
// error from the kink at the price while a source is active.
double excess_volume(const BookProfile& profile, const ModelParams& params);

}  // namespace llob
