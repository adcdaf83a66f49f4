#include "llob/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <boost/version.hpp>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <json.hpp>
#include <thread>

#include "llob/book_pde.hpp"
#include "llob/decomposition.hpp"
#include "llob/error.hpp"
#include "llob/expansion.hpp"
#include "llob/manipulation.hpp"
#include "llob/numerics.hpp"
#include "llob/price_solver.hpp"
#include "llob/relaxation.hpp"
#include "llob/scaling_shape.hpp"

#ifndef LLOB_VERSION
#define LLOB_VERSION "0.0.0"
#endif

namespace llob {

namespace nm = numerics;

std::string_view version() noexcept { return LLOB_VERSION; }

double ExperimentResult::scalar(std::string_view key) const {
  for (const auto& [k, v] : scalars)
    if (k == key) return v;
  fail(ErrorCode::ConfigError, "no scalar named " + std::string(key));
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"stationary", "impact-sweep", "decay",      "bidask",
                                              "book-shape", "reversal",     "decomposition",
                                              "manipulate", "expansion-validity", "cost"};
  return names;
}

namespace {

// Runs body(i) for i in [0, n) on `jobs` threads; the first failure (by index) is rethrown.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<unsigned>(std::min<std::size_t>(std::max(jobs, 1u), n));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < threads; ++j) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string tag(double r) { return "r" + format_number(r); }

std::size_t count(const Config& c, std::string_view key, long min) {
  const long v = c.integer(key);
  if (v < min) fail(ErrorCode::ConfigError, std::string(key) + " must be >= " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

std::vector<double> positive_list(const Config& c, std::string_view key) {
  auto v = c.numbers(key);
  if (v.empty()) fail(ErrorCode::ConfigError, std::string(key) + " is empty");
  for (double x : v)
    if (!(x > 0.0)) fail(ErrorCode::ConfigError, std::string(key) + " entries must be positive");
  return v;
}

double positive(const Config& c, std::string_view key) {
  const double v = c.number(key);
  if (!(v > 0.0)) fail(ErrorCode::ConfigError, std::string(key) + " must be positive");
  return v;
}

struct Context {
  const Config& config;
  ModelParams params;
  unsigned jobs;
  ExperimentResult& out;
};

void stationary(Context& cx) {
  const double W = positive(cx.config, "stationary.width");
  const auto n = count(cx.config, "stationary.points", 2);
  const bool finite_nu = cx.params.nu > 0.0;
  CsvTable t{finite_nu ? std::vector<std::string>{"y", "phi_linear", "phi_stationary"}
                       : std::vector<std::string>{"y", "phi_linear"}, {}};
  for (double y : nm::linspace(-W, W, n)) {
    std::vector<double> row{y, -cx.params.L * y};
    if (finite_nu) row.push_back(stationary_profile(y, cx.params));
    t.add_row(std::move(row));
  }
  cx.out.scalars.emplace_back("L", cx.params.L);
  if (cx.params.gamma) cx.out.scalars.emplace_back("gamma", *cx.params.gamma);
  cx.out.tables.emplace_back("stationary", std::move(t));
}

void impact_sweep(Context& cx) {
  const auto& c = cx.config;
  const auto ratios = nm::logspace(c.number("sweep.log10_min"), c.number("sweep.log10_max"),
                                   count(c, "sweep.points", 2));
  std::vector<double> A(ratios.size());
  parallel_for(ratios.size(), cx.jobs, [&](std::size_t i) { A[i] = solve_A(ratios[i]); });

  CsvTable sweep{{"rate_ratio", "A", "y_ratio"}, {}};
  for (std::size_t i = 0; i < ratios.size(); ++i) sweep.add_row({ratios[i], A[i], A[i] / std::sqrt(ratios[i])});

  // impact against Q at fixed T: the rate is Q / T
  const double T = positive(c, "T");
  const auto& p = cx.params;
  std::vector<double> Q(ratios.size()), I(ratios.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    Q[i] = ratios[i] * p.J * T;
    I[i] = A[i] * std::sqrt(p.D * T);
  }
  CsvTable law{{"Q", "impact", "log_slope"}, {}};
  std::vector<double> slope(Q.size());
  for (std::size_t i = 0; i < Q.size(); ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1, b = i + 1 == Q.size() ? i : i + 1;
    slope[i] = std::log(I[b] / I[a]) / std::log(Q[b] / Q[a]);
    law.add_row({Q[i], I[i], slope[i]});
  }
  cx.out.scalars.emplace_back("y_ratio_at_max_rate", sweep.rows.back()[2]);
  cx.out.scalars.emplace_back("log_slope_small_Q", slope.front());
  cx.out.scalars.emplace_back("log_slope_large_Q", slope.back());
  cx.out.tables.emplace_back("impact-sweep", std::move(sweep));
  cx.out.tables.emplace_back("impact-sweep_Q", std::move(law));
}

void decay(Context& cx) {
  const auto& c = cx.config;
  const auto rates = positive_list(c, "decay.rates");
  const double T = positive(c, "T");
  const double t_max = positive(c, "decay.t_max");
  if (!(t_max > 1.0)) fail(ErrorCode::ConfigError, "decay.t_max must exceed 1");
  const auto n = count(c, "decay.points", 1);
  const auto& p = cx.params;
  std::vector<PricePath> paths(rates.size());
  parallel_for(rates.size(), cx.jobs, [&](std::size_t i) {
    paths[i] = decay_trajectory(rates[i] * p.J, T, t_max * T, p, n);
  });
  std::vector<std::vector<double>> normalized(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double yT = solve_A(rates[i]) * std::sqrt(p.D * T);
    CsvTable t{{"t", "impact_normalized"}, {}};
    t.add_row({T, 1.0});
    for (std::size_t k = 0; k < paths[i].size(); ++k) {
      normalized[i].push_back(paths[i].y[k] / yT);
      t.add_row({paths[i].t[k], normalized[i].back()});
    }
    cx.out.scalars.emplace_back("impact_at_2T_" + tag(rates[i]),
                                nm::interp_linear(paths[i].t, normalized[i], 2.0 * T));
    cx.out.tables.emplace_back("decay_" + tag(rates[i]), std::move(t));
  }
  if (rates.size() >= 2) {
    double sup = 0.0;
    for (std::size_t k = 0; k < normalized[0].size(); ++k)
      sup = std::max(sup, std::abs(normalized[0][k] - normalized[1][k]));
    cx.out.scalars.emplace_back("sup_distance_" + tag(rates[0]) + "_" + tag(rates[1]), sup);
  }
}

TradingSchedule schedule_or_constant(const Config& c, double m0, double T) {
  if (c.is_set("schedule.segments")) return parse_segments(c.text("schedule.segments"));
  return TradingSchedule::constant(m0, T);
}

void bidask(Context& cx) {
  const auto& c = cx.config;
  const double T = positive(c, "T");
  const double frac = positive(c, "bidask.q_fraction");
  const auto n = count(c, "bidask.snapshots", 1);
  const auto pde = pde_config(c);
  const auto N = count(c, "pde.N", 201);
  std::vector<double> rates = c.is_set("schedule.segments") ? std::vector<double>{0.0} : positive_list(c, "bidask.rates");
  const auto& p = cx.params;
  std::vector<CsvTable> tables(rates.size());
  std::vector<double> asym(rates.size());
  parallel_for(rates.size(), cx.jobs, [&](std::size_t i) {
    const auto s = schedule_or_constant(c, rates[i] * p.J, T);
    const double horizon = s.horizon();
    PdeConfig cfg = pde;
    for (std::size_t k = 1; k <= n; ++k) cfg.snapshot_times.push_back(horizon * static_cast<double>(k) / static_cast<double>(n));
    const auto ev = evolve_book(linear_book(default_grid(s, p, N), p), s, p, cfg);
    const double q = frac * std::abs(s.total_volume());
    CsvTable t{{"t", "bid", "price", "ask"}, {}};
    for (const auto& snap : ev.snapshots) {
      const double y = ev.path.at(snap.t);
      const auto ba = bid_ask(snap, q, y);
      t.add_row({snap.t, ba.bid, y, ba.ask});
    }
    const auto& last = t.rows.back();
    asym[i] = (last[3] - last[2]) / (last[2] - last[1]);
    tables[i] = std::move(t);
  });
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const std::string stem = c.is_set("schedule.segments") ? "bidask" : "bidask_" + tag(rates[i]);
    cx.out.scalars.emplace_back("ask_over_bid_gap_at_T" + (c.is_set("schedule.segments") ? "" : "_" + tag(rates[i])), asym[i]);
    cx.out.tables.emplace_back(stem, std::move(tables[i]));
  }
}

void book_shape(Context& cx) {
  const auto& c = cx.config;
  const double T = positive(c, "T");
  const auto rates = positive_list(c, "shape.rates");
  const auto times = positive_list(c, "shape.times");
  const auto pde = pde_config(c);
  const auto N = count(c, "pde.N", 201);
  const auto points = count(c, "shape.points", 2);
  const auto& p = cx.params;
  struct Out {
    CsvTable snapshots, collapse, theory;
    std::vector<double> errors;
  };
  std::vector<Out> outs(rates.size());
  parallel_for(rates.size(), cx.jobs, [&](std::size_t i) {
    const double m0 = rates[i] * p.J;
    const auto s = TradingSchedule::constant(m0, T);
    PdeConfig cfg = pde;
    for (double f : times) cfg.snapshot_times.push_back(f * T);
    const auto ev = evolve_book(linear_book(default_grid(s, p, N), p), s, p, cfg);
    const ScalingShape shape(rates[i]);
    Out o{{{"t", "y", "phi"}, {}}, {{"t", "u", "F_pde", "F_theory"}, {}}, {{"u", "F", "G", "H"}, {}}, {}};
    for (const auto& snap : ev.snapshots) {
      const double scale = m0 * std::sqrt(snap.t / p.D);
      const double width = std::sqrt(p.D * snap.t);
      double err = 0.0, peak = 0.0;
      for (std::size_t k = 0; k < snap.grid.N; ++k) {
        const double y = snap.grid.node(k);
        o.snapshots.add_row({snap.t, y, snap.phi[k]});
        const double u = y / width;
        if (u < -6.0 || u > shape.A() + 10.0) continue;
        const double Fp = (snap.phi[k] + p.L * y) / scale;
        const double Ft = shape.F(u);
        o.collapse.add_row({snap.t, u, Fp, Ft});
        err = std::max(err, std::abs(Fp - Ft));
        peak = std::max(peak, std::abs(Ft));
      }
      o.errors.push_back(err / peak);
    }
    const auto tab = tabulate_shape(rates[i], points);
    for (std::size_t k = 0; k < tab.u.size(); ++k) o.theory.add_row({tab.u[k], tab.F[k], tab.G[k], tab.H[k]});
    outs[i] = std::move(o);
  });
  for (std::size_t i = 0; i < rates.size(); ++i) {
    for (std::size_t k = 0; k < outs[i].errors.size(); ++k)
      cx.out.scalars.emplace_back("collapse_error_" + tag(rates[i]) + "_t" + format_number(times[k] * T),
                                  outs[i].errors[k]);
    const auto sl = slopes_at_price(rates[i]);
    cx.out.scalars.emplace_back("A_" + tag(rates[i]), solve_A(rates[i]));
    cx.out.scalars.emplace_back("slope_minus_" + tag(rates[i]), sl.minus);
    cx.out.scalars.emplace_back("slope_plus_" + tag(rates[i]), sl.plus);
    cx.out.tables.emplace_back("book-shape_" + tag(rates[i]) + "_snapshots", std::move(outs[i].snapshots));
    cx.out.tables.emplace_back("book-shape_" + tag(rates[i]) + "_collapse", std::move(outs[i].collapse));
    cx.out.tables.emplace_back("book-shape_" + tag(rates[i]) + "_theory", std::move(outs[i].theory));
  }
}

void reversal(Context& cx) {
  const auto& c = cx.config;
  const double T = positive(c, "T");
  const double m0 = positive(c, "m0");
  const auto& p = cx.params;
  const auto res = reversal_trajectory(m0, T, p, solver_config(c));
  CsvTable t{{"t", "y"}, {}};
  for (std::size_t k = 0; k < res.path.size(); ++k) t.add_row({res.path.t[k], res.path.y[k]});
  const auto prop = propagator_price(TradingSchedule::buy_then_sell(m0, T), p, res.path.t);
  CsvTable tp{{"t", "y"}, {}};
  for (std::size_t k = 0; k < prop.size(); ++k) tp.add_row({prop.t[k], prop.y[k]});
  cx.out.scalars.emplace_back("return_time", res.return_time);
  cx.out.scalars.emplace_back("return_delay", res.return_time - T);
  cx.out.scalars.emplace_back("return_delay_over_T", (res.return_time - T) / T);
  cx.out.tables.emplace_back("reversal", std::move(t));
  cx.out.tables.emplace_back("reversal_propagator", std::move(tp));
}

void decomposition(Context& cx) {
  const auto& c = cx.config;
  const double T = positive(c, "T");
  const double m0 = positive(c, "m0");
  const double t_max = positive(c, "decomposition.t_max");
  if (!(t_max > 1.0)) fail(ErrorCode::ConfigError, "decomposition.t_max must exceed 1");
  const auto n = count(c, "decomposition.points", 4);
  const InfoKernel kernel{c.number("info.Gamma"), c.number("info.zeta")};
  const auto& mech = c.text("decomposition.mechanical");
  MechanicalModel model;
  if (mech == "full") model = MechanicalModel::Full;
  else if (mech == "propagator") model = MechanicalModel::Propagator;
  else fail(ErrorCode::ConfigError, "decomposition.mechanical: expected full or propagator");
  // a quarter of the points during execution, the rest log-spaced after T
  const std::size_t during = std::max<std::size_t>(n / 4, 2);
  std::vector<double> times = nm::linspace(0.0, T, during);
  for (double x : nm::logspace(-4.0, std::log10(t_max - 1.0), n - during)) times.push_back(T * (1.0 + x));
  const auto s = decomposition_series(kernel, m0, T, times, cx.params, model);
  CsvTable t{{"t", "mechanical", "informational", "total"}, {}};
  for (std::size_t k = 0; k < s.t.size(); ++k) t.add_row({s.t[k], s.mechanical[k], s.informational[k], s.total[k]});
  cx.out.scalars.emplace_back("permanent_level", kernel.Gamma * m0 * T);
  cx.out.scalars.emplace_back("total_at_t_max", s.total.back());
  cx.out.scalars.emplace_back("informational_at_t_max", s.informational.back());
  cx.out.scalars.emplace_back("mechanical_at_t_max", s.mechanical.back());
  cx.out.tables.emplace_back("decomposition", std::move(t));
}

void manipulate(Context& cx) {
  const auto& c = cx.config;
  AuditConfig a;
  a.trials = count(c, "manipulate.trials", 1);
  a.seed = static_cast<std::uint64_t>(c.integer("seed"));
  a.segments_min = static_cast<int>(c.integer("manipulate.segments_min"));
  a.segments_max = static_cast<int>(c.integer("manipulate.segments_max"));
  a.level_bound = c.number("manipulate.level_bound");
  a.horizon = positive(c, "T");
  a.tolerance_factor = c.number("manipulate.tolerance_factor");
  a.solver = solver_config(c);
  a.solver.dt = a.horizon / static_cast<double>(count(c, "manipulate.steps", 10));
  a.jobs = cx.jobs;
  try {
    a.validate();
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, std::string("manipulate: ") + e.what());
  }
  const auto res = random_round_trip_audit(a, cx.params);
  CsvTable t{{"trial", "cost"}, {}};
  for (std::size_t i = 0; i < res.costs.size(); ++i) t.add_row({static_cast<double>(i), res.costs[i]});
  nlohmann::json line{{"trial", res.argmin}, {"cost", res.min_cost},
                      {"schedule", nlohmann::json::parse(schedule_json(res.argmin_schedule))}};

  // kernel identity and positivity on the buy-then-sell round trip
  const double m0 = positive(c, "m0");
  const auto bts = TradingSchedule::buy_then_sell(m0, a.horizon);
  SolverConfig ks = solver_config(c);
  ks.dt = bts.horizon() / static_cast<double>(count(c, "manipulate.kernel_steps", 2));
  const auto path = solve_price_path(bts, cx.params, ks);
  const auto range = eigen_range(kernel_matrix(path, cx.params));
  const double direct = path_cost(bts, path);
  const double via_kernel = kernel_quadratic_cost(bts, path, cx.params);

  cx.out.scalars.emplace_back("min_cost", res.min_cost);
  cx.out.scalars.emplace_back("argmin_trial", static_cast<double>(res.argmin));
  cx.out.scalars.emplace_back("median_abs_cost", res.median_abs_cost);
  cx.out.scalars.emplace_back("tolerance", res.tolerance);
  cx.out.scalars.emplace_back("kernel_eig_min", range.min);
  cx.out.scalars.emplace_back("kernel_eig_max", range.max);
  cx.out.scalars.emplace_back("buy_sell_cost_direct", direct);
  cx.out.scalars.emplace_back("buy_sell_cost_kernel", via_kernel);
  cx.out.tables.emplace_back("manipulate", std::move(t));
  cx.out.documents.emplace_back("manipulate_argmin.jsonl", line.dump() + "\n");
  if (res.breached())
    cx.out.breach = "closed schedule with negative cost beyond tolerance: " + schedule_json(res.argmin_schedule);
}

void expansion_validity(Context& cx) {
  const auto& c = cx.config;
  const double T = positive(c, "T");
  const auto n = count(c, "expansion.points", 2);
  const auto& p = cx.params;
  const bool custom = c.is_set("schedule.segments");
  const std::vector<double> rates = custom ? std::vector<double>{0.0} : positive_list(c, "expansion.rates");
  std::vector<CsvTable> tables(rates.size());
  parallel_for(rates.size(), cx.jobs, [&](std::size_t i) {
    const auto s = schedule_or_constant(c, rates[i] * p.J, T);
    const double horizon = s.horizon();
    const auto times = nm::linspace(horizon / static_cast<double>(n), horizon, n);
    const auto lead = leading_trajectory(s, p, times);
    const auto first = first_order_trajectory(s, p, times);
    std::vector<double> full(times.size());
    if (custom) {
      const auto path = solve_price_path(s, p, solver_config(c));
      for (std::size_t k = 0; k < times.size(); ++k) full[k] = path.at(times[k]);
    } else {
      // the constant-rate problem is solved exactly by A sqrt(D t)
      const double A = solve_A(rates[i]);
      for (std::size_t k = 0; k < times.size(); ++k) full[k] = A * std::sqrt(p.D * times[k]);
    }
    CsvTable t{{"t", "y_leading", "y_first_order", "y_full", "gap1", "gap2"}, {}};
    for (std::size_t k = 0; k < times.size(); ++k)
      t.add_row({times[k], lead.y[k], first.y[k], full[k], std::abs(full[k] - lead.y[k]),
                 std::abs(full[k] - first.y[k])});
    tables[i] = std::move(t);
  });
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const std::string suffix = custom ? "" : "_" + tag(rates[i]);
    const auto& last = tables[i].rows.back();
    cx.out.scalars.emplace_back("gap1_rel_at_T" + suffix, last[4] / last[3]);
    cx.out.scalars.emplace_back("gap2_rel_at_T" + suffix, last[5] / last[3]);
    cx.out.tables.emplace_back("expansion-validity" + suffix, std::move(tables[i]));
  }
}

// Buy programs with mean rate M over [0, T] sharing Q = M T.
std::vector<TradingSchedule> equal_volume_family(double M, double T) {
  std::vector<TradingSchedule> f;
  f.push_back(TradingSchedule::constant(M, T));
  f.emplace_back(std::vector<ScheduleSegment>{{0.0, T, {0.5 * M, M / T}}});
  f.emplace_back(std::vector<ScheduleSegment>{{0.0, T, {1.5 * M, -M / T}}});
  const double br[] = {0.0, 0.5 * T, T};
  const double lv[] = {0.5 * M, 1.5 * M};
  f.push_back(TradingSchedule::piecewise_constant(br, lv));
  f.emplace_back(std::vector<ScheduleSegment>{{0.0, T, {0.75 * M, 0.0, 0.75 * M / (T * T)}}});
  return f;
}

void cost(Context& cx) {
  const auto& c = cx.config;
  const double T = positive(c, "T");
  const auto& p = cx.params;
  const double M = positive(c, "cost.rate") * p.J;
  const auto family = equal_volume_family(M, T);
  const SolverConfig solver = solver_config(c);
  std::vector<std::vector<double>> rows(family.size());
  parallel_for(family.size(), cx.jobs, [&](std::size_t i) {
    const auto& s = family[i];
    const double full = path_cost(s, solve_price_path(s, p, solver));
    rows[i] = {static_cast<double>(i), execution_cost(s, p, 0), execution_cost(s, p, 1),
               execution_cost_closed_form(s.total_volume(), T, p, 1), full};
  });
  CsvTable t{{"schedule", "cost_order0", "cost_order1", "closed_form_order1", "cost_full"}, {}};
  double lo = rows[0][2], hi = rows[0][2];
  for (auto& r : rows) {
    lo = std::min(lo, r[2]);
    hi = std::max(hi, r[2]);
    t.add_row(std::move(r));
  }
  cx.out.scalars.emplace_back("order1_spread_rel", (hi - lo) / t.rows[0][3]);
  cx.out.scalars.emplace_back("closed_form_order0", execution_cost_closed_form(M * T, T, p, 0));
  cx.out.scalars.emplace_back("closed_form_order1", t.rows[0][3]);
  cx.out.tables.emplace_back("cost", std::move(t));
}

}  // namespace

ExperimentResult run(std::string_view name, const Config& config, unsigned jobs) {
  using Fn = void (*)(Context&);
  static const std::vector<std::pair<std::string_view, Fn>> table{
      {"stationary", stationary}, {"impact-sweep", impact_sweep},   {"decay", decay},
      {"bidask", bidask},         {"book-shape", book_shape},       {"reversal", reversal},
      {"decomposition", decomposition}, {"manipulate", manipulate}, {"expansion-validity", expansion_validity},
      {"cost", cost}};
  const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == name; });
  if (it == table.end()) fail(ErrorCode::UnknownExperiment, "unknown experiment: " + std::string(name));

  ExperimentResult out;
  out.name = std::string(name);
  for (const auto& [k, v] : config.values()) out.config.emplace_back(k, v);
  const auto start = std::chrono::steady_clock::now();
  Context cx{config, model_params(config), std::max(jobs, 1u), out};
  it->second(cx);
  out.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<std::filesystem::path> emit(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& [stem, table] : result.tables) {
    const auto path = dir / (stem + ".csv");
    write_csv(table, path);
    written.push_back(path);
    files.push_back(path.filename().string());
  }
  for (const auto& [file, text] : result.documents) {
    const auto path = dir / file;
    write_text(text, path);
    written.push_back(path);
    files.push_back(file);
  }
  nlohmann::ordered_json m;
  m["experiment"] = result.name;
  m["versions"] = {{"llob", std::string(version())},
                   {"boost", BOOST_LIB_VERSION},
                   {"compiler", __VERSION__}};
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : result.config) cfg[k] = v;
  m["config"] = cfg;
  nlohmann::ordered_json sc = nlohmann::ordered_json::object();
  for (const auto& [k, v] : result.scalars) sc[k] = v;
  m["scalars"] = sc;
  m["files"] = files;
  m["runtime_seconds"] = result.runtime_seconds;
  if (result.breach) m["breach"] = *result.breach;
  const auto path = dir / (result.name + "_manifest.json");
  write_text(m.dump(2) + "\n", path);
  written.push_back(path);
  return written;
}

}  // namespace llob
