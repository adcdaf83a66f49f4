#include "llob/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "llob/error.hpp"

namespace llob {

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys{
      {"D", "1", "diffusivity of reservation prices (price^2/time); excludes beta.*"},
      {"J", "1", "transaction current (volume/time)"},
      {"nu", "0", "cancellation rate (1/time); 0 is the linear-book limit"},
      {"lam", "", "deposition intensity; derived from J when empty and nu > 0"},
      {"beta.atoms", "", "agent sensitivities as beta:weight,beta:weight,..."},
      {"beta.mean", "", "mean of beta (moment form)"},
      {"beta.second_moment", "", "E[beta^2] (moment form)"},
      {"beta.sigma", "0", "news volatility (price/sqrt(time))"},
      {"beta.D0", "0", "idiosyncratic diffusivity"},
      {"m0", "1", "constant trading rate (volume/time)"},
      {"T", "1", "execution horizon (time)"},
      {"schedule.segments", "", "explicit schedule t0:t1:c0,c1;... (bidask, book-shape, expansion-validity)"},
      {"seed", "42", "random seed"},
      {"solver.dt", "0", "marching step; 0 means horizon/2000"},
      {"solver.tolerance", "1e-10", "relative fixed-point tolerance"},
      {"solver.max_iterations", "200", "iterations per step"},
      {"solver.quad_nodes", "64", "Gauss points on the latest interval"},
      {"solver.damping", "0.5", "Picard damping"},
      {"pde.N", "2001", "grid nodes (odd)"},
      {"pde.dt", "0", "PDE step; 0 means horizon/2000"},
      {"pde.placement", "path", "source placement: path, start, end, midpoint"},
      {"pde.near_field_fraction", "0.015625", "deposit age, as a fraction of the run, before it moves onto the grid; 0 = two-node split"},
      {"pde.interpolation", "linear", "zero crossing for the two-node split: linear or kink"},
      {"stationary.width", "5", "half-width of the profile table (price)"},
      {"stationary.points", "401", "rows in the profile table"},
      {"sweep.log10_min", "-3", "smallest log10(m0/J)"},
      {"sweep.log10_max", "3", "largest log10(m0/J)"},
      {"sweep.points", "61", "sweep size"},
      {"decay.rates", "0.1,1,10,100", "m0/J values, one CSV each"},
      {"decay.t_max", "100", "last time in units of T"},
      {"decay.points", "200", "points after T"},
      {"bidask.rates", "1,10,100", "m0/J values"},
      {"bidask.q_fraction", "1e-3", "q as a fraction of Q = m0 T"},
      {"bidask.snapshots", "100", "sampled times in (0, T]"},
      {"shape.rates", "1,10", "m0/J values"},
      {"shape.times", "0.01,0.1,1", "snapshot times in units of T"},
      {"shape.points", "4001", "rows of the closed-form table"},
      {"info.Gamma", "0.1", "permanent impact coefficient (price/volume)"},
      {"info.zeta", "1", "correlation decay rate (1/time)"},
      {"decomposition.mechanical", "full", "full or propagator"},
      {"decomposition.t_max", "100", "last time in units of T"},
      {"decomposition.points", "400", "output points"},
      {"manipulate.trials", "1000", "random closed schedules"},
      {"manipulate.segments_min", "2", "fewest pieces per schedule"},
      {"manipulate.segments_max", "12", "most pieces per schedule"},
      {"manipulate.level_bound", "5", "levels uniform in [-bound J, bound J]"},
      {"manipulate.steps", "400", "marching steps per schedule"},
      {"manipulate.kernel_steps", "100", "steps of the kernel-matrix check"},
      {"manipulate.tolerance_factor", "1e-3", "breach below -factor * median |C|"},
      {"expansion.rates", "100,1000,10000", "m0/J values"},
      {"expansion.points", "101", "times per rate"},
      {"cost.rate", "100", "mean m/J of the equal-(Q, T) schedule family"},
  };
  return keys;
}

Config::Config() {
  for (const auto& k : config_keys()) {
    values_[k.name] = k.default_value;
    explicit_[k.name] = false;
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

void Config::load_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::ConfigError, "cannot read config file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  load_text(ss.str(), path.string());
}

void Config::load_text(std::string_view text, std::string_view origin) {
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(ErrorCode::ConfigError,
           std::string(origin) + ":" + std::to_string(line_no) + ": expected key = value");
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void Config::set(std::string_view key, std::string_view value) {
  const auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorCode::ConfigError, "unknown key: " + std::string(key));
  it->second = std::string(trim(value));
  explicit_.find(key)->second = true;
}

void Config::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    fail(ErrorCode::ConfigError, "expected key=value, got: " + std::string(assignment));
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

bool Config::is_set(std::string_view key) const {
  const auto it = explicit_.find(key);
  if (it == explicit_.end()) fail(ErrorCode::ConfigError, "unknown key: " + std::string(key));
  return it->second;
}

const std::string& Config::text(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorCode::ConfigError, "unknown key: " + std::string(key));
  return it->second;
}

double parse_number(std::string_view text, std::string_view what) {
  text = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
    fail(ErrorCode::ConfigError, std::string(what) + ": not a number: '" + std::string(text) + "'");
  return v;
}

double Config::number(std::string_view key) const { return parse_number(text(key), key); }

long Config::integer(std::string_view key) const {
  const double v = number(key);
  if (v != std::floor(v) || std::abs(v) > 1e15)
    fail(ErrorCode::ConfigError, std::string(key) + ": expected an integer");
  return static_cast<long>(v);
}

std::vector<double> Config::numbers(std::string_view key) const {
  std::vector<double> out;
  const auto& t = text(key);
  if (trim(t).empty()) return out;
  for (auto part : split(t, ',')) out.push_back(parse_number(part, key));
  return out;
}

TradingSchedule parse_segments(std::string_view text) {
  std::vector<ScheduleSegment> segs;
  for (auto piece : split(text, ';')) {
    if (piece.empty()) continue;
    const auto fields = split(piece, ':');
    if (fields.size() != 3)
      fail(ErrorCode::ConfigError, "schedule.segments: expected t0:t1:c0,c1,... in '" + std::string(piece) + "'");
    ScheduleSegment s;
    s.t0 = parse_number(fields[0], "schedule.segments");
    s.t1 = parse_number(fields[1], "schedule.segments");
    for (auto c : split(fields[2], ',')) s.coeffs.push_back(parse_number(c, "schedule.segments"));
    segs.push_back(std::move(s));
  }
  if (segs.empty()) fail(ErrorCode::ConfigError, "schedule.segments is empty");
  try {
    return TradingSchedule(std::move(segs));
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, std::string("schedule.segments: ") + e.what());
  }
}

ModelParams model_params(const Config& c) {
  RawParams raw;
  const bool beta = c.is_set("beta.atoms") || c.is_set("beta.mean") || c.is_set("beta.second_moment") ||
                    c.is_set("beta.sigma") || c.is_set("beta.D0");
  if (!beta || c.is_set("D")) raw.D = c.number("D");
  if (beta) {
    BetaDistributionSpec spec;
    spec.sigma = c.number("beta.sigma");
    spec.D0 = c.number("beta.D0");
    if (c.is_set("beta.atoms")) {
      if (c.is_set("beta.mean") || c.is_set("beta.second_moment"))
        fail(ErrorCode::ConfigError, "beta.atoms excludes beta.mean and beta.second_moment");
      BetaMixture mix;
      for (auto atom : split(c.text("beta.atoms"), ',')) {
        const auto bw = split(atom, ':');
        if (bw.size() != 2) fail(ErrorCode::ConfigError, "beta.atoms: expected beta:weight pairs");
        mix.atoms.emplace_back(parse_number(bw[0], "beta.atoms"), parse_number(bw[1], "beta.atoms"));
      }
      spec.distribution = mix;
    } else {
      BetaMoments m;
      if (c.is_set("beta.mean")) m.mean = c.number("beta.mean");
      m.second_moment = c.is_set("beta.second_moment") ? c.number("beta.second_moment") : m.mean * m.mean;
      spec.distribution = m;
    }
    raw.beta = spec;
  }
  raw.nu = c.number("nu");
  if (c.is_set("lam")) raw.lam = c.number("lam");
  if (!c.is_set("lam") || c.is_set("J")) raw.J = c.number("J");
  return validate_and_derive(raw);
}

SolverConfig solver_config(const Config& c) {
  SolverConfig s;
  s.dt = c.number("solver.dt");
  s.tolerance = c.number("solver.tolerance");
  s.max_iterations = static_cast<int>(c.integer("solver.max_iterations"));
  s.quad_nodes = static_cast<int>(c.integer("solver.quad_nodes"));
  s.damping = c.number("solver.damping");
  try {
    s.validate();
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, std::string("solver: ") + e.what());
  }
  return s;
}

PdeConfig pde_config(const Config& c) {
  PdeConfig p;
  p.dt = c.number("pde.dt");
  if (p.dt < 0.0) fail(ErrorCode::ConfigError, "pde.dt must be >= 0");
  const auto& placement = c.text("pde.placement");
  if (placement == "path") p.placement = SourcePlacement::Path;
  else if (placement == "start") p.placement = SourcePlacement::StartOfStep;
  else if (placement == "end") p.placement = SourcePlacement::EndOfStepIterated;
  else if (placement == "midpoint") p.placement = SourcePlacement::Midpoint;
  else fail(ErrorCode::ConfigError, "pde.placement: expected path, start, end or midpoint");
  const auto& interp = c.text("pde.interpolation");
  if (interp == "linear") p.interpolation = ZeroInterpolation::Linear;
  else if (interp == "kink") p.interpolation = ZeroInterpolation::KinkAware;
  else fail(ErrorCode::ConfigError, "pde.interpolation: expected linear or kink");
  p.near_field_fraction = c.number("pde.near_field_fraction");
  if (!(p.near_field_fraction >= 0.0 && p.near_field_fraction <= 1.0))
    fail(ErrorCode::ConfigError, "pde.near_field_fraction must lie in [0, 1]");
  return p;
}

}  // namespace llob
