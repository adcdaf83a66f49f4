#include "llob/model.hpp"

#include <cmath>
#include <string>

#include "llob/error.hpp"

namespace llob {

namespace {

void require_positive(const std::optional<double>& v, const char* name) {
  if (v && !(*v > 0.0 && std::isfinite(*v)))
    fail(ErrorCode::NonPositiveParameter, std::string(name) + " must be positive");
}

void require_non_negative(const std::optional<double>& v, const char* name) {
  if (v && !(*v >= 0.0 && std::isfinite(*v)))
    fail(ErrorCode::NonPositiveParameter, std::string(name) + " must be non-negative");
}

struct Moments {
  double mean;
  double variance;
};

Moments moments_of(const BetaDistributionSpec& spec) {
  if (const auto* m = std::get_if<BetaMoments>(&spec.distribution)) {
    const double var = m->second_moment - m->mean * m->mean;
    if (!std::isfinite(var) || var < -1e-12 * std::max(1.0, m->second_moment))
      fail(ErrorCode::InvalidDistribution, "second moment below squared mean");
    return {m->mean, std::max(var, 0.0)};
  }
  const auto& atoms = std::get<BetaMixture>(spec.distribution).atoms;
  if (atoms.empty()) fail(ErrorCode::InvalidDistribution, "empty mixture");
  double wsum = 0.0;
  for (const auto& [b, w] : atoms) {
    if (!(w >= 0.0) || !std::isfinite(b)) fail(ErrorCode::InvalidDistribution, "negative weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12) fail(ErrorCode::InvalidDistribution, "weights must sum to 1");
  double mean = 0.0;
  for (const auto& [b, w] : atoms) mean += w * b;
  double var = 0.0;
  for (const auto& [b, w] : atoms) var += w * (b - mean) * (b - mean);
  return {mean, var};
}

}  // namespace

double effective_diffusion(const BetaDistributionSpec& spec) {
  if (!(spec.D0 >= 0.0) || !std::isfinite(spec.sigma))
    fail(ErrorCode::InvalidDistribution, "D0 must be non-negative and sigma finite");
  const auto m = moments_of(spec);
  return spec.D0 + 0.5 * spec.sigma * spec.sigma * m.variance;
}

ModelParams validate_and_derive(const RawParams& raw) {
  if (raw.D && raw.beta)
    fail(ErrorCode::ConfigError, "give either D or a beta distribution, not both");
  require_positive(raw.D, "D");
  require_positive(raw.J, "J");
  require_non_negative(raw.nu, "nu");
  require_non_negative(raw.lam, "lam");

  ModelParams p;
  if (raw.D) {
    p.D = *raw.D;
  } else if (raw.beta) {
    p.D = effective_diffusion(*raw.beta);
    if (!(p.D > 0.0)) fail(ErrorCode::NonPositiveParameter, "effective diffusivity is zero");
  } else {
    fail(ErrorCode::NonPositiveParameter, "D is required");
  }

  p.nu = raw.nu.value_or(0.0);
  p.lam = raw.lam.value_or(0.0);
  if (p.nu > 0.0) {
    const double gamma = std::sqrt(p.nu / p.D);
    p.gamma = gamma;
    if (raw.lam && p.lam == 0.0)
      fail(ErrorCode::NonPositiveParameter, "lam must be positive when nu > 0");
    if (raw.J && raw.lam) {
      const double j_from = p.lam / gamma;
      if (std::abs(*raw.J - j_from) / *raw.J > 1e-12)
        fail(ErrorCode::InconsistentCurrent, "J differs from lam/gamma");
      p.J = *raw.J;
    } else if (raw.J) {
      p.J = *raw.J;
      p.lam = p.J * gamma;
    } else if (raw.lam) {
      p.J = p.lam / gamma;
    } else {
      fail(ErrorCode::NonPositiveParameter, "need J or lam");
    }
  } else {
    if (!raw.J) fail(ErrorCode::NonPositiveParameter, "J is required when nu = 0");
    p.J = *raw.J;
  }
  p.L = p.J / p.D;
  return p;
}

Scales scales_for(const ModelParams& params) {
  const double sd = std::sqrt(params.D);
  return {sd, params.J, params.J / sd};
}

Nondimensional nondimensionalize(const ModelParams& params, const TradingSchedule& schedule) {
  const auto s = scales_for(params);
  ModelParams p;
  p.D = 1.0;
  p.J = 1.0;
  p.L = 1.0;
  p.nu = params.nu;
  p.lam = params.lam * s.price / s.volume;
  if (params.gamma) p.gamma = *params.gamma * s.price;
  return {p, schedule.scaled(1.0 / s.volume), s};
}

std::pair<ModelParams, TradingSchedule> denondimensionalize(const Nondimensional& nd) {
  const auto& s = nd.scales;
  ModelParams p;
  p.D = s.price * s.price;
  p.J = s.volume;
  p.L = p.J / p.D;
  p.nu = nd.params.nu;
  p.lam = nd.params.lam * s.volume / s.price;
  if (nd.params.gamma) p.gamma = *nd.params.gamma / s.price;
  return {p, nd.schedule.scaled(s.volume)};
}

}  // namespace llob
