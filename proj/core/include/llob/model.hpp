#pragma once

#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "llob/schedule.hpp"

namespace llob {

struct ModelParams {
  double D = 1.0;    // price^2 / time
  double J = 1.0;    // volume / time
  double nu = 0.0;   // 1 / time
  double lam = 0.0;  // volume / (price time)
  double L = 1.0;    // J / D
  std::optional<double> gamma;  // sqrt(nu / D), absent in the pure linear-book limit

  bool operator==(const ModelParams&) const = default;
};

struct BetaMoments {
  double mean = 1.0;
  double second_moment = 1.0;  // E[beta^2]
};

struct BetaMixture {
  std::vector<std::pair<double, double>> atoms;  // (beta_i, weight_i)
};

struct BetaDistributionSpec {
  std::variant<BetaMoments, BetaMixture> distribution = BetaMoments{};
  double sigma = 0.0;  // news volatility, price / sqrt(time)
  double D0 = 0.0;     // idiosyncratic diffusivity
};

// Inputs as they come from a config file: any subset, checked by validate_and_derive.
// D and beta are mutually exclusive sources for the diffusivity.
struct RawParams {
  std::optional<double> D;
  std::optional<double> J;
  std::optional<double> nu;
  std::optional<double> lam;
  std::optional<BetaDistributionSpec> beta;
};

ModelParams validate_and_derive(const RawParams& raw);

// D0 + sigma^2/2 * Var(beta). Only the dispersion of beta matters.
double effective_diffusion(const BetaDistributionSpec& spec);

// Units used by the solvers: D = 1, J = 1, time unchanged.
struct Scales {
  double price = 1.0;   // sqrt(D)
  double volume = 1.0;  // J; rates scale by J, cumulative volumes by J too
  double book = 1.0;    // J / sqrt(D), scale of phi
};

struct Nondimensional {
  ModelParams params;
  TradingSchedule schedule;
  Scales scales;
};

Scales scales_for(const ModelParams& params);
Nondimensional nondimensionalize(const ModelParams& params, const TradingSchedule& schedule);
std::pair<ModelParams, TradingSchedule> denondimensionalize(const Nondimensional& nd);

}  // namespace llob
