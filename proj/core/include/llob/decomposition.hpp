#pragma once

#include <span>
#include <vector>

#include "llob/model.hpp"

namespace llob {

// Correlation between order flow and future drift, C(tau) = Gamma zeta exp(-zeta tau).
struct InfoKernel {
  double Gamma = 0.0;  // price / volume
  double zeta = 1.0;   // 1 / time

  void validate() const;
  [[nodiscard]] double operator()(double tau) const;
};

// m0 int_0^t ds int_0^s ds' C(s - s') for t <= T; past T the drift keeps its
// value at T plus the relaxing tail, Gamma Q - (m0 Gamma / zeta)(1 - e^{-zeta T}) e^{-zeta (t - T)}.
double informational_component(const InfoKernel& kernel, double m0, double T, double t);

enum class MechanicalModel {
  Full,        // non-linear amplitude and relaxation
  Propagator,  // linear limit, A = m0 / (J sqrt(pi))
};

struct DecompositionSeries {
  std::vector<double> t;
  std::vector<double> mechanical;
  std::vector<double> informational;
  std::vector<double> total;
};

// Constant-rate buy of m0 over [0, T], observed on `times` (any t >= 0).
DecompositionSeries decomposition_series(const InfoKernel& kernel, double m0, double T,
                                         std::span<const double> times, const ModelParams& params,
                                         MechanicalModel model = MechanicalModel::Full);

// Mechanical decay plus the informational part, for t > T.
double total_impact_after(const InfoKernel& kernel, double m0, double T, double t,
                          const ModelParams& params, MechanicalModel model = MechanicalModel::Full);

}  // namespace llob
