#include "llob/decomposition.hpp"

#include <cmath>

#include "llob/error.hpp"
#include "llob/numerics.hpp"
#include "llob/price_solver.hpp"
#include "llob/relaxation.hpp"

namespace llob {

void InfoKernel::validate() const {
  if (!(Gamma >= 0.0)) fail(ErrorCode::NonPositiveParameter, "Gamma must be >= 0");
  if (!(zeta > 0.0)) fail(ErrorCode::NonPositiveParameter, "zeta must be > 0");
}

double InfoKernel::operator()(double tau) const { return Gamma * zeta * std::exp(-zeta * tau); }

double informational_component(const InfoKernel& kernel, double m0, double T, double t) {
  kernel.validate();
  if (!(T > 0.0) || t < 0.0) fail(ErrorCode::ParameterOutOfRange, "need T > 0 and t >= 0");
  const double z = kernel.zeta;
  if (t <= T) return m0 * kernel.Gamma * (t + std::expm1(-z * t) / z);
  return kernel.Gamma * m0 * T + m0 * kernel.Gamma / z * std::expm1(-z * T) * std::exp(-z * (t - T));
}

namespace {

double amplitude(double m0, const ModelParams& params, MechanicalModel model) {
  const double r = m0 / params.J;
  if (model == MechanicalModel::Propagator) return r * numerics::kInvSqrtPi;
  return (r < 0.0 ? -1.0 : 1.0) * (r == 0.0 ? 0.0 : solve_A(std::abs(r)));
}

}  // namespace

DecompositionSeries decomposition_series(const InfoKernel& kernel, double m0, double T,
                                         std::span<const double> times, const ModelParams& params,
                                         MechanicalModel model) {
  kernel.validate();
  if (!(T > 0.0)) fail(ErrorCode::NonPositiveParameter, "T must be > 0");
  const double A = amplitude(m0, params, model);
  const double sqrtD = std::sqrt(params.D);

  DecompositionSeries out;
  std::vector<double> after;
  for (double t : times) {
    if (t < 0.0) fail(ErrorCode::ParameterOutOfRange, "times must be >= 0");
    if (t > T) after.push_back(t);
  }
  std::vector<double> decay(after.size());
  if (!after.empty()) {
    if (model == MechanicalModel::Full && m0 != 0.0) {
      const PricePath p = decay_trajectory(std::abs(m0), T, after, params);
      for (std::size_t i = 0; i < after.size(); ++i) decay[i] = (m0 < 0.0 ? -1.0 : 1.0) * p.y[i];
    } else {
      for (std::size_t i = 0; i < after.size(); ++i)
        decay[i] = A * sqrtD * (std::sqrt(after[i]) - std::sqrt(after[i] - T));
    }
  }
  std::size_t j = 0;
  for (double t : times) {
    const double mech = t <= T ? A * std::sqrt(params.D * t) : decay[j++];
    const double info = informational_component(kernel, m0, T, t);
    out.t.push_back(t);
    out.mechanical.push_back(mech);
    out.informational.push_back(info);
    out.total.push_back(mech + info);
  }
  return out;
}

double total_impact_after(const InfoKernel& kernel, double m0, double T, double t,
                          const ModelParams& params, MechanicalModel model) {
  if (!(t > T)) fail(ErrorCode::ParameterOutOfRange, "total_impact_after needs t > T");
  const double ts[] = {t};
  return decomposition_series(kernel, m0, T, ts, params, model).total.front();
}

}  // namespace llob
