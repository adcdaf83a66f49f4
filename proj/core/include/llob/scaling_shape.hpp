#pragma once

#include <vector>

namespace llob {

// Self-similar book during constant-rate buying at rate m0:
//   phi(x, t) - phi_st(x) = m0 sqrt(t/D) F(x / sqrt(D t)),
// with the price at u = A. Quantities below are in units of the rate ratio r = m0/J.
class ScalingShape {
 public:
  explicit ScalingShape(double rate_ratio);
  ScalingShape(double rate_ratio, double A);

  [[nodiscard]] double rate_ratio() const noexcept { return r_; }
  [[nodiscard]] double A() const noexcept { return A_; }
  [[nodiscard]] double F0() const noexcept { return F0_; }

  // Valid for all real u; negative u is the smooth continuation (the bid side).
  [[nodiscard]] double F(double u) const;
  [[nodiscard]] double G(double u) const;  // F / u
  [[nodiscard]] double H(double u) const;  // G'
  [[nodiscard]] double dF(double u) const;  // one-sided limits at A resolve to the A+ branch

  // F(u) - u/r: the full book in the same units, computed without cancellation.
  [[nodiscard]] double full_book(double u) const;

  [[nodiscard]] double slope_minus() const;  // F'(A-)
  [[nodiscard]] double slope_plus() const;   // F'(A+)

 private:
  double r_;
  double A_;
  double F0_;
  double c_;      // F0 exp(-A^2/4) + A
};

struct ScalingSolution {
  double rate_ratio = 0.0;
  double A = 0.0;
  double F0 = 0.0;
  double slope_minus = 0.0;
  double slope_plus = 0.0;
  std::vector<double> u, F, G, H;
};

double shape_F(double u, double rate_ratio);
double shape_F0(double rate_ratio);

// n points on (0, A + 10], clustered around u = A.
ScalingSolution tabulate_shape(double rate_ratio, std::size_t n = 4001);

struct PriceSlopes {
  double minus;
  double plus;
};
PriceSlopes slopes_at_price(double rate_ratio);

// Root z* > 0 of the initial-relaxation condition; equals A.
double initial_relaxation_root(double rate_ratio);

}  // namespace llob
