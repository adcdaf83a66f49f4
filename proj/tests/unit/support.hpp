#pragma once

#include <cmath>
#include <functional>

#include "doctest.h"
#include "llob/error.hpp"

namespace test {

// Runs f and reports which error code it threw, if any.
inline bool throws_code(const std::function<void()>& f, llob::ErrorCode code) {
  try {
    f();
  } catch (const llob::Error& e) {
    return e.code() == code;
  }
  return false;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Composite trapezoid on n intervals.
template <class F>
double trapezoid(F f, double a, double b, long n) {
  const double h = (b - a) / static_cast<double>(n);
  double s = 0.5 * (f(a) + f(b));
  for (long i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i));
  return s * h;
}

}  // namespace test

#define CHECK_THROWS_CODE(expr, code) CHECK(test::throws_code([&] { (void)(expr); }, code))
