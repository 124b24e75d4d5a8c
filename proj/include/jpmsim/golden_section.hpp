#pragma once

#include <cmath>
#include <stdexcept>

namespace jpmsim {

struct ScalarOptimum {
  double x = 0.0;
  double value = 0.0;
  int iterations = 0;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
/// Stops when the bracket is narrower than abs_tol + rel_tol * |x|.
template <class F>
ScalarOptimum golden_section_maximize(F&& f, double lo, double hi, double abs_tol = 1e-12,
                                      double rel_tol = 1e-10, int max_iterations = 500) {
  if (!(hi > lo)) throw std::invalid_argument("golden_section_maximize: empty bracket");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int it = 0;
  for (; it < max_iterations; ++it) {
    const double mid = 0.5 * (a + b);
    if (b - a <= abs_tol + rel_tol * std::abs(mid)) break;
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  ScalarOptimum best;
  best.iterations = it;
  if (fc >= fd) {
    best.x = c;
    best.value = fc;
  } else {
    best.x = d;
    best.value = fd;
  }
  return best;
}

}  // namespace jpmsim
