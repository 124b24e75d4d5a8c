#pragma once

// Independent reference computations used only by tests. None of these call
// into the library's solvers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

/// Roots of f on [lo, hi] from a uniform scan with the given step, each sign
/// change refined by plain bisection.
template <class F>
std::vector<double> dense_scan_roots(F&& f, double lo, double hi, double step) {
  std::vector<double> roots;
  const auto n = static_cast<long>(std::ceil((hi - lo) / step));
  double a = lo;
  double fa = f(a);
  for (long k = 1; k <= n; ++k) {
    const double b = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n);
    const double fb = f(b);
    if ((fa < 0.0) != (fb < 0.0)) {
      double x0 = a, x1 = b, f0 = fa;
      for (int i = 0; i < 200 && x1 - x0 > 1e-14; ++i) {
        const double m = 0.5 * (x0 + x1);
        const double fm = f(m);
        if ((fm < 0.0) == (f0 < 0.0)) {
          x0 = m;
          f0 = fm;
        } else {
          x1 = m;
        }
      }
      roots.push_back(0.5 * (x0 + x1));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

struct GridMax {
  double x = 0.0;
  double value = -1e300;
};

/// Maximum of f on [lo, hi]: n-point grid, then an n-point grid over the
/// two cells around the best coarse point.
template <class F>
GridMax two_level_grid_max(F&& f, double lo, double hi, int n = 20000) {
  GridMax best;
  auto scan = [&](double a, double b) {
    GridMax m;
    for (int k = 0; k <= n; ++k) {
      const double x = a + (b - a) * k / n;
      const double v = f(x);
      if (v > m.value) {
        m.value = v;
        m.x = x;
      }
    }
    return m;
  };
  best = scan(lo, hi);
  const double h = (hi - lo) / n;
  GridMax fine = scan(std::max(lo, best.x - h), std::min(hi, best.x + h));
  return fine.value > best.value ? fine : best;
}

using cplx = std::complex<double>;
struct Mat2 {
  cplx a, b, c, d;  // [[a, b], [c, d]]
};

inline Mat2 mul(const Mat2& x, const Mat2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
          x.c * y.b + x.d * y.d};
}

inline Mat2 dagger(const Mat2& x) {
  return {std::conj(x.a), std::conj(x.c), std::conj(x.b), std::conj(x.d)};
}

/// Tr(R rho R^dag |1><1|) with R = exp[(i pi/2)(t/t_pi)(sx cos th + sy sin th)],
/// built from the matrix exponential of a Pauli combination, rho from
/// (beta, r, phi) as [[1-beta, r e^{i phi}], [r e^{-i phi}, beta]].
inline double occupation_by_matrices(double beta, double r, double phi, double theta, double t,
                                     double t_pi) {
  const double half = M_PI / 2.0 * t / t_pi;
  const cplx i(0.0, 1.0);
  // n.sigma = [[0, cos th - i sin th], [cos th + i sin th, 0]]; (n.sigma)^2 = I.
  const cplx off_up = std::cos(theta) - i * std::sin(theta);
  const cplx off_dn = std::cos(theta) + i * std::sin(theta);
  const Mat2 rot{std::cos(half), i * std::sin(half) * off_up, i * std::sin(half) * off_dn,
                 std::cos(half)};
  const Mat2 rho{1.0 - beta, std::polar(r, phi), std::polar(r, -phi), beta};
  const Mat2 out = mul(mul(rot, rho), dagger(rot));
  return out.d.real();
}

/// Peak sidelobe level in dB of a window, from a zero-padded DFT evaluated
/// directly (no FFT). The main lobe ends at the first local minimum.
inline double peak_sidelobe_db(const std::vector<double>& w, int padded = 8192) {
  std::vector<double> mag(padded / 2);
  for (int k = 0; k < padded / 2; ++k) {
    cplx acc = 0.0;
    for (std::size_t n = 0; n < w.size(); ++n) {
      acc += w[n] * std::polar(1.0, -2.0 * M_PI * k * static_cast<double>(n) / padded);
    }
    mag[k] = std::abs(acc);
  }
  std::size_t edge = 1;
  while (edge + 1 < mag.size() && mag[edge + 1] <= mag[edge]) ++edge;
  const double side = *std::max_element(mag.begin() + static_cast<long>(edge), mag.end());
  return 20.0 * std::log10(side / mag[0]);
}

}  // namespace oracle
