#pragma once

// Test-only oracles, independent of the library's discretization path:
// series evaluation of Bessel I0, dense quadrature of 1-d integrands, and
// closed forms for the shear-flow cell problem.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracles {

// I_0(z) by its power series
inline double bessel_I0(double z) {
  double term = 1.0, sum = 1.0;
  double q = 0.25 * z * z;
  for (int k = 1; k < 64; ++k) {
    term *= q / (double(k) * double(k));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// trapezoid rule on [0,1) with n panels (exact for smooth periodic integrands
// up to spectral accuracy)
inline double periodic_quadrature(const std::function<double(double)>& f, int n = 8192) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += f(double(i) / n);
  return acc / n;
}

// discrete symbol of the forward-difference Laplacian for mode k at n nodes
inline double laplacian_symbol(int k, int n) {
  double s = 2.0 * n * std::sin(std::numbers::pi * double(k) / double(n));
  return -s * s;
}

// centered-difference wave factor sin(2 pi / n) / (2 pi / n)
inline double sinc_factor(int n) {
  double x = 2.0 * std::numbers::pi / double(n);
  return std::sin(x) / x;
}

// shear-flow cell problem on T^2 with drift b = (0.2 + a sin(2 pi y), 0):
// the discrete solve 1/2 u'' = -a sin(2 pi y) has u = 2 a sin(2 pi y)/s^2
// with s^2 = -laplacian_symbol(1, n), and the Gram correction is
// ||du||^2 = 2 a^2 / s^2.
inline double shear_B11(double a, int n) {
  double s2 = -laplacian_symbol(1, n);
  return 1.0 + 2.0 * a * a / s2;
}

}  // namespace oracles
