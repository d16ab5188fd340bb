#pragma once

// Test-only oracles, deliberately independent of the library implementations:
//  - Spouge-series gamma in extended precision, for checking the Lanczos path.
//  - Adaptive Simpson quadrature, for checking closed-form transforms.

#include <cmath>
#include <complex>
#include <functional>

namespace oracle {

using CL = std::complex<long double>;

inline CL spouge_gamma_shifted(CL z) {
  // Gamma(z + 1), Re z >= 0; a = 26 pushes the series error below
  // long-double epsilon.
  constexpr int a = 26;
  const long double sqrt2pi = 2.506628274631000502415765284811045L;
  CL acc = sqrt2pi;
  long double factorial = 1.0L;  // (k-1)!
  for (int k = 1; k < a; ++k) {
    if (k > 1) factorial *= (k - 1);
    long double ak = static_cast<long double>(a - k);
    long double ck = std::pow(ak, k - 0.5L) * std::exp(ak) / factorial;
    if (k % 2 == 0) ck = -ck;
    acc += ck / (z + static_cast<long double>(k));
  }
  return std::pow(z + static_cast<long double>(a), z + 0.5L) *
         std::exp(-(z + static_cast<long double>(a))) * acc;
}

inline CL spouge_gamma(CL z) {
  const long double pi = 3.141592653589793238462643383279503L;
  if (z.real() < 0.5L)
    return pi / (std::sin(pi * z) * spouge_gamma(1.0L - z));
  return spouge_gamma_shifted(z - 1.0L);
}

// Stirling series with recurrence lift; the Spouge series loses digits to
// cancellation for large |Im z|, so the reference switches over there.
inline CL stirling_gamma(CL z) {
  const long double pi = 3.141592653589793238462643383279503L;
  if (z.real() < 0.5L)
    return pi / (std::sin(pi * z) * stirling_gamma(1.0L - z));
  static const long double B[8] = {
      1.0L / 12,   -1.0L / 360,       1.0L / 1260, -1.0L / 1680,
      1.0L / 1188, -691.0L / 360360,  1.0L / 156,  -3617.0L / 122400};
  CL shift = 0.0L;
  while (std::abs(z) < 40.0L || z.real() < 10.0L) {
    shift -= std::log(z);
    z += 1.0L;
  }
  CL s = 0.5L * std::log(2.0L * pi) + (z - 0.5L) * std::log(z) - z;
  CL zp = z;
  for (int k = 0; k < 8; ++k) {
    s += B[k] / zp;
    zp *= z * z;
  }
  return std::exp(s + shift);
}

inline std::complex<double> gamma_ref(std::complex<double> z) {
  CL zl(z.real(), z.imag());
  CL g = std::abs(zl) <= 8.0L ? spouge_gamma(zl) : stirling_gamma(zl);
  return {static_cast<double>(g.real()), static_cast<double>(g.imag())};
}

// Plain adaptive Simpson; fine for the smooth decaying oracle integrands
// used in the Mellin tests.
inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-11) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

// Integral over (a, infinity) assuming exponential-type decay: mapped onto
// (0, 1] with r = a + u/(1-u).
inline double integrate_to_inf(const std::function<double(double)>& f,
                               double a, double tol = 1e-11) {
  auto g = [&](double u) {
    if (u >= 1.0) return 0.0;
    double d = 1.0 - u;
    return f(a + u / d) / (d * d);
  };
  return integrate(g, 0.0, 1.0 - 1e-12, tol);
}

}  // namespace oracle
