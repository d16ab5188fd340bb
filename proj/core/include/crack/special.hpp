#pragma once

#include <vector>

#include "crack/types.hpp"

namespace crack {

// Principal-branch-compatible log-gamma, valid off the poles 0, -1, -2, ...
// Lanczos approximation with reflection for Re z < 1/2.
Complex log_gamma(Complex z);

// Euler gamma function. Throws PoleError at nonpositive integers.
ComplexEval gamma(Complex z);

// omega(z) = z * cot(pi z). The singularity at z = 0 is removable
// (omega(0) = 1/pi); nonzero integers are poles. Evaluated through
// scaled exponentials for large |Im z| so it never overflows.
ComplexEval omega(Complex z);

// arg omega via the explicit arctan formula
//   arctan[(y sin 2pix - x sinh 2piy) / (x sin 2pix + y sinh 2piy)],
// z = x + iy. Throws DegenerateError when the denominator vanishes.
double arg_omega(Complex z);

// Infinite product
//   K(z) = prod_n G(n-1/2+z)G(n+1-z) / (G(n+1/2-z)G(n+z)) * (n/(n-1/2))^(2z-1)
// evaluated by summed log-factors with an Euler-Maclaurin tail. Analytic in
// the strip -1/2 < Re z < 2; satisfies K(z+1) = pi * omega(z) * K(z).
ComplexEval k_product(Complex z);

// Strip in which k_product is evaluated directly.
Strip k_strip();

// K0(z) = 1 / ((z+1) K(z+1)), analytic for -1 < Re z < 1/2.
ComplexEval k0(Complex z);

// K1(z) = K(z) cot(pi z), analytic for -3/2 < Re z < 0. Computed as
// K(z+1) / (pi z), which extends the literal product formula across the
// simple pole of K at z = -1/2.
ComplexEval k1(Complex z);

// Pilot solution of the homogeneous difference equation
// kappa0 d(z+1) + omega(z) d(z) = 0:
//   d0(z) = exp(i pi z) (kappa0 pi)^(1/2 - z) K(z).
ComplexEval d0(Complex z, double kappa0);

// Large-|Im z| main term |omega|^(Re z - 1/2) exp(-Im z * arg omega).
// Validation/fallback only; requires |Im z| >= m_asym.
ComplexEval k_asymptotic(Complex z, double m_asym = 10.0);

// log of k_asymptotic's main term (safe in the far field where the value
// itself would over/underflow).
double log_k_asymptotic(Complex z, double m_asym = 10.0);

namespace detail {
// k_product with an explicit direct-summation length (tail handling
// unchanged); exposed so tests can probe truncation stability.
ComplexEval k_product_terms(Complex z, int n_direct);
}  // namespace detail

// Precomputed K values on a uniform grid of the vertical line Re = re,
// |Im| <= im_max, with 6-point Lagrange interpolation between nodes.
// Shared by the solver and the kernel sweeps, where K is needed at millions
// of points on a handful of lines.
class KLineTable {
 public:
  KLineTable(double re, double im_max, double spacing = 0.02);
  Complex eval(double im) const;
  double re() const { return re_; }
  double im_max() const { return im_max_; }

 private:
  double re_;
  double im_max_;
  double dt_;
  std::vector<Complex> v_;
};

}  // namespace crack
