#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "crack/types.hpp"

namespace crack {

// Vertical integration line Re s = re, truncated at |Im s| <= im_max.
struct VerticalLine {
  enum class Rule { kTrapezoid, kGaussPanels };

  double re = 0.0;
  double im_max = 40.0;
  int n_nodes = 2048;
  Rule rule = Rule::kTrapezoid;

  VerticalLine() = default;
  VerticalLine(double re_, double im_max_, int n_nodes_,
               Rule rule_ = Rule::kTrapezoid);

  // Imaginary parts of the nodes (symmetric about the real axis) and the
  // matching quadrature weights for integration in t along the line.
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

// Values of a Mellin-side function on the nodes of a vertical line.
struct SpectralFunction {
  VerticalLine line;
  std::vector<Complex> values;
  Strip strip;

  SpectralFunction(VerticalLine l, std::vector<Complex> v, Strip s);

  Complex at(std::size_t j) const { return values[j]; }
  Complex node(std::size_t j) const {
    return {line.re, line.nodes()[j]};
  }
  // Max deviation from values(c+it) = conj(values(c-it)), relative to the
  // largest value; zero for transforms of real physical functions.
  double conjugate_asymmetry() const;
};

// A physical-side function on (0, inf). `derivs[l]` evaluates d^l h / dr^l;
// at least derivs[0] (the function itself) must be present. A closed-form
// transform takes precedence over quadrature when available.
struct PhysicalFunction {
  std::vector<std::function<double(double)>> derivs;
  std::function<Complex(Complex)> mellin_closed_form;  // may be empty
  Strip strip{-1e300, 1e300};                          // transform validity

  double operator()(double r) const { return derivs.at(0)(r); }
};

// Norm indices (k, mu) for the weighted half-order norms. The solver's
// admissibility window -1 < mu - k - 2 < -1/2 is validated at configuration
// level, not here: the norm machinery itself is also evaluated at shifted
// orders such as k+2.
struct NormParams {
  int k = 0;
  double mu = 1.25;

  NormParams(int k_, double mu_);
};

// h~(s) = int_0^inf r^(s-1) h(r) dr on the nodes of `line`.
SpectralFunction forward_mellin(const PhysicalFunction& h,
                                const VerticalLine& line);

// Single-point transform by quadrature (split at r = 1, double-exponential
// rules on both pieces).
Complex mellin_point(const PhysicalFunction& h, Complex s, double tol = 1e-10);

// h(r) = (1/2 pi i) int r^(-s) h~(s) ds along the stored line.
Complex inverse_mellin(const SpectralFunction& g, double r,
                       double tail_tol = 1e-8);

// (1/2 pi) int |h~(a+it)|^2 dt; equals the physical-side weighted integral
// int_0^inf |h|^2 r^(2a-1) dr.
double parseval_norm(const SpectralFunction& g, double a);

// Mellin convolution int_0^inf h(r/t) g(t) dt/t evaluated spectrally as
// (1/2 pi i) int r^(-s) h~(s) g~(s) ds on `line`.
Complex mellin_convolve(const PhysicalFunction& h, const PhysicalFunction& g,
                        double r, const VerticalLine& line);

// Transform of h^(k): (-1)^k (s-1)...(s-k) h~(s-k), living on the line
// shifted right by k.
SpectralFunction derivative_transform(const SpectralFunction& g, int k);

// Transform of (r d/dr)^k h: (-s)^k h~(s) on the same line.
SpectralFunction euler_derivative_transform(const SpectralFunction& g, int k);

// Spectral half-order norm: sqrt( int |h~(mu-k+it)|^2 (1+|s|)^(2k+1) dt ).
// The line must sit at Re s = mu - k.
double half_norm_spectral(const SpectralFunction& g, const NormParams& p);

// Physical half-order norm: weighted derivative terms plus the half-order
// difference seminorm
//   sum_l int r^(2(mu-k+l)-1) |h^(l)|^2 dr
//   + int r^(2 mu - 1) int_0^1 |h^(k)(r(1+u)) - h^(k)(r)|^2 u^-2 du dr.
// Uses analytic derivatives when provided, Richardson finite differences
// otherwise (GridTooCoarse when the FD error estimate exceeds 10%).
double half_norm_physical(const PhysicalFunction& h, const NormParams& p);

// Grid for the polar weighted norm integrals.
struct PolarNormGrid {
  double r_min = 1e-3;
  double r_max = 1e3;
  int n_r = 320;
  int n_theta = 192;
};

// Weighted polar norm of order k:
//   sqrt( int_0^inf r^(2(mu-k)+1) sum_{l<=k} ||(r d/dr)^l p||^2_{H^(k-l)(-pi,pi)} dr ).
// `field` evaluates (r d/dr)^l (d/d theta)^m p at (r, theta). The returned
// pair is (norm, estimated relative tail fraction outside [r_min, r_max]).
std::pair<double, double> weighted_norm_polar(
    const std::function<double(int l, int m, double r, double theta)>& field,
    int k, double mu, const PolarNormGrid& grid);

}  // namespace crack
