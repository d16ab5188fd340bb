#pragma once

#include <functional>
#include <vector>

#include "crack/types.hpp"

namespace crack {

struct QuadResult {
  double value = 0.0;
  double est_abs_err = 0.0;
};

struct QuadResultC {
  Complex value{0.0, 0.0};
  double est_abs_err = 0.0;
};

// Tanh-sinh (double-exponential) quadrature on a finite interval (a, b).
// Handles integrable endpoint singularities; doubles the level until the
// change is below tol or max_level is reached.
QuadResult tanh_sinh(const std::function<double(double)>& f, double a, double b,
                     double tol = 1e-12, int max_level = 12);
QuadResultC tanh_sinh_c(const std::function<Complex(double)>& f, double a,
                        double b, double tol = 1e-12, int max_level = 12);

// Integral over (a, infinity) via the map r = a + u/(1-u), u in (0,1),
// with tanh-sinh on the mapped interval. Requires decay of f.
QuadResult integrate_to_inf(const std::function<double(double)>& f, double a,
                            double tol = 1e-12);
QuadResultC integrate_to_inf_c(const std::function<Complex(double)>& f,
                               double a, double tol = 1e-12);

// Gauss-Legendre nodes/weights on [-1, 1]; cached per n.
struct GaussLegendre {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussLegendre& gauss_legendre(int n);

// Applies an n-point Gauss-Legendre rule on [a, b].
Complex gl_integrate_c(const std::function<Complex(double)>& f, double a,
                       double b, int n);
double gl_integrate(const std::function<double(double)>& f, double a, double b,
                    int n);

}  // namespace crack
