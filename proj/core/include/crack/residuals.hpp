#pragma once

#include <string>
#include <vector>

#include "crack/solver.hpp"

namespace crack {

// Outcome of one verification check. `rel` is scaled by the local data
// magnitude (with a small global floor so that ratios of noise-level
// quantities do not register as failures).
struct ResidualReport {
  std::string name;
  double max_abs = 0.0;
  double rel = 0.0;
  double grid_h = 0.0;
  double order = 0.0;  // observed convergence order, when measured
  double tolerance = 0.0;
  bool pass = false;
  std::string details;
};

// Second-order stencil residual of p_rr + p_r/r + p_thth/r^2 on a log-polar
// grid covering r in [r_lo, r_hi]; the observed order comes from a
// half-resolution rerun.
ResidualReport laplace_residual(const SolutionBundle& b, double r_lo,
                                double r_hi, int n_xi, int n_theta,
                                double tol = 1e-4);

// Trace conditions: +-kappa1/(2r) [ptheta(pi) + ptheta(-pi)] + p(., +-pi)
// minus q, reported raw and kappa1-weighted.
ResidualReport bc_residuals(const SolutionBundle& b, double tol = 1e-6);

// Second-order coupling condition -q'' = f - (kappa2/r)(ptheta+ - ptheta-).
// With sign_audit set in the params, both coupling signs are evaluated and
// the report names the minimizer and the separation factor.
ResidualReport ode_residual(const SolutionBundle& b, const SourceTerm& f,
                            double tol = 1e-4);

// The Venttsel reformulation: the flux-continuity identity, the
// second-order tangential condition (the algebraic consequence of the
// trace system), and the tip slope limit.
std::vector<ResidualReport> venttsel_residuals(const SolutionBundle& b,
                                               const SourceTerm& f);

// Tip condition (log-log slope of |q'| near 0 and q'(0) extrapolation) and
// far-field decay of the reconstructed fields.
std::vector<ResidualReport> tip_and_decay_checks(const SolutionBundle& b);

// Weighted norms of the solution and the ratio of the a priori estimate:
//   (||p||_{H^{k+3}_mu} + ||p||_{H^{k+2+1/2}_mu} + ||q||_{H^{k+2+1/2}_mu})
//     / ||f||_{H^{k+1/2}_mu}.
struct NormReport {
  double p_interior = 0.0;
  double p_trace = 0.0;
  double q_trace = 0.0;
  double f_norm = 0.0;
  double ratio = 0.0;
  double tail_fraction = 0.0;
  bool degenerate = false;  // f identically zero
};
NormReport norm_estimate_report(const SolutionBundle& b, const SourceTerm& f,
                                const PolarNormGrid& grid = {});

// Exact polynomial solutions used to validate the residual operators
// themselves: f = sum f_k x1^k with
//   q(x1) = q0 + q1 x1 - sum f_k x1^(k+2) / ((k+2)(k+1)),
//   p(x)  = q0 + q1 x1 - sum f_k Re((x1+i x2)^(k+2)) / ((k+2)(k+1)).
struct PolynomialSolution {
  std::vector<double> f_coeff;
  double q0 = 0.0;
  double q1 = 0.0;
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  // Perturbation of the leading p coefficient (fault-injection knob).
  double p_perturb = 0.0;

  double f_at(double x1) const;
  double q_at(double x1) const;
  double q_x1x1(double x1) const;
  double p_at(double x1, double x2) const;
  double p_x1x1(double x1, double x2) const;
  double p_x2x2(double x1, double x2) const;
  double p_x2(double x1, double x2) const;
};

// Evaluates the four boundary-system residuals of the polynomial pair at
// `n_points` seeded random points; all vanish to machine precision for an
// unperturbed solution of degree <= 4.
std::vector<ResidualReport> polynomial_oracle_check(
    const PolynomialSolution& sol, int n_points = 100,
    unsigned seed = 20260809, double tol = 1e-12);

}  // namespace crack
