#pragma once

#include <map>
#include <memory>
#include <vector>

#include "crack/mellin.hpp"
#include "crack/source.hpp"
#include "crack/special.hpp"
#include "crack/types.hpp"

namespace crack {

// Problem and discretization parameters. kappa0 = 2 kappa2 is the coupling
// constant of the difference equation; the regularity indices (k, mu) fix
// the inversion line and the norm weights; vartheta/alpha drive the split
// and the tip-behavior bound.
struct SolverParams {
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  int k = 0;
  double mu = 1.25;
  double vartheta = 0.4;  // in ((nu-1)/2, nu/2)
  double inversion_line_re = -0.75;
  double contour_eps = 0.25;
  double pv_reg_width = 1e-3;
  double y_max = 12.0;
  double line_im_max = 40.0;
  int line_nodes = 2048;
  int pv_nodes = 769;  // odd, so the symmetric grid contains y = 0
  bool sign_audit = false;

  double kappa0() const { return 2.0 * kappa2; }
  double nu() const { return 2.0 * (mu - k) - 1.0; }
  double alpha() const { return 2.0 + 2.0 * vartheta - nu(); }

  // Throws ConfigError naming the violated inequality.
  void validate() const;
};

// Memoized K tables on vertical lines (the kernel is evaluated at millions
// of points on a handful of lines).
class KCache {
 public:
  const KLineTable& line(double re, double im_max);

 private:
  std::map<long long, std::unique_ptr<KLineTable>> tables_;
};

// Value of h(z) = -f~(z+2) / (kappa0 (z+1) d0(z+1)) entering the additive
// difference equation y(z+1) - y(z) = h(z).
Complex h_value(Complex z, const SourceTerm& f, const SolverParams& p);

// Contour solution of the additive difference equation: integral of
// h(z + zeta) (cot(pi zeta) + i) / (2i) over the indented imaginary axis.
Complex y_contour(Complex lam, const SourceTerm& f, const SolverParams& p,
                  KCache& cache);

//

// Spectral solution q~ by the principal-value representation on the
// imaginary zeta-axis (the workhorse used for whole-line evaluation).
Complex q_tilde_pv(Complex lam, const SourceTerm& f, const SolverParams& p,
                   KCache& cache);

// Same function by the indented-contour representation with radius eps.
Complex q_tilde_contour(Complex lam, const SourceTerm& f,
                        const SolverParams& p, KCache& cache, double eps);

// Residue/contour split: q1 = f~(lam+2) / (lam (lam+1)), q2 the vertical
// line integral at Re zeta = vartheta. q1 + q2 equals q~.
std::pair<Complex, Complex> q_split(Complex lam, const SourceTerm& f,
                                    const SolverParams& p, KCache& cache);

// q~ on every node of the inversion line.
SpectralFunction q_tilde_line(const SourceTerm& f, const SolverParams& p,
                              KCache& cache);

// Relative residual of the multiplicative difference equation
//   kappa0 d(lam+1) + omega(lam) d(lam) = -f~(lam+2)/(lam+1),
// with d = q~ tan(pi lam) and both q~ values from the PV representation.
double difference_equation_residual(Complex lam, const SourceTerm& f,
                                    const SolverParams& p, KCache& cache);

// d/dtheta^m [cos(lam theta)] / cos(pi lam), evaluated through scaled
// exponentials so it stays finite for large |Im lam|.
Complex angular_factor(Complex lam, double theta, int m);

// tan(pi lam) without overflow.
Complex tan_pi_stable(Complex lam);

// Physical grids for the reconstruction.
struct GridSpec {
  double r_min = 1e-3;
  double r_max = 1e3;
  int n_r = 400;
  int n_theta = 256;

  std::vector<double> r_nodes() const;      // log-spaced
  std::vector<double> theta_nodes() const;  // uniform on [-pi, pi]
};

// Quadrature/diagnostic summary carried along with the fields.
struct SolveDiagnostics {
  double line_tail = 0.0;        // |q~| at the line ends / max |q~|
  double imag_leak = 0.0;        // worst imaginary residue of a real field
  double k_est_rel_err = 0.0;    // worst K error estimate on the line
  double decay_q = 0.0;          // |q(r_max)| / max |q|
  double decay_p = 0.0;
};

struct SolutionBundle {
  SolverParams params;
  SpectralFunction q_tilde;
  std::vector<double> r;
  std::vector<double> q, q_prime, q_second, q1_prime;
  std::vector<double> theta;
  std::vector<double> p;  // row-major, p[i * n_theta + j]
  std::vector<double> p_trace_plus, p_trace_minus;
  std::vector<double> ptheta_plus, ptheta_minus;
  // Amplitude of the crack-tip harmonic sqrt(r) cos(theta/2). The mode has
  // zero trace on both slit sides, so the pure cosine ansatz cannot see it;
  // its coefficient q~(-1/2)/pi is pinned by the second-order coupling
  // condition (otherwise the flux balance is off by a multiple of
  // r^(-1/2)).
  double tip_mode_c = 0.0;
  SolveDiagnostics diag;

  double p_at(std::size_t i, std::size_t j) const {
    return p[i * theta.size() + j];
  }
};

// (r d/dr)^l (d/dtheta)^m of the tip mode c sqrt(r) cos(theta/2).
double tip_mode_field(double c, int l, int m, double r, double theta);

// Inverse transform of mult(lam) q~(lam) r^(-lam-shift) over the r grid;
// records the worst imaginary leakage if imag_leak is non-null.
std::vector<double> inverse_on_grid(const SpectralFunction& g,
                                    const std::vector<double>& r, double shift,
                                    const std::function<Complex(Complex)>& mult,
                                    double* imag_leak = nullptr);

// Evaluates p (or an angular derivative of it) on the full (r, theta) grid.
std::vector<double> reconstruct_field(const SpectralFunction& q_tilde,
                                      const std::vector<double>& r,
                                      const std::vector<double>& theta,
                                      int euler_order, int theta_order,
                                      double* imag_leak = nullptr);

// Runs source validation, the spectral solve, and the reconstruction.
SolutionBundle solve(const SourceTerm& f, const SolverParams& p,
                     const GridSpec& grid);

}  // namespace crack
