#include "crack/residuals.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "crack/quadrature.hpp"
#include "crack/util.hpp"

namespace crack {

namespace {

// Max |stencil| and max relative residual of p_xixi + p_thth on the given
// log-polar grid (r^2 * Laplacian in (xi, theta) coordinates).
std::pair<double, double> laplace_stencil_pass(const SolutionBundle& b,
                                               double r_lo, double r_hi,
                                               int n_xi, int n_theta) {
  std::vector<double> r(n_xi), th(n_theta);
  const double xi0 = std::log(r_lo), xi1 = std::log(r_hi);
  const double h_xi = (xi1 - xi0) / (n_xi - 1);
  const double h_th = 2.0 * kPi / (n_theta - 1);
  for (int i = 0; i < n_xi; ++i) r[i] = std::exp(xi0 + h_xi * i);
  for (int j = 0; j < n_theta; ++j) th[j] = -kPi + h_th * j;

  std::vector<double> p = reconstruct_field(b.q_tilde, r, th, 0, 0, nullptr);
  for (int i = 0; i < n_xi; ++i)
    for (int j = 0; j < n_theta; ++j)
      p[i * n_theta + j] += tip_mode_field(b.tip_mode_c, 0, 0, r[i], th[j]);

  // Normalize by the curvature scale of the discrete operator (pointwise
  // ratios blow up spuriously near zero crossings of p_xixi).
  double max_abs = 0.0, scale = 0.0;
  for (int i = 1; i + 1 < n_xi; ++i) {
    for (int j = 1; j + 1 < n_theta; ++j) {
      const double pxx = (p[(i - 1) * n_theta + j] - 2.0 * p[i * n_theta + j] +
                          p[(i + 1) * n_theta + j]) /
                         (h_xi * h_xi);
      const double ptt = (p[i * n_theta + j - 1] - 2.0 * p[i * n_theta + j] +
                          p[i * n_theta + j + 1]) /
                         (h_th * h_th);
      max_abs = std::max(max_abs, std::abs(pxx + ptt));
      scale = std::max(scale, std::abs(pxx) + std::abs(ptt));
    }
  }
  return {max_abs, max_abs / (scale + 1e-300)};
}

}  // namespace

ResidualReport laplace_residual(const SolutionBundle& b, double r_lo,
                                double r_hi, int n_xi, int n_theta,
                                double tol) {
  if (n_xi < 8 || n_theta < 8)
    throw GridTooCoarse("laplace_residual: need at least 8 nodes per axis");
  auto [abs_f, rel_f] = laplace_stencil_pass(b, r_lo, r_hi, n_xi, n_theta);
  auto [abs_c, rel_c] =
      laplace_stencil_pass(b, r_lo, r_hi, n_xi / 2, n_theta / 2);
  (void)rel_c;
  ResidualReport rep;
  rep.name = "laplace";
  rep.max_abs = abs_f;
  rep.rel = rel_f;
  rep.grid_h = 2.0 * kPi / (n_theta - 1);
  rep.order = std::log2(std::max(1e-300, abs_c) / std::max(1e-300, abs_f));
  rep.tolerance = tol;
  rep.pass = rel_f <= tol && rep.order >= 1.8;
  rep.details = "interior log-polar stencil on r in [" + format_g17(r_lo) +
                ", " + format_g17(r_hi) + "]";
  return rep;
}

ResidualReport bc_residuals(const SolutionBundle& b, double tol) {
  const double kappa1 = b.params.kappa1;
  double raw = 0.0, weighted = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < b.r.size(); ++i) {
    scale = std::max(scale, std::abs(b.q[i]));
    const double sum_theta = b.ptheta_plus[i] + b.ptheta_minus[i];
    const double plus =
        kappa1 / (2.0 * b.r[i]) * sum_theta + b.p_trace_plus[i] - b.q[i];
    const double minus =
        -kappa1 / (2.0 * b.r[i]) * sum_theta + b.p_trace_minus[i] - b.q[i];
    raw = std::max({raw, std::abs(b.p_trace_plus[i] - b.q[i]),
                    std::abs(b.p_trace_minus[i] - b.q[i])});
    weighted = std::max({weighted, std::abs(plus), std::abs(minus)});
  }
  ResidualReport rep;
  rep.name = "trace_conditions";
  rep.max_abs = weighted;
  rep.rel = weighted / (scale + 1e-300);
  rep.tolerance = tol;
  rep.pass = rep.rel <= tol;
  rep.details = "raw trace gap " + format_g17(raw);
  return rep;
}

namespace {

double ode_worst(const SolutionBundle& b, const SourceTerm& f,
                 double coupling_sign) {
  const double kappa2 = b.params.kappa2;
  double global = 0.0;
  for (std::size_t i = 0; i < b.r.size(); ++i)
    global = std::max(global, std::abs(f(b.r[i])));
  const double floor = 1e-3 * (global + 1e-300);
  double worst = 0.0;
  for (std::size_t i = 0; i < b.r.size(); ++i) {
    const double r = b.r[i];
    if (r < 1e-2 || r > 1e2) continue;
    const double coup =
        coupling_sign * (kappa2 / r) * (b.ptheta_plus[i] - b.ptheta_minus[i]);
    const double res = -b.q_second[i] - (f(r) - coup);
    const double scale =
        std::abs(b.q_second[i]) + std::abs(f(r)) + std::abs(coup) + floor;
    worst = std::max(worst, std::abs(res) / scale);
  }
  return worst;
}

}  // namespace

ResidualReport ode_residual(const SolutionBundle& b, const SourceTerm& f,
                            double tol) {
  ResidualReport rep;
  rep.name = "second_order_coupling";
  rep.rel = ode_worst(b, f, +1.0);
  rep.tolerance = tol;
  rep.pass = rep.rel <= tol;
  if (b.params.sign_audit) {
    const double flipped = ode_worst(b, f, -1.0);
    const double ratio = flipped / std::max(rep.rel, 1e-300);
    rep.details =
        "sign audit: implemented sign " +
        std::string(rep.rel <= flipped ? "minimizes" : "does NOT minimize") +
        " the residual; flipped/implemented = " + format_g17(ratio);
    rep.pass = rep.pass && rep.rel <= flipped && ratio >= 10.0;
  }
  return rep;
}

std::vector<ResidualReport> venttsel_residuals(const SolutionBundle& b,
                                               const SourceTerm& f) {
  std::vector<ResidualReport> out;
  const double kappa1 = b.params.kappa1;
  const double kappa2 = b.params.kappa2;

  // Flux-continuity identity: (kappa1/r)(ptheta+ + ptheta-) + (p+ - p-) = 0.
  {
    ResidualReport rep;
    rep.name = "venttsel_flux_continuity";
    double scale = 0.0;
    for (std::size_t i = 0; i < b.r.size(); ++i) {
      scale = std::max(scale, std::abs(b.q[i]));
      const double v =
          kappa1 / b.r[i] * (b.ptheta_plus[i] + b.ptheta_minus[i]) +
          (b.p_trace_plus[i] - b.p_trace_minus[i]);
      rep.max_abs = std::max(rep.max_abs, std::abs(v));
    }
    rep.rel = rep.max_abs / (scale + 1e-300);
    rep.tolerance = 1e-6;
    rep.pass = rep.rel <= rep.tolerance;
    out.push_back(rep);
  }

  // Second-order tangential condition (the q-eliminated trace system):
  //   -(p+ + p-)_x1x1 / 2 - kappa2 (p+_x2 - p-_x2) = f,
  // with p+-_x2 = -(1/r) ptheta(r, +-pi) and d^2/dx1^2 = d^2/dr^2 on traces.
  {
    ResidualReport rep;
    rep.name = "venttsel_second_order";
    double global = 0.0;
    for (std::size_t i = 0; i < b.r.size(); ++i)
      global = std::max(global, std::abs(f(b.r[i])));
    const double floor = 1e-3 * (global + 1e-300);
    for (std::size_t i = 0; i < b.r.size(); ++i) {
      const double r = b.r[i];
      if (r < 1e-2 || r > 1e2) continue;
      const double normal_jump =
          -(1.0 / r) * (b.ptheta_plus[i] - b.ptheta_minus[i]);
      const double v = -b.q_second[i] - kappa2 * normal_jump - f(r);
      const double scale = std::abs(b.q_second[i]) +
                           std::abs(kappa2 * normal_jump) + std::abs(f(r)) +
                           floor;
      rep.max_abs = std::max(rep.max_abs, std::abs(v));
      rep.rel = std::max(rep.rel, std::abs(v) / scale);
    }
    rep.tolerance = 2e-4;
    rep.pass = rep.rel <= rep.tolerance;
    out.push_back(rep);
  }

  // Tip slope limit: p+-_x1(0+) = -q'(0+) from both sides; their sum is
  // structurally -2 q'(r), so the check is that the slope limit at the tip
  // is small against the overall slope scale.
  {
    ResidualReport rep;
    rep.name = "venttsel_tip_slopes";
    double qp_max = 0.0;
    for (double v : b.q_prime) qp_max = std::max(qp_max, std::abs(v));
    rep.max_abs = 2.0 * std::abs(b.q_prime.front());
    rep.rel = rep.max_abs / (2.0 * qp_max + 1e-300);
    rep.tolerance = 0.1;
    rep.pass = rep.rel <= rep.tolerance;
    rep.details = "|p+_x1 + p-_x1| = 2|q'| at r_min, relative to max slope";
    out.push_back(rep);
  }
  return out;
}

std::vector<ResidualReport> tip_and_decay_checks(const SolutionBundle& b) {
  std::vector<ResidualReport> out;
  if (b.r.front() > 1.001e-3 || b.r.back() < 0.999e2)
    throw InsufficientRange(
        "tip_and_decay_checks: grid must cover [1e-3, 1e2]");

  double qmax = 0.0;
  for (double v : b.q) qmax = std::max(qmax, std::abs(v));
  const bool vacuous = qmax == 0.0;

  {
    ResidualReport rep;
    rep.name = "tip_slope";
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < b.r.size(); ++i) {
      if (b.r[i] < 1e-3 || b.r[i] > 1e-2) continue;
      if (b.q_prime[i] == 0.0) continue;
      const double x = std::log(b.r[i]);
      const double y = std::log(std::abs(b.q_prime[i]));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    const double want = b.params.alpha() - 1.0 - 0.1;
    if (vacuous || n < 3) {
      rep.pass = true;
      rep.details = "vacuous (zero source or empty window)";
    } else {
      double qp_max = 0.0;
      for (double v : b.q_prime) qp_max = std::max(qp_max, std::abs(v));
      const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      rep.rel = slope;
      rep.tolerance = want;
      rep.pass = slope >= want &&
                 std::abs(b.q_prime.front()) <= 0.1 * qp_max + 1e-12;
      rep.details = "fitted slope " + format_g17(slope) + ", require >= " +
                    format_g17(want) + "; |q'(r_min)| = " +
                    format_g17(std::abs(b.q_prime.front()));
    }
    out.push_back(rep);
  }

  {
    ResidualReport rep;
    rep.name = "far_field_decay";
    double mid_q = 0.0, outer_q = 0.0;
    for (std::size_t i = 0; i < b.r.size(); ++i) {
      if (b.r[i] >= 0.1 && b.r[i] <= 10.0)
        mid_q = std::max(mid_q, std::abs(b.q[i]));
      if (b.r[i] >= 1e2) outer_q = std::max(outer_q, std::abs(b.q[i]));
    }
    double mid_p = 0.0, outer_p = 0.0;
    const std::size_t nt = b.theta.size();
    for (std::size_t i = 0; i < b.r.size(); ++i)
      for (std::size_t j = 0; j < nt; ++j) {
        const double v = std::abs(b.p[i * nt + j]);
        if (b.r[i] >= 0.1 && b.r[i] <= 10.0) mid_p = std::max(mid_p, v);
        if (b.r[i] >= 1e2) outer_p = std::max(outer_p, v);
      }
    rep.rel = std::max(outer_q / (mid_q + 1e-300), outer_p / (mid_p + 1e-300));
    rep.tolerance = 1e-2;
    rep.pass = vacuous || rep.rel <= rep.tolerance;
    rep.details =
        "outer-decade / mid-range magnitude; q ratio " +
        format_g17(outer_q / (mid_q + 1e-300)) + ", p ratio " +
        format_g17(outer_p / (mid_p + 1e-300)) +
        "; the unique weighted-class solution tends to the constant "
        "lim lam q~(lam) at infinity, so a nonzero level here reflects the "
        "solution itself, not a numerical defect";
    out.push_back(rep);
  }
  return out;
}

NormReport norm_estimate_report(const SolutionBundle& b, const SourceTerm& f,
                                const PolarNormGrid& grid) {
  NormReport rep;
  double fmax = 0.0;
  for (double r : b.r) fmax = std::max(fmax, std::abs(f(r)));
  if (fmax == 0.0) {
    rep.degenerate = true;
    return rep;
  }
  const SolverParams& p = b.params;
  if (std::abs(p.inversion_line_re - (p.mu - p.k - 2.0)) > 1e-12)
    throw LineMismatch(
        "norm_estimate_report: inversion line must sit at mu - k - 2");

  // Interior norm of order k+3 via the polar route; the (l, m) fields are
  // synthesized on exactly the grid the norm quadrature walks, so the
  // callback recovers its sample by index.
  const int k_norm = p.k + 3;
  const int nr = grid.n_r, nt = grid.n_theta;
  const double xi0 = std::log(grid.r_min), xi1 = std::log(grid.r_max);
  const double dxi = (xi1 - xi0) / (nr - 1);
  const double dth = 2.0 * kPi / (nt - 1);
  std::vector<double> rg(nr), tg(nt);
  for (int i = 0; i < nr; ++i) rg[i] = std::exp(xi0 + dxi * i);
  for (int j = 0; j < nt; ++j) tg[j] = -kPi + dth * j;

  std::vector<std::vector<double>> fields((k_norm + 1) * (k_norm + 1));
  for (int l = 0; l <= k_norm; ++l)
    for (int m = 0; m + l <= k_norm; ++m) {
      auto field = reconstruct_field(b.q_tilde, rg, tg, l, m, nullptr);
      for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nt; ++j)
          field[i * nt + j] += tip_mode_field(b.tip_mode_c, l, m, rg[i], tg[j]);
      fields[l * (k_norm + 1) + m] = std::move(field);
    }
  auto lookup = [&](int l, int m, double r, double theta) -> double {
    const int i = static_cast<int>(std::lround((std::log(r) - xi0) / dxi));
    const int j = static_cast<int>(std::lround((theta + kPi) / dth));
    return fields[l * (k_norm + 1) + m][i * nt + j];
  };
  auto [p_norm, tail] = weighted_norm_polar(lookup, k_norm, p.mu, grid);
  rep.p_interior = p_norm;
  rep.tail_fraction = tail;

  // Half-order trace norms of order k+2+1/2 on the inversion line.
  NormParams trace_params(p.k + 2, p.mu);
  rep.q_trace = half_norm_spectral(b.q_tilde, trace_params);
  rep.p_trace = rep.q_trace;  // the slit traces coincide with q

  // Source norm of order k+1/2 on Re s = mu - k.
  VerticalLine fline(p.mu - p.k, b.q_tilde.line.im_max,
                     b.q_tilde.line.n_nodes);
  SpectralFunction ft = forward_mellin(f.fn, fline);
  rep.f_norm = half_norm_spectral(ft, NormParams(p.k, p.mu));

  rep.ratio = (rep.p_interior + rep.p_trace + rep.q_trace) / rep.f_norm;
  return rep;
}

double PolynomialSolution::f_at(double x1) const {
  double acc = 0.0, pw = 1.0;
  for (double c : f_coeff) {
    acc += c * pw;
    pw *= x1;
  }
  return acc;
}

namespace {

Complex zpow(double x1, double x2, int m) {
  Complex z(x1, x2), acc(1.0, 0.0);
  for (int i = 0; i < m; ++i) acc *= z;
  return acc;
}

}  // namespace

double PolynomialSolution::q_at(double x1) const {
  double acc = q0 + q1 * x1;
  for (std::size_t k = 0; k < f_coeff.size(); ++k)
    acc -= f_coeff[k] * std::pow(x1, k + 2.0) / ((k + 2.0) * (k + 1.0));
  return acc;
}

double PolynomialSolution::q_x1x1(double x1) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < f_coeff.size(); ++k)
    acc -= f_coeff[k] * std::pow(x1, static_cast<double>(k));
  return acc;
}

double PolynomialSolution::p_at(double x1, double x2) const {
  double acc = q0 + q1 * x1;
  for (std::size_t k = 0; k < f_coeff.size(); ++k) {
    double c = f_coeff[k] / ((k + 2.0) * (k + 1.0));
    if (k + 1 == f_coeff.size()) c += p_perturb;
    acc -= c * zpow(x1, x2, static_cast<int>(k) + 2).real();
  }
  return acc;
}

double PolynomialSolution::p_x1x1(double x1, double x2) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < f_coeff.size(); ++k) {
    double c = f_coeff[k] / ((k + 2.0) * (k + 1.0));
    if (k + 1 == f_coeff.size()) c += p_perturb;
    const int m = static_cast<int>(k) + 2;
    acc -= c * m * (m - 1) * zpow(x1, x2, m - 2).real();
  }
  return acc;
}

double PolynomialSolution::p_x2x2(double x1, double x2) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < f_coeff.size(); ++k) {
    double c = f_coeff[k] / ((k + 2.0) * (k + 1.0));
    if (k + 1 == f_coeff.size()) c += p_perturb;
    const int m = static_cast<int>(k) + 2;
    // d^2/dx2^2 Re z^m = -m(m-1) Re z^(m-2)
    acc += c * m * (m - 1) * zpow(x1, x2, m - 2).real();
  }
  return acc;
}

double PolynomialSolution::p_x2(double x1, double x2) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < f_coeff.size(); ++k) {
    double c = f_coeff[k] / ((k + 2.0) * (k + 1.0));
    if (k + 1 == f_coeff.size()) c += p_perturb;
    const int m = static_cast<int>(k) + 2;
    // d/dx2 Re z^m = -m Im z^(m-1)
    acc += c * m * zpow(x1, x2, m - 1).imag();
  }
  return acc;
}

std::vector<ResidualReport> polynomial_oracle_check(
    const PolynomialSolution& sol, int n_points, unsigned seed, double tol) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> box(-3.0, 3.0);
  std::uniform_real_distribution<double> slit(-3.0, -0.05);

  ResidualReport lap, bc, ode;
  lap.name = "oracle_laplace";
  bc.name = "oracle_trace";
  ode.name = "oracle_second_order";
  lap.tolerance = bc.tolerance = ode.tolerance = tol;
  for (int i = 0; i < n_points; ++i) {
    const double x1 = box(rng), x2 = box(rng);
    lap.max_abs = std::max(lap.max_abs,
                           std::abs(sol.p_x1x1(x1, x2) + sol.p_x2x2(x1, x2)));
    const double s = slit(rng);
    // Trace conditions at x2 = +-0; Re z^m is even in x2 near the real
    // axis, so the one-sided limits coincide with the on-axis values.
    const double pp = sol.p_at(s, 0.0);
    const double px2 = sol.p_x2(s, 0.0);
    const double q = sol.q_at(s);
    bc.max_abs = std::max(
        bc.max_abs,
        std::abs(-0.5 * sol.kappa1 * px2 - 0.5 * sol.kappa1 * px2 + pp - q));
    // -q'' = f + kappa2 (p+_x2 - p-_x2); the normal jump vanishes because
    // the polynomial field is smooth across the slit.
    const double jump = sol.p_x2(s, 0.0) - sol.p_x2(s, 0.0);
    ode.max_abs = std::max(
        ode.max_abs,
        std::abs(-sol.q_x1x1(s) - sol.f_at(s) - sol.kappa2 * jump));
  }
  lap.rel = lap.max_abs;
  bc.rel = bc.max_abs;
  ode.rel = ode.max_abs;
  lap.pass = lap.max_abs <= tol;
  bc.pass = bc.max_abs <= tol;
  ode.pass = ode.max_abs <= tol;
  return {lap, bc, ode};
}

}  // namespace crack
