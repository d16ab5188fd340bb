#include "crack/solver.hpp"

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

using namespace crack;

namespace {

SourceTerm zero_source() {
  SourceTerm z;
  z.fn.derivs = {[](double) { return 0.0; }};
  z.fn.mellin_closed_form = [](Complex) { return Complex{}; };
  z.fn.strip = Strip(-1e300, 1e300);
  return z;
}

SolverParams fast_params() {
  SolverParams p;
  p.line_nodes = 1024;
  p.pv_nodes = 513;
  return p;
}

GridSpec fast_grid() {
  GridSpec g;
  g.n_r = 120;
  g.n_theta = 48;
  return g;
}

}  // namespace

TEST_CASE("parameter validation names the violated inequality") {
  SolverParams p;
  p.validate();  // defaults are admissible
  p.mu = 3.0;
  try {
    p.validate();
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("mu - k - 2") != std::string::npos);
  }
  p = SolverParams{};
  p.vartheta = 0.9;  // outside ((nu-1)/2, nu/2) = (0.25, 0.75)
  try {
    p.validate();
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("vartheta") != std::string::npos);
  }
  p = SolverParams{};
  p.inversion_line_re = -0.3;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  // Derived quantities: nu in (1,2), alpha in (1,2).
  p = SolverParams{};
  CHECK(p.nu() == doctest::Approx(1.5));
  CHECK(p.alpha() == doctest::Approx(1.3));
}

TEST_CASE("y_contour solves the additive difference equation") {
  SourceTerm f = make_gamma_pair(2, 1, 1, 1);
  SolverParams p = fast_params();
  KCache cache;
  for (double t : {0.0, 0.8, -1.5}) {
    Complex lam(-0.75, t);
    Complex lhs = y_contour(lam + 1.0, f, p, cache) - y_contour(lam, f, p, cache);
    Complex h = h_value(lam, f, p);
    CHECK(std::abs(lhs - h) <= 1e-6 * (1.0 + std::abs(h)));
  }
  // Zero source gives zero; the map is linear in f.
  CHECK(std::abs(y_contour(Complex(-0.75, 0.3), zero_source(), p, cache)) <
        1e-14);
  SourceTerm f2 = combine(f, f, 2.0, 0.0);
  Complex y1 = y_contour(Complex(-0.75, 0.5), f, p, cache);
  Complex y2 = y_contour(Complex(-0.75, 0.5), f2, p, cache);
  CHECK(std::abs(y2 - 2.0 * y1) <= 1e-10 * std::abs(y1));
}

TEST_CASE("q~: representations agree pairwise and are eps-independent") {
  SourceTerm f = make_gamma_pair(2, 1, 1, 1);
  SolverParams p = fast_params();
  KCache cache;
  // 20 points of the line Re = -3/4.
  for (int i = 0; i < 20; ++i) {
    Complex lam(-0.75, -3.0 + 6.0 * i / 19.0);
    Complex pv = q_tilde_pv(lam, f, p, cache);
    Complex ct = q_tilde_contour(lam, f, p, cache, p.contour_eps);
    auto [q1, q2] = q_split(lam, f, p, cache);
    CHECK(std::abs(pv - ct) <= 1e-6 * std::abs(pv));
    CHECK(std::abs(pv - q1 - q2) <= 1e-6 * std::abs(pv));
  }
  Complex lam(-0.75, 0.5);
  Complex a = q_tilde_contour(lam, f, p, cache, 0.1);
  Complex b = q_tilde_contour(lam, f, p, cache, 0.25);
  Complex c = q_tilde_contour(lam, f, p, cache, 0.4);
  CHECK(std::abs(a - b) < 1e-8 * std::abs(b));
  CHECK(std::abs(b - c) < 1e-8 * std::abs(b));
  // Zero source, homogeneity.
  CHECK(std::abs(q_tilde_pv(lam, zero_source(), p, cache)) < 1e-14);
  SourceTerm f2 = combine(f, f, 2.0, 0.0);
  CHECK(std::abs(q_tilde_pv(lam, f2, p, cache) - 2.0 * q_tilde_pv(lam, f, p, cache)) <
        1e-10 * std::abs(q_tilde_pv(lam, f, p, cache)));
}

TEST_CASE("q~ split: residue term closed form") {
  // For the (2,1,1,1) pair f~(s) = (s-1) Gamma(s), so the residue part is
  // -f~(lam+2)/(lam(lam+1)) = -Gamma(lam+2)/lam; frozen at lam = -3/4 from
  // the gamma oracle: Gamma(1.25)/0.75.
  SourceTerm f = make_gamma_pair(2, 1, 1, 1);
  SolverParams p = fast_params();
  KCache cache;
  auto [q1, q2] = q_split(Complex(-0.75, 0.0), f, p, cache);
  const double want = oracle::gamma_ref({1.25, 0}).real() / 0.75;
  CHECK(want == doctest::Approx(1.2085366360739673).epsilon(1e-12));
  CHECK(q1.real() == doctest::Approx(want).epsilon(1e-12));
  CHECK(std::abs(q1.imag()) < 1e-14);
}

TEST_CASE("difference-equation residual on the inversion line") {
  SourceTerm f = make_gamma_pair(2, 1, 1, 1);
  SolverParams p = fast_params();
  KCache cache;
  for (int i = 0; i < 20; ++i) {
    Complex lam(-0.75, -4.0 + 8.0 * i / 19.0);
    CHECK(difference_equation_residual(lam, f, p, cache) <= 1e-6);
  }
}

TEST_CASE("solve: bundle fields and invariants") {
  SourceTerm f = make_gamma_pair(2, 1, 1, 1);
  SolverParams p = fast_params();
  SolutionBundle b = solve(f, p, fast_grid());

  CHECK(b.q_tilde.conjugate_asymmetry() < 1e-12);
  CHECK(b.diag.imag_leak < 1e-8);
  CHECK(b.diag.line_tail < 1e-10);

  // q1'(r) = int_r^inf f dt = r e^{-r} for this source; in particular
  // q1'(1) = e^{-1} and q1'(0+) -> 0 by the zero-mean constraint.
  for (std::size_t i = 0; i < b.r.size(); i += 17) {
    const double want = b.r[i] * std::exp(-b.r[i]);
    CHECK(b.q1_prime[i] == doctest::Approx(want).epsilon(1e-6));
  }
  CHECK(std::abs(b.q1_prime.front()) < 2e-3);

  // Trace equality and antisymmetric angular derivative (structural).
  for (std::size_t i = 0; i < b.r.size(); i += 13) {
    CHECK(std::abs(b.p_trace_plus[i] - b.q[i]) <= 1e-6 * (1.0 + std::abs(b.q[i])));
    CHECK(std::abs(b.p_trace_minus[i] - b.q[i]) <= 1e-6 * (1.0 + std::abs(b.q[i])));
    CHECK(std::abs(b.ptheta_plus[i] + b.ptheta_minus[i]) <= 1e-10);
  }

  // p is even in theta.
  const std::size_t nt = b.theta.size();
  for (std::size_t j = 0; j < nt / 2; ++j) {
    CHECK(std::abs(b.p_at(60, j) - b.p_at(60, nt - 1 - j)) < 1e-12);
  }

  // q' cross-checked against centered differences of q at interior points.
  for (std::size_t i = 30; i < b.r.size() - 30; i += 11) {
    const double dr = b.r[i + 1] - b.r[i - 1];
    const double fd = (b.q[i + 1] - b.q[i - 1]) / dr;
    CHECK(std::abs(b.q_prime[i] - fd) <=
          std::max(1e-5, 0.05 * std::abs(b.q_prime[i]) + 1e-4 * dr));
  }

  // Tip behavior: fitted log-log slope of |q'| over [1e-3, 1e-2] is at
  // least alpha - 1 - 0.1, and q'(0) extrapolates to zero.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < b.r.size(); ++i) {
    if (b.r[i] < 1e-3 || b.r[i] > 1e-2) continue;
    if (b.q_prime[i] == 0.0) continue;
    const double X = std::log(b.r[i]), Y = std::log(std::abs(b.q_prime[i]));
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
    ++n;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope >= b.params.alpha() - 1.0 - 0.1);
  CHECK(std::abs(b.q_prime.front()) < 1e-2);
}

TEST_CASE("solve: linearity of the source-to-solution map") {
  SolverParams p = fast_params();
  GridSpec g = fast_grid();
  SourceTerm f1 = make_gamma_pair(2, 1, 1, 1);
  SourceTerm f2 = make_gamma_pair(3, 2, 1, 1);
  SourceTerm fs = combine(f1, f2, 1.0, 1.0);
  SolutionBundle b1 = solve(f1, p, g);
  SolutionBundle b2 = solve(f2, p, g);
  SolutionBundle bs = solve(fs, p, g);
  double scale = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < b1.q.size(); ++i) {
    scale = std::max(scale, std::abs(bs.q[i]));
    worst = std::max(worst, std::abs(bs.q[i] - b1.q[i] - b2.q[i]));
  }
  CHECK(worst <= 1e-8 * scale);
  double worst_p = 0.0, scale_p = 0.0;
  for (std::size_t i = 0; i < b1.p.size(); i += 7) {
    scale_p = std::max(scale_p, std::abs(bs.p[i]));
    worst_p = std::max(worst_p, std::abs(bs.p[i] - b1.p[i] - b2.p[i]));
  }
  CHECK(worst_p <= 1e-8 * scale_p);
}

TEST_CASE("solve: inversion line independence") {
  SourceTerm f = make_gamma_pair(2, 1, 1, 1);
  KCache cache;
  std::vector<double> r{0.01, 0.3, 1.0, 7.0, 90.0};
  std::vector<std::vector<double>> qs;
  for (double re : {-0.9, -0.75, -0.6}) {
    SolverParams p = fast_params();
    p.inversion_line_re = re;
    SpectralFunction qt = q_tilde_line(f, p, cache);
    qs.push_back(inverse_on_grid(qt, r, 0.0, nullptr));
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double scale = std::abs(qs[1][i]) + 1e-12;
    CHECK(std::abs(qs[0][i] - qs[1][i]) <= 1e-6 * scale);
    CHECK(std::abs(qs[2][i] - qs[1][i]) <= 1e-6 * scale);
  }
}

TEST_CASE("tip mode: amplitude balances the coupling condition") {
  SourceTerm f = make_gamma_pair(2, 1, 1, 1);
  SolverParams p = fast_params();
  SolutionBundle b = solve(f, p, fast_grid());
  CHECK(b.tip_mode_c != 0.0);
  // Physical second-order condition -q'' = f - (kappa2/r)(ptheta+ - ptheta-)
  // holds pointwise once the tip mode is included.
  double worst = 0.0;
  for (std::size_t i = 0; i < b.r.size(); ++i) {
    const double r = b.r[i];
    if (r < 1e-2 || r > 1e2) continue;
    const double coup =
        (p.kappa2 / r) * (b.ptheta_plus[i] - b.ptheta_minus[i]);
    const double res = -b.q_second[i] - (f(r) - coup);
    const double scale =
        std::abs(b.q_second[i]) + std::abs(f(r)) + std::abs(coup) + 1e-9;
    worst = std::max(worst, std::abs(res) / scale);
  }
  CHECK(worst < 1e-4);
}
