#include "crack/solver.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "crack/quadrature.hpp"
#include "crack/util.hpp"

namespace crack {

namespace {

const Complex kI{0.0, 1.0};

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

// cot(pi z) + i: exponentially small for Im z >> 0, ~2i for Im z << 0;
// both regimes through scaled exponentials.
Complex cot_pi_plus_i(Complex z) {
  if (z.imag() > 1.5) {
    const Complex e = std::exp(2.0 * kI * kPi * z);  // |e| << 1
    return -2.0 * kI * e / (1.0 - e);
  }
  if (z.imag() < -1.5) {
    const Complex e = std::exp(-2.0 * kI * kPi * z);  // |e| << 1
    return 2.0 * kI / (1.0 - e);
  }
  return std::cos(kPi * z) / std::sin(kPi * z) + kI;
}

// 1 / (e^{i pi z} - e^{-i pi z}).
Complex inv_two_i_sin_pi(Complex z) {
  if (std::abs(z.imag()) > 12.0) {
    if (z.imag() > 0.0)
      return -std::exp(kI * kPi * z) / (1.0 - std::exp(2.0 * kI * kPi * z));
    return std::exp(-kI * kPi * z) / (1.0 - std::exp(-2.0 * kI * kPi * z));
  }
  return 1.0 / (std::exp(kI * kPi * z) - std::exp(-kI * kPi * z));
}

}  // namespace

void SolverParams::validate() const {
  require(kappa1 > 0.0, "config: require kappa1 > 0");
  require(kappa2 > 0.0, "config: require kappa2 > 0");
  require(k >= 0, "config: require k >= 0");
  require(mu - k - 2.0 > -1.0 && mu - k - 2.0 < -0.5,
          "config: require -1 < mu - k - 2 < -1/2 (got mu - k - 2 = " +
              format_g17(mu - k - 2.0) + ")");
  const double lo = 0.5 * (nu() - 1.0), hi = 0.5 * nu();
  require(vartheta > lo && vartheta < hi,
          "config: require (nu-1)/2 < vartheta < nu/2 with nu = 2(mu-k)-1 "
          "(window (" +
              format_g17(lo) + ", " + format_g17(hi) + "), got " +
              format_g17(vartheta) + ")");
  require(inversion_line_re > -1.0 && inversion_line_re < -0.5,
          "config: require -1 < inversion_line_re < -1/2");
  require(contour_eps > 0.0 && contour_eps < 0.5,
          "config: require 0 < contour_eps < 1/2");
  require(pv_reg_width > 0.0 && pv_reg_width < 0.1,
          "config: require 0 < pv_reg_width < 0.1");
  require(y_max >= 4.0, "config: require y_max >= 4");
  require(line_im_max > 0.0 && line_nodes >= 16 && pv_nodes >= 33,
          "config: require line_im_max > 0, line_nodes >= 16, pv_nodes >= 33");
}

const KLineTable& KCache::line(double re, double im_max) {
  const long long key = std::llround(re * 1e9);
  auto it = tables_.find(key);
  if (it != tables_.end() && it->second->im_max() >= im_max)
    return *it->second;
  auto table = std::make_unique<KLineTable>(re, im_max);
  auto [pos, inserted] = tables_.insert_or_assign(key, std::move(table));
  return *pos->second;
}

Complex h_value(Complex z, const SourceTerm& f, const SolverParams& p) {
  const Complex d0v = d0(z + 1.0, p.kappa0()).value;
  return -f.mellin(z + 2.0) / (p.kappa0() * (z + 1.0) * d0v);
}

Complex y_contour(Complex lam, const SourceTerm& f, const SolverParams& p,
                  KCache& cache) {
  const double eps = p.contour_eps;
  const double span = std::abs(lam.imag()) + p.y_max + 2.0;
  const KLineTable& ktab = cache.line(lam.real() + 1.0, span);
  const double lk = std::log(p.kappa0() * kPi);

  auto h_on_axis = [&](double y) {
    const Complex z = lam + Complex(0.0, y);
    const Complex d0v =
        std::exp(kI * kPi * (z + 1.0) + (0.5 - (z + 1.0)) * lk) *
        ktab.eval(z.imag());
    return -f.mellin(z + 2.0) / (p.kappa0() * (z + 1.0) * d0v);
  };

  Complex acc{};
  const int panels = std::max(8, static_cast<int>((p.y_max - eps) / 0.5));
  for (int side = 0; side < 2; ++side) {
    const double a = side ? eps : -p.y_max;
    const double b = side ? p.y_max : -eps;
    const double w = (b - a) / panels;
    for (int q = 0; q < panels; ++q) {
      acc += gl_integrate_c(
          [&](double y) {
            return h_on_axis(y) * cot_pi_plus_i(Complex(0.0, y)) * kI;
          },
          a + q * w, a + (q + 1) * w, 12);
    }
  }
  // Left semicircle from -i eps through -eps to +i eps (clockwise around 0).
  acc += gl_integrate_c(
      [&](double u) {
        const double phi = -0.5 * kPi - kPi * u;
        const Complex zeta = eps * std::exp(kI * phi);
        return h_value(lam + zeta, f, p) * cot_pi_plus_i(zeta) *
               (zeta * kI * (-kPi));
      },
      0.0, 1.0, 32);
  return acc / (2.0 * kI);
}

namespace {

// Shared pieces of the q~ representations.
struct QContext {
  const SolverParams& p;
  std::function<Complex(Complex)> fm;  // Mellin transform of the source
  double log_k0pi;
};

// (kappa0 pi)^zeta K(lam+1) f~(lam+zeta+2)
//   / (lam (lam+zeta+1) K(lam+zeta+1) (e^{i pi zeta} - e^{-i pi zeta})).
Complex rep_integrand(const QContext& ctx, Complex lam, Complex k_lam1,
                      Complex zeta, Complex k_at_shift) {
  const Complex num =
      std::exp(zeta * ctx.log_k0pi) * k_lam1 * ctx.fm(lam + zeta + 2.0);
  return num / (lam * (lam + zeta + 1.0) * k_at_shift) *
         inv_two_i_sin_pi(zeta);
}

Complex q_tilde_pv_impl(Complex lam, const QContext& ctx, Complex k_lam1,
                        const KLineTable& k_line) {
  const SolverParams& p = ctx.p;
  auto N = [&](double y) {
    const Complex zeta(0.0, y);
    const Complex num =
        std::exp(zeta * ctx.log_k0pi) * k_lam1 * ctx.fm(lam + zeta + 2.0);
    return -kI * num /
           (lam * (lam + zeta + 1.0) * k_line.eval(lam.imag() + y));
  };
  // PV regularization: subtract N(0) so the integrand is bounded; the
  // leftover N(0) [pv] int dy / (2 sinh pi y) vanishes by oddness.
  const Complex n0 = N(0.0);
  const double d = p.pv_reg_width;
  const Complex n_prime0 =
      (8.0 * (N(d) - N(-d)) - (N(2.0 * d) - N(-2.0 * d))) / (12.0 * d);

  const int n = p.pv_nodes | 1;
  const double h = 2.0 * p.y_max / (n - 1);
  Complex acc{};
  for (int j = 0; j < n; ++j) {
    const double y = -p.y_max + h * j;
    const double w = (j == 0 || j == n - 1) ? 0.5 * h : h;
    const Complex val = (j == (n - 1) / 2)
                            ? n_prime0 / (2.0 * kPi)
                            : (N(y) - n0) / (2.0 * std::sinh(kPi * y));
    acc += w * val;
  }
  return acc - 0.5 * ctx.fm(lam + 2.0) / (lam * (lam + 1.0));
}

QContext make_context(const SourceTerm& f, const SolverParams& p) {
  QContext ctx{p, {}, std::log(p.kappa0() * kPi)};
  ctx.fm = [&f](Complex s) { return f.mellin(s); };
  return ctx;
}

}  // namespace

Complex q_tilde_pv(Complex lam, const SourceTerm& f, const SolverParams& p,
                   KCache& cache) {
  const double span = std::abs(lam.imag()) + p.y_max + 2.0;
  const KLineTable& kt = cache.line(lam.real() + 1.0, span);
  QContext ctx = make_context(f, p);
  return q_tilde_pv_impl(lam, ctx, kt.eval(lam.imag()), kt);
}

Complex q_tilde_contour(Complex lam, const SourceTerm& f,
                        const SolverParams& p, KCache& cache, double eps) {
  if (!(eps > 0.0 && eps < 0.5))
    throw DomainError("q_tilde_contour: eps outside (0, 1/2)");
  const double span = std::abs(lam.imag()) + p.y_max + 2.0;
  const KLineTable& kt = cache.line(lam.real() + 1.0, span);
  QContext ctx = make_context(f, p);
  const Complex k_lam1 = kt.eval(lam.imag());

  // f~(lam+zeta+2)/(lam+zeta+1) is singular at zeta = -(1+lam) unless the
  // compatibility zero of f~ at s = 1 cancels it.
  if (std::abs(std::abs(1.0 + lam) - eps) < 1e-3 &&
      std::abs(ctx.fm(Complex(1.0, 0.0))) > 1e-6)
    throw ContourPoleClash(
        "q_tilde_contour: integrand pole on the contour (change eps)");

  Complex acc{};
  const int panels = std::max(8, static_cast<int>((p.y_max - eps) / 0.5));
  for (int side = 0; side < 2; ++side) {
    const double a = side ? eps : -p.y_max;
    const double b = side ? p.y_max : -eps;
    const double w = (b - a) / panels;
    for (int q = 0; q < panels; ++q) {
      acc += gl_integrate_c(
          [&](double y) {
            const Complex zeta(0.0, y);
            return rep_integrand(ctx, lam, k_lam1, zeta,
                                 kt.eval(lam.imag() + y)) *
                   kI;
          },
          a + q * w, a + (q + 1) * w, 12);
    }
  }
  acc += gl_integrate_c(
      [&](double u) {
        const double phi = -0.5 * kPi - kPi * u;
        const Complex zeta = eps * std::exp(kI * phi);
        const Complex k_arc = k_product(lam + zeta + 1.0).value;
        return rep_integrand(ctx, lam, k_lam1, zeta, k_arc) *
               (zeta * kI * (-kPi));
      },
      0.0, 1.0, 32);
  return acc;
}

std::pair<Complex, Complex> q_split(Complex lam, const SourceTerm& f,
                                    const SolverParams& p, KCache& cache) {
  const double span = std::abs(lam.imag()) + p.y_max + 2.0;
  const KLineTable& kt = cache.line(lam.real() + 1.0, span);
  const KLineTable& kt_theta = cache.line(lam.real() + 1.0 + p.vartheta, span);
  QContext ctx = make_context(f, p);
  const Complex k_lam1 = kt.eval(lam.imag());

  // Residue term of moving the contour from the indented axis to Re zeta =
  // vartheta; enters with a minus sign (the line lies right of the pole,
  // matching the sign of the half-residue term in the PV route).
  const Complex q1 = -ctx.fm(lam + 2.0) / (lam * (lam + 1.0));
  const int n = p.pv_nodes | 1;
  const double h = 2.0 * p.y_max / (n - 1);
  Complex q2{};
  for (int j = 0; j < n; ++j) {
    const double y = -p.y_max + h * j;
    const double w = (j == 0 || j == n - 1) ? 0.5 * h : h;
    const Complex zeta(p.vartheta, y);
    q2 += w *
          rep_integrand(ctx, lam, k_lam1, zeta, kt_theta.eval(lam.imag() + y)) *
          kI;
  }
  return {q1, q2};
}

SpectralFunction q_tilde_line(const SourceTerm& f, const SolverParams& p,
                              KCache& cache) {
  p.validate();
  VerticalLine line(p.inversion_line_re, p.line_im_max, p.line_nodes);
  const double span = p.line_im_max + p.y_max + 2.0;
  const KLineTable& kt = cache.line(p.inversion_line_re + 1.0, span);
  QContext ctx = make_context(f, p);
  const auto& t = line.nodes();
  std::vector<Complex> vals(t.size());
  parallel_for(t.size(), [&](std::size_t j) {
    const Complex lam(p.inversion_line_re, t[j]);
    vals[j] = q_tilde_pv_impl(lam, ctx, kt.eval(t[j]), kt);
  });
  return SpectralFunction(std::move(line), std::move(vals), Strip(-1.0, -0.5));
}

double difference_equation_residual(Complex lam, const SourceTerm& f,
                                    const SolverParams& p, KCache& cache) {
  const Complex q_lam = q_tilde_pv(lam, f, p, cache);
  const Complex q_lam1 = q_tilde_pv(lam + 1.0, f, p, cache);
  const Complex tp = tan_pi_stable(lam);  // tan(pi .) is 1-periodic
  const Complex rhs = -f.mellin(lam + 2.0) / (lam + 1.0);
  const Complex lhs =
      p.kappa0() * q_lam1 * tp + omega(lam).value * q_lam * tp;
  return std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
}

Complex tan_pi_stable(Complex lam) {
  if (lam.imag() < 0.0) return std::conj(tan_pi_stable(std::conj(lam)));
  const Complex e = std::exp(2.0 * kI * kPi * lam);  // |e| <= 1
  return -kI * (e - 1.0) / (e + 1.0);
}

Complex angular_factor(Complex lam, double theta, int m) {
  if (lam.imag() < 0.0)
    return std::conj(angular_factor(std::conj(lam), theta, m));
  // cos(lam theta)/cos(pi lam), sin(lam theta)/cos(pi lam) through the
  // dominant-exponential factorization; all moduli <= 1 for |theta| <= pi.
  const Complex e1 = std::exp(kI * lam * (theta + kPi));
  const Complex e2 = std::exp(kI * lam * (kPi - theta));
  const Complex den = 1.0 + std::exp(2.0 * kI * kPi * lam);
  const Complex cr = (e1 + e2) / den;
  const Complex sr = -kI * (e1 - e2) / den;
  Complex powl{1.0, 0.0};
  for (int i = 0; i < m; ++i) powl *= lam;
  switch (m % 4) {
    case 0: return powl * cr;
    case 1: return -powl * sr;
    case 2: return -powl * cr;
    default: return powl * sr;
  }
}

std::vector<double> GridSpec::r_nodes() const {
  std::vector<double> r(n_r);
  const double l0 = std::log(r_min), l1 = std::log(r_max);
  for (int i = 0; i < n_r; ++i)
    r[i] = std::exp(l0 + (l1 - l0) * i / (n_r - 1.0));
  return r;
}

std::vector<double> GridSpec::theta_nodes() const {
  std::vector<double> th(n_theta);
  for (int j = 0; j < n_theta; ++j)
    th[j] = -kPi + 2.0 * kPi * j / (n_theta - 1.0);
  return th;
}

std::vector<double> inverse_on_grid(const SpectralFunction& g,
                                    const std::vector<double>& r, double shift,
                                    const std::function<Complex(Complex)>& mult,
                                    double* imag_leak) {
  const auto& t = g.line.nodes();
  const auto& w = g.line.weights();
  const double c = g.line.re;
  std::vector<Complex> weighted(t.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    const Complex lam(c, t[j]);
    weighted[j] = w[j] * g.values[j] * (mult ? mult(lam) : Complex{1.0, 0.0});
  }
  std::vector<double> out(r.size());
  std::vector<double> leaks(r.size(), 0.0);
  parallel_for(r.size(), [&](std::size_t i) {
    const double lr = std::log(r[i]);
    Complex acc{};
    for (std::size_t j = 0; j < t.size(); ++j)
      acc += weighted[j] * Complex(std::cos(t[j] * lr), -std::sin(t[j] * lr));
    acc *= std::pow(r[i], -c - shift) / (2.0 * kPi);
    out[i] = acc.real();
    leaks[i] = std::abs(acc.imag()) / (1.0 + std::abs(acc.real()));
  });
  if (imag_leak)
    for (double v : leaks) *imag_leak = std::max(*imag_leak, v);
  return out;
}

std::vector<double> reconstruct_field(const SpectralFunction& q_tilde,
                                      const std::vector<double>& r,
                                      const std::vector<double>& theta,
                                      int euler_order, int theta_order,
                                      double* imag_leak) {
  const auto& t = q_tilde.line.nodes();
  const auto& w = q_tilde.line.weights();
  const double c = q_tilde.line.re;
  const Eigen::Index nr = static_cast<Eigen::Index>(r.size());
  const Eigen::Index nn = static_cast<Eigen::Index>(t.size());
  const Eigen::Index nt = static_cast<Eigen::Index>(theta.size());

  Eigen::MatrixXcd A(nr, nn);
  parallel_for(static_cast<std::size_t>(nr), [&](std::size_t i) {
    const double lr = std::log(r[i]);
    const double rc = std::pow(r[i], -c) / (2.0 * kPi);
    for (Eigen::Index j = 0; j < nn; ++j)
      A(static_cast<Eigen::Index>(i), j) =
          rc * w[j] * Complex(std::cos(t[j] * lr), -std::sin(t[j] * lr));
  });
  Eigen::MatrixXcd B(nn, nt);
  parallel_for(static_cast<std::size_t>(nn), [&](std::size_t j) {
    const Complex lam(c, t[j]);
    Complex pw{1.0, 0.0};
    for (int i = 0; i < euler_order; ++i) pw *= -lam;
    const Complex base = q_tilde.values[j] * pw;
    for (Eigen::Index l = 0; l < nt; ++l)
      B(static_cast<Eigen::Index>(j), l) =
          base * angular_factor(lam, theta[static_cast<std::size_t>(l)],
                                theta_order);
  });
  Eigen::MatrixXcd P = A * B;
  std::vector<double> out(static_cast<std::size_t>(nr * nt));
  double leak = 0.0;
  for (Eigen::Index i = 0; i < nr; ++i)
    for (Eigen::Index l = 0; l < nt; ++l) {
      const Complex v = P(i, l);
      out[static_cast<std::size_t>(i * nt + l)] = v.real();
      leak = std::max(leak, std::abs(v.imag()) / (1.0 + std::abs(v.real())));
    }
  if (imag_leak) *imag_leak = std::max(*imag_leak, leak);
  return out;
}

double tip_mode_field(double c, int l, int m, double r, double theta) {
  const double radial = c * std::pow(0.5, l) * std::sqrt(r);
  const double arg = 0.5 * theta;
  const double ang = std::pow(0.5, m);
  switch (m % 4) {
    case 0: return radial * ang * std::cos(arg);
    case 1: return -radial * ang * std::sin(arg);
    case 2: return -radial * ang * std::cos(arg);
    default: return radial * ang * std::sin(arg);
  }
}

SolutionBundle solve(const SourceTerm& f, const SolverParams& p,
                     const GridSpec& grid) {
  p.validate();
  validate_compatibility(f);

  KCache cache;
  SolutionBundle out{p,      q_tilde_line(f, p, cache),
                     grid.r_nodes(),
                     {},     {},
                     {},     {},
                     grid.theta_nodes(),
                     {},     {},
                     {},     {},
                     {},     0.0,
                     {}};

  const SpectralFunction& qt = out.q_tilde;
  double scale = 0.0;
  for (const Complex& v : qt.values) scale = std::max(scale, std::abs(v));
  out.diag.line_tail =
      scale > 0.0
          ? std::max(std::abs(qt.values.front()), std::abs(qt.values.back())) /
                scale
          : 0.0;

  out.q = inverse_on_grid(qt, out.r, 0.0, nullptr, &out.diag.imag_leak);
  out.q_prime = inverse_on_grid(
      qt, out.r, 1.0, [](Complex lam) { return -lam; }, &out.diag.imag_leak);
  out.q_second = inverse_on_grid(
      qt, out.r, 2.0, [](Complex lam) { return lam * (lam + 1.0); },
      &out.diag.imag_leak);

  // Residue part q1~ = -f~(lam+2)/(lam(lam+1)); its derivative is the
  // running integral of f (q1'(r) = int_r^inf f dt).
  {
    std::vector<Complex> q1(qt.values.size());
    const auto& t = qt.line.nodes();
    for (std::size_t j = 0; j < q1.size(); ++j) {
      const Complex lam(qt.line.re, t[j]);
      q1[j] = -f.mellin(lam + 2.0) / (lam * (lam + 1.0));
    }
    SpectralFunction q1f(qt.line, std::move(q1), qt.strip);
    out.q1_prime = inverse_on_grid(
        q1f, out.r, 1.0, [](Complex lam) { return -lam; },
        &out.diag.imag_leak);
  }

  // Tip-mode amplitude from q~ at -1/2 (real by conjugate symmetry).
  {
    const Complex q_half = q_tilde_pv(Complex(-0.5, 0.0), f, p, cache);
    out.tip_mode_c = q_half.real() / kPi;
    out.diag.imag_leak = std::max(
        out.diag.imag_leak, std::abs(q_half.imag()) / (1.0 + std::abs(q_half)));
  }

  out.p = reconstruct_field(qt, out.r, out.theta, 0, 0, &out.diag.imag_leak);
  const std::size_t ntheta = out.theta.size();
  for (std::size_t i = 0; i < out.r.size(); ++i)
    for (std::size_t l = 0; l < ntheta; ++l)
      out.p[i * ntheta + l] +=
          tip_mode_field(out.tip_mode_c, 0, 0, out.r[i], out.theta[l]);

  out.p_trace_plus = inverse_on_grid(
      qt, out.r, 0.0, [](Complex lam) { return angular_factor(lam, kPi, 0); },
      &out.diag.imag_leak);
  out.p_trace_minus = inverse_on_grid(
      qt, out.r, 0.0,
      [](Complex lam) { return angular_factor(lam, -kPi, 0); },
      &out.diag.imag_leak);
  out.ptheta_plus = inverse_on_grid(
      qt, out.r, 0.0, [](Complex lam) { return angular_factor(lam, kPi, 1); },
      &out.diag.imag_leak);
  out.ptheta_minus = inverse_on_grid(
      qt, out.r, 0.0,
      [](Complex lam) { return angular_factor(lam, -kPi, 1); },
      &out.diag.imag_leak);
  for (std::size_t i = 0; i < out.r.size(); ++i) {
    out.ptheta_plus[i] += tip_mode_field(out.tip_mode_c, 0, 1, out.r[i], kPi);
    out.ptheta_minus[i] +=
        tip_mode_field(out.tip_mode_c, 0, 1, out.r[i], -kPi);
  }

  double qmax = 0.0, pmax = 0.0;
  for (double v : out.q) qmax = std::max(qmax, std::abs(v));
  for (double v : out.p) pmax = std::max(pmax, std::abs(v));
  out.diag.decay_q = qmax > 0 ? std::abs(out.q.back()) / qmax : 0.0;
  double p_outer = 0.0;
  const std::size_t nth = out.theta.size();
  for (std::size_t l = 0; l < nth; ++l)
    p_outer = std::max(p_outer, std::abs(out.p[(out.r.size() - 1) * nth + l]));
  out.diag.decay_p = pmax > 0 ? p_outer / pmax : 0.0;
  return out;
}

}  // namespace crack
