#include "crack/mellin.hpp"

#include <algorithm>
#include <cmath>

#include "crack/quadrature.hpp"
#include "crack/util.hpp"

namespace crack {

VerticalLine::VerticalLine(double re_, double im_max_, int n_nodes_, Rule rule_)
    : re(re_), im_max(im_max_), n_nodes(n_nodes_), rule(rule_) {
  if (!(im_max > 0.0)) throw DomainError("VerticalLine: im_max must be > 0");
  if (n_nodes < 16) throw DomainError("VerticalLine: need at least 16 nodes");
  if (rule == Rule::kTrapezoid) {
    nodes_.resize(n_nodes);
    weights_.resize(n_nodes);
    const double h = 2.0 * im_max / (n_nodes - 1);
    for (int j = 0; j < n_nodes; ++j) {
      nodes_[j] = -im_max + h * j;
      weights_[j] = (j == 0 || j == n_nodes - 1) ? 0.5 * h : h;
    }
    // Enforce exact mirror symmetry of the grid.
    for (int j = 0; j < n_nodes / 2; ++j) nodes_[n_nodes - 1 - j] = -nodes_[j];
    if (n_nodes % 2 == 1) nodes_[n_nodes / 2] = 0.0;
  } else {
    const int per_panel = 16;
    const int n_panels = std::max(2, n_nodes / per_panel);
    const GaussLegendre& gl = gauss_legendre(per_panel);
    const double w = 2.0 * im_max / n_panels;
    for (int p = 0; p < n_panels; ++p) {
      const double a = -im_max + p * w;
      for (int i = 0; i < per_panel; ++i) {
        nodes_.push_back(a + 0.5 * w * (1.0 + gl.x[i]));
        weights_.push_back(0.5 * w * gl.w[i]);
      }
    }
  }
}

SpectralFunction::SpectralFunction(VerticalLine l, std::vector<Complex> v,
                                   Strip s)
    : line(std::move(l)), values(std::move(v)), strip(s) {
  if (values.size() != line.nodes().size())
    throw DomainError("SpectralFunction: values/nodes size mismatch");
}

double SpectralFunction::conjugate_asymmetry() const {
  const auto& t = line.nodes();
  double scale = 0.0;
  for (const Complex& v : values) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  const std::size_t n = values.size();
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t m = n - 1 - j;
    if (std::abs(t[j] + t[m]) > 1e-12) continue;  // non-mirrored grid
    worst = std::max(worst, std::abs(values[j] - std::conj(values[m])));
  }
  return worst / scale;
}

NormParams::NormParams(int k_, double mu_) : k(k_), mu(mu_) {
  if (k < 0) throw DomainError("NormParams: k must be >= 0");
}

Complex mellin_point(const PhysicalFunction& h, Complex s, double tol) {
  // (0, 1]: direct; [1, inf): r = 1/v.
  auto low = tanh_sinh_c(
      [&](double r) { return std::exp((s - 1.0) * std::log(r)) * h(r); }, 0.0,
      1.0, tol);
  auto high = tanh_sinh_c(
      [&](double v) { return std::exp((-s - 1.0) * std::log(v)) * h(1.0 / v); },
      0.0, 1.0, tol);
  Complex val = low.value + high.value;
  double err = low.est_abs_err + high.est_abs_err;
  if (!std::isfinite(std::abs(val)) || err > 1e-3 * (1.0 + std::abs(val)))
    throw DivergentTransform("mellin_point: quadrature failed to converge");
  return val;
}

SpectralFunction forward_mellin(const PhysicalFunction& h,
                                const VerticalLine& line) {
  if (!h.strip.contains(line.re))
    throw DivergentTransform(
        "forward_mellin: line abscissa outside the convergence strip");
  const auto& t = line.nodes();
  std::vector<Complex> vals(t.size());
  if (h.mellin_closed_form) {
    for (std::size_t j = 0; j < t.size(); ++j)
      vals[j] = h.mellin_closed_form(Complex(line.re, t[j]));
  } else {
    parallel_for(t.size(), [&](std::size_t j) {
      vals[j] = mellin_point(h, Complex(line.re, t[j]), 1e-10);
    });
  }
  return SpectralFunction(line, std::move(vals), h.strip);
}

Complex inverse_mellin(const SpectralFunction& g, double r, double tail_tol) {
  if (!(r > 0.0)) throw DomainError("inverse_mellin: r must be positive");
  const auto& t = g.line.nodes();
  const auto& w = g.line.weights();
  double scale = 0.0;
  for (const Complex& v : g.values) scale = std::max(scale, std::abs(v));
  if (scale > 0.0) {
    double edge =
        std::max(std::abs(g.values.front()), std::abs(g.values.back()));
    if (edge > tail_tol * scale)
      throw TailTooFat(
          "inverse_mellin: spectral values not decayed at the line ends");
  }
  const double lr = std::log(r);
  Complex acc{};
  for (std::size_t j = 0; j < t.size(); ++j)
    acc +=
        w[j] * g.values[j] * Complex(std::cos(t[j] * lr), -std::sin(t[j] * lr));
  return acc * std::pow(r, -g.line.re) / (2.0 * kPi);
}

double parseval_norm(const SpectralFunction& g, double a) {
  if (std::abs(g.line.re - a) > 1e-12)
    throw LineMismatch("parseval_norm: spectral data on a different line");
  const auto& w = g.line.weights();
  double acc = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j)
    acc += w[j] * std::norm(g.values[j]);
  return acc / (2.0 * kPi);
}

Complex mellin_convolve(const PhysicalFunction& h, const PhysicalFunction& g,
                        double r, const VerticalLine& line) {
  if (!h.strip.contains(line.re) || !g.strip.contains(line.re))
    throw DivergentTransform(
        "mellin_convolve: line outside the common convergence strip");
  SpectralFunction ht = forward_mellin(h, line);
  SpectralFunction gt = forward_mellin(g, line);
  std::vector<Complex> prod(ht.values.size());
  for (std::size_t j = 0; j < prod.size(); ++j)
    prod[j] = ht.values[j] * gt.values[j];
  SpectralFunction pg(line, std::move(prod),
                      Strip(std::max(h.strip.re_min, g.strip.re_min),
                            std::min(h.strip.re_max, g.strip.re_max)));
  return inverse_mellin(pg, r, 1e-6);
}

SpectralFunction derivative_transform(const SpectralFunction& g, int k) {
  if (k < 0) throw DomainError("derivative_transform: k must be >= 0");
  if (!g.strip.contains(g.line.re))
    throw StripViolation("derivative_transform: line outside validity strip");
  if (k == 0) return g;
  VerticalLine shifted(g.line.re + k, g.line.im_max, g.line.n_nodes,
                       g.line.rule);
  std::vector<Complex> vals(g.values.size());
  for (std::size_t j = 0; j < vals.size(); ++j) {
    const Complex s(shifted.re, shifted.nodes()[j]);
    Complex factor{1.0, 0.0};
    for (int i = 1; i <= k; ++i) factor *= (s - static_cast<double>(i));
    if (k % 2 == 1) factor = -factor;
    vals[j] = factor * g.values[j];
  }
  return SpectralFunction(std::move(shifted), std::move(vals),
                          Strip(g.strip.re_min + k, g.strip.re_max + k));
}

SpectralFunction euler_derivative_transform(const SpectralFunction& g, int k) {
  if (k < 0) throw DomainError("euler_derivative_transform: k must be >= 0");
  if (!g.strip.contains(g.line.re))
    throw StripViolation(
        "euler_derivative_transform: line outside validity strip");
  std::vector<Complex> vals(g.values.size());
  for (std::size_t j = 0; j < vals.size(); ++j) {
    const Complex s(g.line.re, g.line.nodes()[j]);
    Complex factor{1.0, 0.0};
    for (int i = 0; i < k; ++i) factor *= -s;
    vals[j] = factor * g.values[j];
  }
  return SpectralFunction(g.line, std::move(vals), g.strip);
}

double half_norm_spectral(const SpectralFunction& g, const NormParams& p) {
  if (std::abs(g.line.re - (p.mu - p.k)) > 1e-12)
    throw LineMismatch("half_norm_spectral: line must sit at Re s = mu - k");
  const auto& t = g.line.nodes();
  const auto& w = g.line.weights();
  double acc = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double mod_s = std::hypot(g.line.re, t[j]);
    acc += w[j] * std::norm(g.values[j]) *
           std::pow(1.0 + mod_s, 2.0 * p.k + 1.0);
  }
  return std::sqrt(acc);
}

namespace {

// d^l h / dr^l: analytic when available, Richardson central FD otherwise.
double radial_derivative(const PhysicalFunction& h, int l, double r,
                         double* err_out) {
  if (static_cast<int>(h.derivs.size()) > l && h.derivs[l])
    return h.derivs[l](r);
  if (l == 0) return h(r);
  const double step = 5e-3 * (1.0 + r);
  auto central = [&](double hh) {
    std::vector<double> v(l + 1);
    for (int i = 0; i <= l; ++i) v[i] = h(r + (i - 0.5 * l) * hh);
    for (int d = 0; d < l; ++d)
      for (int i = 0; i < l - d; ++i) v[i] = (v[i + 1] - v[i]) / hh;
    return v[0];
  };
  const double d1 = central(step);
  const double d2 = central(0.5 * step);
  if (err_out) *err_out = std::max(*err_out, std::abs(d2 - d1) / 3.0);
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace

double half_norm_physical(const PhysicalFunction& h, const NormParams& p) {
  double fd_err = 0.0;
  double acc = 0.0;
  for (int l = 0; l <= p.k; ++l) {
    const double expo = 2.0 * (p.mu - p.k + l) - 1.0;
    auto integrand = [&](double r) {
      const double d = radial_derivative(h, l, r, &fd_err);
      return std::pow(r, expo) * d * d;
    };
    acc += tanh_sinh(integrand, 0.0, 1.0, 1e-10).value;
    acc += integrate_to_inf(integrand, 1.0, 1e-10).value;
  }
  // Half-order difference seminorm with the inner substitution rho = r u.
  auto inner = [&](double r) {
    const double hk_r = radial_derivative(h, p.k, r, &fd_err);
    auto g = [&](double u) {
      const double d = radial_derivative(h, p.k, r * (1.0 + u), nullptr) - hk_r;
      return d * d / (u * u);
    };
    return std::pow(r, 2.0 * p.mu - 1.0) * gl_integrate(g, 0.0, 1.0, 64);
  };
  acc += tanh_sinh(inner, 0.0, 1.0, 1e-9).value;
  acc += integrate_to_inf(inner, 1.0, 1e-9).value;
  const double norm = std::sqrt(std::max(0.0, acc));
  if (fd_err > 0.1 * (norm + 1e-300))
    throw GridTooCoarse(
        "half_norm_physical: finite-difference error estimate too large");
  return norm;
}

std::pair<double, double> weighted_norm_polar(
    const std::function<double(int l, int m, double r, double theta)>& field,
    int k, double mu, const PolarNormGrid& grid) {
  const int nr = grid.n_r, nt = grid.n_theta;
  if (nr < 8 || nt < 8)
    throw GridTooCoarse("weighted_norm_polar: grid too small");
  const double xi0 = std::log(grid.r_min), xi1 = std::log(grid.r_max);
  const double dxi = (xi1 - xi0) / (nr - 1);
  const double dth = 2.0 * kPi / (nt - 1);
  std::vector<double> radial(nr, 0.0);
  parallel_for(static_cast<std::size_t>(nr), [&](std::size_t i) {
    const double r = std::exp(xi0 + dxi * static_cast<double>(i));
    double sum = 0.0;
    for (int j = 0; j < nt; ++j) {
      const double th = -kPi + dth * j;
      const double wt = (j == 0 || j == nt - 1) ? 0.5 : 1.0;
      double point = 0.0;
      for (int l = 0; l <= k; ++l)
        for (int m = 0; m <= k - l; ++m) {
          const double v = field(l, m, r, th);
          point += v * v;
        }
      sum += wt * point;
    }
    // extra r from dr = r dxi
    radial[i] = std::pow(r, 2.0 * (mu - k) + 1.0) * sum * dth * r;
  });
  double total = 0.0;
  for (int i = 0; i < nr; ++i)
    total += radial[i] * ((i == 0 || i == nr - 1) ? 0.5 : 1.0) * dxi;

  // Power-law estimates for the mass outside the truncated r-range.
  auto end_fraction = [&](bool outer) {
    const int i1 = outer ? nr - 1 : 0;
    const int i0 = outer ? nr - 1 - nr / 10 : nr / 10;
    const double f1 = radial[i1], f0 = radial[i0];
    if (f1 <= 0.0 || f0 <= 0.0) return 0.0;
    const double p = std::log(f1 / f0) / (dxi * (i1 - i0));
    if ((outer && p >= -0.05) || (!outer && p <= 0.05)) return 1.0;
    return f1 / std::abs(p) / std::max(total, 1e-300);
  };
  const double tail = std::max(end_fraction(true), end_fraction(false));
  return {std::sqrt(std::max(0.0, total)), tail};
}

}  // namespace crack
