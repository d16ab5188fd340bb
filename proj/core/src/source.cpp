#include "crack/source.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

#include "crack/quadrature.hpp"
#include "crack/special.hpp"
#include "crack/util.hpp"

namespace crack {

namespace {

// One side of the built-in family: amp * r^(a-1) e^(-br), with derivatives
// generated from the (coefficient, power) representation.
struct GammaTerm {
  double amp, a, b;

  double eval_deriv(int order, double r) const {
    // d/dr maps (c, p) -> (c p, p-1), (-c b, p).
    std::vector<std::pair<double, double>> terms{{amp, a - 1.0}};
    for (int d = 0; d < order; ++d) {
      std::vector<std::pair<double, double>> next;
      for (auto [c, p] : terms) {
        if (p != 0.0) next.emplace_back(c * p, p - 1.0);
        next.emplace_back(-c * b, p);
      }
      terms = std::move(next);
    }
    double acc = 0.0;
    for (auto [c, p] : terms) acc += c * std::pow(r, p);
    return acc * std::exp(-b * r);
  }

  Complex mellin(Complex s) const {
    // amp * Gamma(s+a-1) b^(-(s+a-1))
    const Complex w = s + (a - 1.0);
    return amp * std::exp(log_gamma(w) - w * std::log(b));
  }
};

}  // namespace

SourceTerm make_gamma_pair(double a, double b, double c, double d) {
  if (!(a > 0) || !(b > 0) || !(c > 0) || !(d > 0))
    throw DomainError("make_gamma_pair: all parameters must be positive");
  if (a == c && b == d)
    throw DegenerateFamily("make_gamma_pair: the two terms coincide");
  // A Gamma(a) b^-a = B Gamma(c) d^-c = 1 makes the mean vanish.
  const double amp_a = std::pow(b, a) / std::exp(std::lgamma(a));
  const double amp_b = std::pow(d, c) / std::exp(std::lgamma(c));
  GammaTerm t1{amp_a, a, b}, t2{amp_b, c, d};

  SourceTerm f;
  f.a = a;
  f.b = b;
  f.c = c;
  f.d = d;
  f.amp_a = amp_a;
  f.amp_b = amp_b;
  f.provenance = SourceTerm::Provenance::kClosedForm;
  for (int order = 0; order <= 5; ++order) {
    f.fn.derivs.push_back([t1, t2, order](double r) {
      return t1.eval_deriv(order, r) - t2.eval_deriv(order, r);
    });
  }
  f.fn.mellin_closed_form = [t1, t2](Complex s) {
    return t1.mellin(s) - t2.mellin(s);
  };
  f.fn.strip = Strip(1.0 - std::min(a, c), 1e300);
  return f;
}

SourceTerm combine(const SourceTerm& f, const SourceTerm& g, double cf,
                   double cg) {
  if (!f.fn.mellin_closed_form || !g.fn.mellin_closed_form)
    throw DomainError("combine: closed-form transforms required");
  SourceTerm out;
  out.provenance = SourceTerm::Provenance::kClosedForm;
  const std::size_t n = std::min(f.fn.derivs.size(), g.fn.derivs.size());
  for (std::size_t l = 0; l < n; ++l) {
    auto fl = f.fn.derivs[l];
    auto gl = g.fn.derivs[l];
    out.fn.derivs.push_back(
        [fl, gl, cf, cg](double r) { return cf * fl(r) + cg * gl(r); });
  }
  auto fm = f.fn.mellin_closed_form;
  auto gm = g.fn.mellin_closed_form;
  out.fn.mellin_closed_form = [fm, gm, cf, cg](Complex s) {
    return cf * fm(s) + cg * gm(s);
  };
  out.fn.strip = Strip(std::max(f.strip().re_min, g.strip().re_min),
                       std::min(f.strip().re_max, g.strip().re_max));
  return out;
}

double validate_compatibility(const SourceTerm& f, double compat_tol) {
  auto abs_f = [&](double r) { return std::abs(f(r)); };
  auto val_f = [&](double r) { return f(r); };
  QuadResult lo = tanh_sinh(val_f, 0.0, 1.0, 1e-11);
  QuadResult hi = integrate_to_inf(val_f, 1.0, 1e-11);
  QuadResult alo = tanh_sinh(abs_f, 0.0, 1.0, 1e-9);
  QuadResult ahi = integrate_to_inf(abs_f, 1.0, 1e-9);
  const double integral = lo.value + hi.value;
  const double l1 = alo.value + ahi.value;
  if (!std::isfinite(integral) || !std::isfinite(l1) || l1 <= 0.0)
    throw NonIntegrable("validate_compatibility: integral did not converge");
  if (std::abs(integral) > compat_tol * l1)
    throw NonIntegrable("validate_compatibility: nonzero mean " +
                        format_g17(integral) + " exceeds tolerance " +
                        format_g17(compat_tol * l1));
  return integral;
}

namespace {

// Steffen's monotone cubic interpolant.
struct MonotoneCubic {
  std::vector<double> x, y, dydx;

  void build() {
    const std::size_t n = x.size();
    dydx.assign(n, 0.0);
    if (n < 3) {
      double s = (y[1] - y[0]) / (x[1] - x[0]);
      dydx[0] = dydx[1] = s;
      return;
    }
    std::vector<double> h(n - 1), s(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x[i + 1] - x[i];
      s[i] = (y[i + 1] - y[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double p = (s[i - 1] * h[i] + s[i] * h[i - 1]) / (h[i - 1] + h[i]);
      const double sgn =
          (s[i - 1] > 0 ? 1.0 : (s[i - 1] < 0 ? -1.0 : 0.0)) +
          (s[i] > 0 ? 1.0 : (s[i] < 0 ? -1.0 : 0.0));
      dydx[i] = 0.5 * sgn *
                std::min({std::abs(s[i - 1]), std::abs(s[i]),
                          0.5 * std::abs(p)});
    }
    dydx[0] = 1.5 * s[0] - 0.5 * dydx[1];
    if (dydx[0] * s[0] <= 0.0)
      dydx[0] = 0.0;
    else if (std::abs(dydx[0]) > 2.0 * std::abs(s[0]))
      dydx[0] = 2.0 * s[0];
    dydx[n - 1] = 1.5 * s[n - 2] - 0.5 * dydx[n - 2];
    if (dydx[n - 1] * s[n - 2] <= 0.0)
      dydx[n - 1] = 0.0;
    else if (std::abs(dydx[n - 1]) > 2.0 * std::abs(s[n - 2]))
      dydx[n - 1] = 2.0 * s[n - 2];
  }

  double eval(double xx) const {
    const std::size_t n = x.size();
    if (xx <= x.front()) return y.front();
    if (xx >= x.back()) return y.back();
    std::size_t lo = 0, hi = n - 1;
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      (x[mid] <= xx ? lo : hi) = mid;
    }
    const double h = x[lo + 1] - x[lo];
    const double t = (xx - x[lo]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return y[lo] * (2 * t3 - 3 * t2 + 1) + h * dydx[lo] * (t3 - 2 * t2 + t) +
           y[lo + 1] * (-2 * t3 + 3 * t2) + h * dydx[lo + 1] * (t3 - t2);
  }
};

}  // namespace

SourceTerm load_sampled(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("load_sampled: cannot open " + path);
  auto grid = std::make_shared<MonotoneCubic>();
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!header_seen) {
      std::string squashed;
      for (char ch : t)
        if (!std::isspace(static_cast<unsigned char>(ch))) squashed += ch;
      if (squashed != "r,f")
        throw FormatError("load_sampled: expected header 'r,f', got '" + t +
                          "'");
      header_seen = true;
      continue;
    }
    auto cells = split(t, ',');
    if (cells.size() != 2)
      throw FormatError("load_sampled: malformed row '" + t + "'");
    char* end = nullptr;
    const double r = std::strtod(cells[0].c_str(), &end);
    const double v = std::strtod(cells[1].c_str(), &end);
    if (!std::isfinite(r) || !std::isfinite(v))
      throw FormatError("load_sampled: non-finite value in row '" + t + "'");
    if (!grid->x.empty() && r <= grid->x.back())
      throw NonMonotoneGrid("load_sampled: r column must strictly increase");
    grid->x.push_back(r);
    grid->y.push_back(v);
  }
  if (!header_seen || grid->x.size() < 8)
    throw FormatError("load_sampled: need a header and at least 8 rows");
  grid->build();

  // Exponential tail ln|f| ~ ln C - g r fitted over the last decade.
  const double r_last = grid->x.back();
  double sxx = 0, sx = 0, sy = 0, sxy = 0;
  int m = 0;
  double sign = 0.0;
  for (std::size_t i = 0; i < grid->x.size(); ++i) {
    if (grid->x[i] < 0.1 * r_last) continue;
    if (grid->y[i] == 0.0) continue;
    const double s = grid->y[i] > 0 ? 1.0 : -1.0;
    if (sign == 0.0) sign = s;
    if (s != sign)
      throw TailFitFailure("load_sampled: sign change in the fit window");
    const double lx = grid->x[i], ly = std::log(std::abs(grid->y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 4) throw TailFitFailure("load_sampled: too few points for tail fit");
  const double denom = m * sxx - sx * sx;
  const double slope = (m * sxy - sx * sy) / denom;
  const double inter = (sy - slope * sx) / m;
  if (!(slope < 0.0))
    throw TailFitFailure("load_sampled: fitted tail does not decay");
  const double tail_gamma = -slope;
  const double tail_c = sign * std::exp(inter);

  SourceTerm f;
  f.provenance = SourceTerm::Provenance::kSampled;
  const double r0 = grid->x.front();
  auto eval = [grid, tail_c, tail_gamma, r_last](double r) {
    if (r >= r_last) return tail_c * std::exp(-tail_gamma * r);
    return grid->eval(r);
  };
  f.fn.derivs = {eval};
  f.fn.strip = Strip(std::max(0.0, 1.0 - 1.0), 1e300);  // Re s > 0
  f.fn.mellin_closed_form = [grid, eval, tail_c, tail_gamma, r0,
                             r_last](Complex s) {
    // head: constant extension below the first sample
    Complex head = grid->y.front() * std::exp(s * std::log(r0)) / s;
    Complex mid = tanh_sinh_c(
                      [&](double r) {
                        return std::exp((s - 1.0) * std::log(r)) * grid->eval(r);
                      },
                      r0, r_last, 1e-10)
                      .value;
    Complex tail = integrate_to_inf_c(
                       [&](double r) {
                         return std::exp((s - 1.0) * std::log(r)) * tail_c *
                                std::exp(-tail_gamma * r);
                       },
                       r_last, 1e-12)
                       .value;
    return head + mid + tail;
  };
  return f;
}

}  // namespace crack
