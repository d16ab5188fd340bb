#include "crack/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace crack {

namespace {

// Abscissa/weight of the tanh-sinh map at t: x = tanh(pi/2 sinh t),
// dx/dt = (pi/2) cosh t / cosh^2((pi/2) sinh t).
struct TsNode {
  double x;
  double w;
};

TsNode ts_node(double t) {
  const double st = std::sinh(t);
  const double u = 0.5 * kPi * st;
  // cosh(u)^2 overflows near |t| ~ 6.6; clamp via exp form.
  if (std::abs(u) > 350.0) return {u > 0 ? 1.0 : -1.0, 0.0};
  const double ch = std::cosh(u);
  return {std::tanh(u), 0.5 * kPi * std::cosh(t) / (ch * ch)};
}

template <typename T, typename F>
void ts_run(const F& f, double a, double b, double tol, int max_level, T& value,
            double& err) {
  const double c = 0.5 * (b - a), m = 0.5 * (b + a);
  const double t_max = 6.5;
  // Level 0: coarse trapezoid in t with h = 1.
  double h = 1.0;
  T sum = f(m) * ts_node(0.0).w;
  for (double t = h; t <= t_max; t += h) {
    TsNode n = ts_node(t);
    if (n.w == 0.0) break;
    double xp = m + c * n.x, xm = m - c * n.x;
    if (xp < b && xp > a) sum += f(xp) * n.w;
    if (xm > a && xm < b) sum += f(xm) * n.w;
  }
  T prev = sum * (h * c);
  err = std::abs(prev) + 1.0;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    T add{};
    for (double t = h; t <= t_max; t += 2.0 * h) {
      TsNode n = ts_node(t);
      if (n.w == 0.0) continue;
      double xp = m + c * n.x, xm = m - c * n.x;
      if (xp < b && xp > a) add += f(xp) * n.w;
      if (xm > a && xm < b) add += f(xm) * n.w;
    }
    sum += add;
    T cur = sum * (h * c);
    err = std::abs(cur - prev);
    prev = cur;
    if (err < tol * (1.0 + std::abs(cur)) && level >= 3) break;
  }
  value = prev;
}

}  // namespace

QuadResult tanh_sinh(const std::function<double(double)>& f, double a, double b,
                     double tol, int max_level) {
  double v = 0.0, e = 0.0;
  ts_run(f, a, b, tol, max_level, v, e);
  return {v, e};
}

QuadResultC tanh_sinh_c(const std::function<Complex(double)>& f, double a,
                        double b, double tol, int max_level) {
  Complex v{};
  double e = 0.0;
  ts_run(f, a, b, tol, max_level, v, e);
  return {v, e};
}

QuadResult integrate_to_inf(const std::function<double(double)>& f, double a,
                            double tol) {
  auto g = [&](double u) {
    const double d = 1.0 - u;
    return f(a + u / d) / (d * d);
  };
  return tanh_sinh(g, 0.0, 1.0, tol);
}

QuadResultC integrate_to_inf_c(const std::function<Complex(double)>& f,
                               double a, double tol) {
  auto g = [&](double u) {
    const double d = 1.0 - u;
    return f(a + u / d) / (d * d);
  };
  return tanh_sinh_c(g, 0.0, 1.0, tol);
}

const GaussLegendre& gauss_legendre(int n) {
  static std::map<int, GaussLegendre> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussLegendre gl;
  gl.x.resize(n);
  gl.w.resize(n);
  // Newton on Legendre P_n, Chebyshev initial guesses.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    gl.x[i] = -x;
    gl.x[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    gl.w[i] = w;
    gl.w[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(gl)).first->second;
}

Complex gl_integrate_c(const std::function<Complex(double)>& f, double a,
                       double b, int n) {
  const GaussLegendre& gl = gauss_legendre(n);
  const double c = 0.5 * (b - a), m = 0.5 * (a + b);
  Complex s{};
  for (int i = 0; i < n; ++i) s += f(m + c * gl.x[i]) * gl.w[i];
  return s * c;
}

double gl_integrate(const std::function<double(double)>& f, double a, double b,
                    int n) {
  const GaussLegendre& gl = gauss_legendre(n);
  const double c = 0.5 * (b - a), m = 0.5 * (a + b);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f(m + c * gl.x[i]) * gl.w[i];
  return s * c;
}

}  // namespace crack
