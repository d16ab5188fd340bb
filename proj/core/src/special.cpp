#include "crack/special.hpp"

#include <cmath>

#include "crack/quadrature.hpp"
#include "crack/util.hpp"

namespace crack {

namespace {

constexpr double kLn2Pi = 1.8378770664093454835606594728112353;
constexpr double kLnPi = 1.1447298858494001741434273513530587;

// Lanczos coefficients, g = 607/128, 15 terms.
constexpr double kLanczosG = 4.7421875;
constexpr double kLanczos[15] = {
    0.99999999999999709182,     57.156235665862923517,
    -59.597960355475491248,     14.136097974741747174,
    -0.49191381609762019978,    0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4,
    0.15808870322491248884e-3,  -0.21026444172410488319e-3,
    0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4,
    0.36899182659531622704e-5};

bool near_nonpositive_integer(Complex z, double tol = 1e-13) {
  if (z.imag() != 0.0) return false;
  double r = std::round(z.real());
  return r <= 0.0 && std::abs(z.real() - r) < tol;
}

// Branch-stable log(sin z); avoids the 2*pi*i jumps of log(std::sin(z))
// for large |Im z|.
Complex sin_log(Complex z) {
  const Complex I{0.0, 1.0};
  if (z.imag() > 0.0) {
    return -I * (0.5 * kPi) - Complex(M_LN2) - I * z +
           std::log(std::exp(2.0 * I * z) - 1.0);
  }
  return -I * (0.5 * kPi) - Complex(M_LN2) + I * z +
         std::log(1.0 - std::exp(-2.0 * I * z));
}

Complex log_gamma_positive(Complex z) {
  // Re z >= 1/2 assumed.
  Complex s = kLanczos[0];
  for (int k = 1; k < 15; ++k) s += kLanczos[k] / (z + Complex(k - 1));
  Complex t = z + (kLanczosG - 0.5);
  return 0.5 * kLn2Pi + (z - 0.5) * std::log(t) - t + std::log(s);
}

}  // namespace

Complex log_gamma(Complex z) {
  if (near_nonpositive_integer(z))
    throw PoleError("log_gamma: pole at nonpositive integer");
  if (z.real() >= 0.5) return log_gamma_positive(z);
  // Reflection: log G(z) = log pi - log sin(pi z) - log G(1 - z).
  return Complex(kLnPi) - sin_log(kPi * z) - log_gamma_positive(1.0 - z);
}

ComplexEval gamma(Complex z) {
  Complex lg = log_gamma(z);
  if (lg.real() > 700.0) throw DomainError("gamma: overflow");
  return {std::exp(lg), 5e-15 * (1.0 + 0.01 * std::abs(z.imag()))};
}

ComplexEval omega(Complex z) {
  const Complex I{0.0, 1.0};
  if (z == Complex{}) return {Complex(1.0 / kPi), 1e-16};
  if (z.imag() == 0.0) {
    double r = std::round(z.real());
    if (r != 0.0 && std::abs(z.real() - r) < 1e-13)
      throw PoleError("omega: pole at nonzero integer");
  }
  Complex cot;
  if (std::abs(z.imag()) > 20.0) {
    // cot(pi z) -> -i sign(Im z); use the scaled exponential form.
    if (z.imag() > 0.0) {
      Complex e = std::exp(2.0 * I * kPi * z);  // |e| = exp(-2 pi Im z) << 1
      cot = -I * (1.0 + e) / (1.0 - e);
    } else {
      Complex e = std::exp(-2.0 * I * kPi * z);
      cot = I * (1.0 + e) / (1.0 - e);
    }
  } else {
    cot = std::cos(kPi * z) / std::sin(kPi * z);
  }
  double dist = std::abs(z - std::round(z.real()));
  double cond = (z.imag() == 0.0 && dist < 0.1) ? 0.1 / dist : 1.0;
  return {z * cot, 4e-16 * cond};
}

double arg_omega(Complex z) {
  const double x = z.real(), y = z.imag();
  double s2x = std::sin(2.0 * kPi * x);
  if (std::abs(2.0 * x - std::round(2.0 * x)) < 1e-13) s2x = 0.0;
  double num, den;
  if (std::abs(y) > 20.0) {
    // Factor exp(2 pi |y|)/2 out of sinh to avoid overflow.
    const double sgn = y > 0.0 ? 1.0 : -1.0;
    const double damp = std::exp(-2.0 * kPi * std::abs(y));
    const double sh = sgn * (1.0 - damp * damp);  // 2 sinh(2 pi y) e^{-2pi|y|}
    num = 2.0 * y * s2x * damp - x * sh;
    den = 2.0 * x * s2x * damp + y * sh;
  } else {
    const double sh = std::sinh(2.0 * kPi * y);
    num = y * s2x - x * sh;
    den = x * s2x + y * sh;
  }
  if (den == 0.0) throw DegenerateError("arg_omega: denominator vanishes");
  return std::atan(num / den);
}

namespace {

// log(1 + z) with full relative accuracy for small |z|.
Complex log1p_c(Complex z) {
  if (std::abs(z) > 0.1) return std::log(1.0 + z);
  Complex term = z, sum = z;
  for (int k = 2; k <= 24; ++k) {
    term *= -z;
    sum += term / static_cast<double>(k);
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Bernoulli correction sum of the Stirling difference
// log G(w+d) - log G(w): sum_k B_2k/(2k(2k-1)) [(w+d)^(1-2k) - w^(1-2k)].
Complex stirling_diff_bernoulli(Complex w, double d) {
  static constexpr double kBern[4] = {1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0,
                                      -1.0 / 1680.0};
  const Complex wd = w + d;
  // k = 1 term rewritten as -d/(w(w+d)) to avoid subtracting near-equal
  // reciprocals; higher terms are small enough to difference directly.
  Complex s = kBern[0] * (-d) / (w * wd);
  Complex iw = 1.0 / w, iwd = 1.0 / wd;
  Complex pw = iw * iw * iw, pwd = iwd * iwd * iwd;
  for (int k = 1; k < 4; ++k) {
    s += kBern[k] * (pwd - pw);
    pw *= iw * iw;
    pwd *= iwd * iwd;
  }
  return s;
}

// Log of one product factor, as a smooth function of the (real) index x.
// For large arguments the four log-gammas are O(x log x) while the factor's
// log is O(1/x^3); the combined Stirling-difference form below cancels the
// big pieces analytically so the absolute error stays at machine level
// (the tail integral divides by u^2 and would amplify anything worse).
Complex k_log_factor(double x, Complex z) {
  const Complex w1 = Complex(x) + z;        // ratio G(w1 - 1/2)/G(w1)
  const Complex w2 = Complex(x + 0.5) - z;  // ratio G(w2 + 1/2)/G(w2)
  const Complex tail = (2.0 * z - 1.0) * (-std::log1p(-0.5 / x));
  if (std::abs(w1) >= 60.0 && std::abs(w2) >= 60.0) {
    // D(w,d) = (w+d-1/2) log1p(d/w) + d log w - d + B(w,d); the two
    // d log w pieces combine into (1/2) log(w2/w1).
    return (w1 - 1.0) * log1p_c(-0.5 / w1) + w2 * log1p_c(0.5 / w2) +
           0.5 * log1p_c((0.5 - 2.0 * z) / w1) +
           stirling_diff_bernoulli(w1, -0.5) +
           stirling_diff_bernoulli(w2, 0.5) + tail;
  }
  return log_gamma(Complex(x - 0.5) + z) + log_gamma(Complex(x + 1.0) - z) -
         log_gamma(Complex(x + 0.5) - z) - log_gamma(Complex(x) + z) + tail;
}

}  // namespace

Strip k_strip() { return Strip(-0.5, 2.0); }

namespace detail {
ComplexEval k_product_terms(Complex z, int n_direct);
}

ComplexEval k_product(Complex z) {
  if (!k_strip().contains(z))
    throw DomainError("k_product: Re z outside (-1/2, 2)");

  // Exact special points: every factor is identically one.
  if (z == Complex(0.5, 0.0) || z == Complex(0.0, 0.0) || z == Complex(1.0, 0.0))
    return {Complex(1.0, 0.0), 0.0};

  const int n_direct =
      std::max(48, static_cast<int>(std::ceil(3.0 * (std::abs(z) + 2.0))));
  return detail::k_product_terms(z, n_direct);
}

ComplexEval detail::k_product_terms(Complex z, int n_direct) {
  Complex log_k{};
  for (int n = 1; n <= n_direct; ++n) log_k += k_log_factor(n, z);

  // Euler-Maclaurin tail starting at a = n_direct + 1:
  //   sum_{n>=a} L(n) = int_a^inf L + L(a)/2 - L'(a)/12 + ...
  const double a = n_direct + 1.0;
  const Complex La = k_log_factor(a, z);
  if (std::abs(La) > 0.5)
    throw NonConvergence("k_product: log factor not yet asymptotic at cap");
  // int_a^inf L(x) dx with x = a/u; integrand smooth on (0,1].
  Complex integral =
      a * gl_integrate_c(
              [&](double u) { return k_log_factor(a / u, z) / (u * u); }, 0.0,
              1.0, 32);
  // L'(a) by Richardson-extrapolated central differences (the plain h^2
  // error would dominate the whole tail), L'''(a) by a plain stencil.
  const double h = 0.7;
  const Complex lp1 = k_log_factor(a + h, z), lm1 = k_log_factor(a - h, z);
  const Complex lp2 = k_log_factor(a + 2.0 * h, z),
                lm2 = k_log_factor(a - 2.0 * h, z);
  Complex d_h = (lp1 - lm1) / (2.0 * h);
  Complex d_2h = (lp2 - lm2) / (4.0 * h);
  Complex Lp = (4.0 * d_h - d_2h) / 3.0;
  Complex Lppp = (lp2 - 2.0 * lp1 + 2.0 * lm1 - lm2) / (2.0 * h * h * h);
  log_k += integral + 0.5 * La - Lp / 12.0 + Lppp / 720.0;

  // Floor set by the absolute noise of the Stirling-difference factors
  // inside the tail integral; measured against brute-force reference sums.
  double est = 6e-11 + 2e-12 * std::abs(z.imag()) +
               std::abs(La) / (30.0 * a * a * a);
  return {std::exp(log_k), est};
}

ComplexEval k0(Complex z) {
  if (!Strip(-1.0, 0.5).contains(z))
    throw DomainError("k0: Re z outside (-1, 1/2)");
  ComplexEval k = k_product(z + 1.0);
  return {1.0 / ((z + 1.0) * k.value), k.est_rel_err + 2e-16};
}

ComplexEval k1(Complex z) {
  if (!Strip(-1.5, 0.0).contains(z))
    throw DomainError("k1: Re z outside (-3/2, 0)");
  // K(z) cot(pi z) = K(z+1) / (pi z) by the functional relation; the right
  // side stays finite across the pole/zero pair at z = -1/2.
  ComplexEval k = k_product(z + 1.0);
  return {k.value / (kPi * z), k.est_rel_err + 2e-16};
}

ComplexEval d0(Complex z, double kappa0) {
  if (!(kappa0 > 0.0)) throw DomainError("d0: kappa0 must be positive");
  ComplexEval k = k_product(z);
  const Complex I{0.0, 1.0};
  Complex v = std::exp(I * kPi * z + (0.5 - z) * std::log(kappa0 * kPi));
  return {v * k.value, k.est_rel_err + 4e-16};
}

double log_k_asymptotic(Complex z, double m_asym) {
  if (std::abs(z.imag()) < m_asym)
    throw DomainError("k_asymptotic: |Im z| below threshold");
  double aw = arg_omega(z);
  double law = std::log(std::abs(omega(z).value));
  return (z.real() - 0.5) * law - z.imag() * aw;
}

ComplexEval k_asymptotic(Complex z, double m_asym) {
  return {Complex(std::exp(log_k_asymptotic(z, m_asym)), 0.0), 0.0};
}

KLineTable::KLineTable(double re, double im_max, double spacing)
    : re_(re), im_max_(im_max), dt_(spacing) {
  if (!k_strip().contains(re))
    throw DomainError("KLineTable: line outside the K strip");
  const std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * im_max / dt_)) + 6;
  v_.resize(n);
  const double t0 = -im_max - 2.0 * dt_;
  parallel_for(n, [&](std::size_t i) {
    v_[i] = k_product(Complex(re_, t0 + dt_ * static_cast<double>(i))).value;
  });
  im_max_ = -t0;  // actual covered half-range after padding
}

Complex KLineTable::eval(double im) const {
  const double t0 = -im_max_;
  double pos = (im - t0) / dt_;
  // 6-point Lagrange interpolation on the uniform grid.
  long j = static_cast<long>(std::floor(pos)) - 2;
  if (j < 0) j = 0;
  if (j > static_cast<long>(v_.size()) - 6)
    j = static_cast<long>(v_.size()) - 6;
  if (pos < -0.5 || pos > static_cast<double>(v_.size()) - 0.5)
    throw DomainError("KLineTable: point outside tabulated range");
  double u = pos - static_cast<double>(j);
  Complex acc{};
  for (int m = 0; m < 6; ++m) {
    double lm = 1.0;
    for (int q = 0; q < 6; ++q)
      if (q != m) lm *= (u - q) / (m - q);
    acc += v_[static_cast<std::size_t>(j) + m] * lm;
  }
  return acc;
}

}  // namespace crack
