#pragma once

#include <string>

#include "crack/mellin.hpp"
#include "crack/types.hpp"

namespace crack {

// The datum f on (0, inf): physical evaluation, analytic derivatives where
// available, and a Mellin transform valid in `strip`. Built-in sources carry
// closed-form transforms; sampled sources use interpolation plus a fitted
// exponential tail.
struct SourceTerm {
  enum class Provenance { kClosedForm, kSampled };

  PhysicalFunction fn;
  Provenance provenance = Provenance::kClosedForm;
  // For the built-in family f = A r^(a-1) e^(-br) - B r^(c-1) e^(-dr).
  double a = 0, b = 0, c = 0, d = 0, amp_a = 0, amp_b = 0;

  double operator()(double r) const { return fn(r); }
  Complex mellin(Complex s) const { return fn.mellin_closed_form(s); }
  const Strip& strip() const { return fn.strip; }
};

// Zero-mean pair f = A r^(a-1) e^(-br) - B r^(c-1) e^(-dr), normalized so
// that each term integrates to one. Transform
//   f~(s) = A G(s+a-1) b^(1-s-a) - B G(s+c-1) d^(1-s-c),  Re s > 1 - min(a,c).
SourceTerm make_gamma_pair(double a, double b, double c, double d);

// Pointwise sum (for linearity checks); both transforms must be closed-form.
SourceTerm combine(const SourceTerm& f, const SourceTerm& g, double cf,
                   double cg);

// int_0^inf f dr by quadrature. The solver refuses the source when
// |integral| > compat_tol * ||f||_(L1,abs).
double validate_compatibility(const SourceTerm& f, double compat_tol = 1e-8);

// Reads a CSV with header "r,f" (comments start with '#'), builds a
// monotone-cubic interpolant with a fitted exponential tail, and exposes a
// quadrature-based Mellin transform.
SourceTerm load_sampled(const std::string& path);

}  // namespace crack
