#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace crack {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Base of the library's error hierarchy. Operations signal violated
// preconditions or lost accuracy by throwing; nothing is reported through
// sentinel values.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct PoleError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct DegenerateError : Error { using Error::Error; };
struct NonConvergence : Error { using Error::Error; };
struct DivergentTransform : Error { using Error::Error; };
struct TailTooFat : Error { using Error::Error; };
struct LineMismatch : Error { using Error::Error; };
struct StripViolation : Error { using Error::Error; };
struct GridTooCoarse : Error { using Error::Error; };
struct DegenerateFamily : Error { using Error::Error; };
struct NonIntegrable : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };
struct NonMonotoneGrid : Error { using Error::Error; };
struct TailFitFailure : Error { using Error::Error; };
struct ContourPoleClash : Error { using Error::Error; };
struct SpecialFunctionDomain : Error { using Error::Error; };
struct InsufficientRange : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

// Open vertical strip re_min < Re z < re_max.
struct Strip {
  double re_min;
  double re_max;

  Strip(double lo, double hi) : re_min(lo), re_max(hi) {
    if (!(lo < hi)) throw DomainError("Strip: require re_min < re_max");
  }
  bool contains(Complex z) const {
    return z.real() > re_min && z.real() < re_max;
  }
  bool contains(double x) const { return x > re_min && x < re_max; }
};

// A computed complex value together with an estimate of its relative error.
struct ComplexEval {
  Complex value;
  double est_rel_err = 0.0;
};

}  // namespace crack
