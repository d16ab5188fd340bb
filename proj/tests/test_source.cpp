#include "crack/source.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "crack/special.hpp"
#include "doctest.h"
#include "oracles.hpp"

using crack::Complex;

TEST_CASE("gamma pair: the (2,1,1,1) member is (r-1)exp(-r)") {
  crack::SourceTerm f = crack::make_gamma_pair(2, 1, 1, 1);
  for (double r : {0.1, 0.5, 1.0, 2.0, 7.3}) {
    CHECK(std::abs(f(r) - (r - 1.0) * std::exp(-r)) < 1e-14);
  }
  // f~(s) = Gamma(s+1) - Gamma(s) = (s-1) Gamma(s).
  for (Complex s : {Complex(2, 0), Complex(1.25, 3.0), Complex(3.0, -1.0)}) {
    Complex want = (s - 1.0) * std::exp(crack::log_gamma(s));
    CHECK(std::abs(f.mellin(s) - want) < 1e-12 * std::abs(want));
  }
  // Derivatives are analytic.
  CHECK(std::abs(f.fn.derivs[1](1.0) - std::exp(-1.0)) < 1e-13);
  CHECK(std::abs(f.fn.derivs[2](0.5) - (-3.0 + 0.5) * std::exp(-0.5)) < 1e-12);
}

TEST_CASE("gamma pair: zero mean by construction; family transform checks") {
  for (auto [a, b, c, d] : {std::array<double, 4>{2, 1, 1, 1},
                            std::array<double, 4>{3, 2, 1, 1},
                            std::array<double, 4>{1.5, 1, 2.5, 0.7}}) {
    crack::SourceTerm f = crack::make_gamma_pair(a, b, c, d);
    double mean = crack::validate_compatibility(f, 1e-8);
    CHECK(std::abs(mean) < 1e-10);
    // Closed form vs quadrature on a line segment.
    for (double t : {0.0, 1.4}) {
      Complex s(2.0, t);
      Complex quad = crack::mellin_point(f.fn, s);
      CHECK(std::abs(quad - f.mellin(s)) < 1e-8 * (1.0 + std::abs(f.mellin(s))));
    }
    // Conjugate symmetry of the transform.
    Complex s(1.5, 2.0);
    CHECK(std::abs(f.mellin(std::conj(s)) - std::conj(f.mellin(s))) < 1e-13);
  }
  CHECK_THROWS_AS(crack::make_gamma_pair(2, 1, 2, 1), crack::DegenerateFamily);
}

TEST_CASE("compatibility rejects a single-sign source") {
  crack::SourceTerm e;
  e.fn.derivs = {[](double r) { return std::exp(-r); }};
  e.fn.strip = crack::Strip(0.0, 1e300);
  CHECK_THROWS_AS(crack::validate_compatibility(e, 1e-8), crack::NonIntegrable);
  // The integral itself is 1.
  try {
    crack::validate_compatibility(e, 1e-8);
  } catch (const crack::NonIntegrable& err) {
    CHECK(std::string(err.what()).find("1") != std::string::npos);
  }
}

namespace {

std::string write_fixture(const std::string& name, bool sorted, int n = 2000) {
  std::string path = "/tmp/crack_test_" + name + ".csv";
  std::ofstream out(path);
  out << "# sampled source fixture\nr,f\n";
  for (int i = 0; i < n; ++i) {
    double r = std::pow(10.0, -2.0 + 4.0 * i / (n - 1.0));
    if (!sorted && i == n / 2) r = 1e-3;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r,
                  (r - 1.0) * std::exp(-r));
    out << buf;
  }
  return path;
}

}  // namespace

TEST_CASE("load_sampled: fixture of (r-1)exp(-r)") {
  crack::SourceTerm f = crack::load_sampled(write_fixture("ok", true));
  CHECK(f.provenance == crack::SourceTerm::Provenance::kSampled);
  for (double r : {0.05, 0.7, 3.0, 30.0}) {
    CHECK(std::abs(f(r) - (r - 1.0) * std::exp(-r)) < 2e-4);
  }
  // f~(2) = Gamma(3) - Gamma(2) = 1 within the sampled-data budget.
  Complex v = f.mellin(Complex(2, 0));
  CHECK(std::abs(v - 1.0) < 1e-4);
}

TEST_CASE("load_sampled: malformed inputs") {
  {
    std::ofstream out("/tmp/crack_test_empty.csv");
  }
  CHECK_THROWS_AS(crack::load_sampled("/tmp/crack_test_empty.csv"),
                  crack::FormatError);
  CHECK_THROWS_AS(crack::load_sampled("/tmp/definitely_missing_file.csv"),
                  crack::FormatError);
  CHECK_THROWS_AS(crack::load_sampled(write_fixture("unsorted", false)),
                  crack::NonMonotoneGrid);
}

TEST_CASE("combine is linear in both sources") {
  crack::SourceTerm f = crack::make_gamma_pair(2, 1, 1, 1);
  crack::SourceTerm g = crack::make_gamma_pair(3, 2, 1, 1);
  crack::SourceTerm h = crack::combine(f, g, 2.0, -0.5);
  for (double r : {0.3, 1.7}) {
    CHECK(std::abs(h(r) - (2.0 * f(r) - 0.5 * g(r))) < 1e-14);
  }
  Complex s(2.0, 1.0);
  CHECK(std::abs(h.mellin(s) - (2.0 * f.mellin(s) - 0.5 * g.mellin(s))) <
        1e-13);
}
