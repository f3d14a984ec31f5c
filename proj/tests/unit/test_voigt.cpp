#include <cmath>
#include <complex>

#include "doctest.h"
#include "memlab/error.hpp"
#include "memlab/voigt.hpp"
#include "oracles.hpp"

using memlab::voigt::faddeeva;
using memlab::voigt::voigt_fwhm;
using memlab::voigt::voigt_unit_peak;

namespace {

struct WofzCase {
  double x, y, re, im;
};

// Reference values frozen from scipy.special.wofz.
constexpr WofzCase kWofz[] = {
    {0.5, 0.5, 0.53315670791217484, 0.23048823138445851},
    {2.0, 2.015, 0.14777280798335252, 0.13017797751667057},
    {-3.0, 0.1, 0.0079426809987700013, -0.20074234309867764},
    {10.0, 1.0, 0.0056699425669021787, 0.056129645315951264},
    {30.0, 2.0, 0.0012502716123336107, 0.01873329438084476},
    {0.0, 5.0, 0.11070463773306861, 0.0},
    {0.001, 0.001, 0.9988716223354106, 0.0011263806715998989},
    {4.0, 0.01, 0.00039260442161786867, 0.14595247645468312},
    {16.0, 0.2, 0.00044331110639201857, 0.035325552998981713},
};

}  // namespace

TEST_CASE("Faddeeva function against frozen references") {
  for (const auto& c : kWofz) {
    CAPTURE(c.x);
    CAPTURE(c.y);
    const auto w = faddeeva({c.x, c.y});
    CHECK(std::abs(w.real() - c.re) <= 1e-10 * std::abs(c.re) + 1e-15);
    CHECK(std::abs(w.imag() - c.im) <= 1e-9 * std::abs(c.im) + 1e-13);
  }
  CHECK(faddeeva({0.0, 0.0}).real() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(faddeeva({1.0, -0.1}), memlab::DomainError);
}

TEST_CASE("Faddeeva symmetry w(-x + iy) = conj w(x + iy)") {
  for (double x : {0.3, 2.2, 7.5, 18.0})
    for (double y : {0.01, 0.7, 3.0}) {
      const auto a = faddeeva({x, y});
      const auto b = faddeeva({-x, y});
      CHECK(a.real() == doctest::Approx(b.real()).epsilon(1e-13));
      CHECK(a.imag() == doctest::Approx(-b.imag()).epsilon(1e-13));
    }
}

TEST_CASE("Voigt profile against direct convolution") {
  double worst = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double d = -5000.0 + 50.0 * i;
    const double ref = oracle::voigt_convolution(d, 380.0, 920.0);
    worst = std::max(worst, std::abs(voigt_unit_peak(d, 380.0, 920.0) / ref - 1.0));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("Voigt FWHM") {
  const double ref = oracle::fwhm_by_bisection(
      [](double d) { return oracle::voigt_convolution(d, 380.0, 920.0); }, 3000.0);
  CHECK(ref == doctest::Approx(1064.0).epsilon(2e-3));
  CHECK(voigt_fwhm(380.0, 920.0) == doctest::Approx(ref).epsilon(5e-3));
  CHECK(voigt_fwhm(380.0, 1e-6) == doctest::Approx(380.0).epsilon(1e-6));
  CHECK(voigt_fwhm(1e-6, 920.0) == doctest::Approx(920.0).epsilon(1e-6));
}
