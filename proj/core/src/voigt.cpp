#include "memlab/voigt.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "memlab/error.hpp"

namespace memlab::voigt {

namespace {

using cplx = std::complex<double>;

constexpr int kTerms = 40;
constexpr double kFarRadius = 15.0;

struct Weideman {
  double L = 0.0;
  std::array<double, kTerms> a{};  // a[0] multiplies Z^(N-1), Horner order

  Weideman() {
    const int m = 2 * kTerms;
    const int m2 = 2 * m;
    L = std::sqrt(kTerms / std::numbers::sqrt2);
    // f sampled at k = -m+1 .. m-1, prefixed with a zero, then fftshift-ed.
    std::vector<double> f(m2, 0.0);
    for (int k = -m + 1; k <= m - 1; ++k) {
      const double t = L * std::tan(0.5 * k * std::numbers::pi / m);
      f[k + m] = std::exp(-t * t) * (L * L + t * t);
    }
    std::vector<double> shifted(m2);
    for (int j = 0; j < m2; ++j) shifted[j] = f[(j + m) % m2];
    // Only coefficients 1..N of the real DFT are needed.
    for (int n = 1; n <= kTerms; ++n) {
      double re = 0.0;
      for (int j = 0; j < m2; ++j)
        re += shifted[j] * std::cos(2.0 * std::numbers::pi * j * n / m2);
      a[kTerms - n] = re / m2;
    }
  }
};

const Weideman& weideman() {
  static const Weideman w;
  return w;
}

// Laplace continued fraction, accurate in the upper half plane for large |z|.
cplx faddeeva_far(cplx z) {
  cplx tail = z;
  for (int k = 12; k >= 1; --k) tail = z - (0.5 * k) / tail;
  return cplx(0.0, 1.0 / std::sqrt(std::numbers::pi)) / tail;
}

}  // namespace

std::complex<double> faddeeva(std::complex<double> z) {
  if (z.imag() < 0.0) throw DomainError("faddeeva: Im z must be >= 0");
  if (std::abs(z) > kFarRadius) return faddeeva_far(z);
  const Weideman& wd = weideman();
  const cplx iz(-z.imag(), z.real());
  const cplx denom = wd.L - iz;
  const cplx zz = (wd.L + iz) / denom;
  cplx p = 0.0;
  for (double c : wd.a) p = p * zz + c;
  return 2.0 * p / (denom * denom) + (1.0 / std::sqrt(std::numbers::pi)) / denom;
}

double voigt_unit_peak(double delta, double gauss_fwhm, double lorentz_fwhm) {
  detail::require(gauss_fwhm > 0.0 && lorentz_fwhm > 0.0,
                  "voigt_unit_peak: widths must be > 0");
  const double sigma = gauss_fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
  const double scale = 1.0 / (sigma * std::numbers::sqrt2);
  const double y = 0.5 * lorentz_fwhm * scale;
  const double peak = faddeeva({0.0, y}).real();
  return faddeeva({std::abs(delta) * scale, y}).real() / peak;
}

double voigt_fwhm(double gauss_fwhm, double lorentz_fwhm) {
  double lo = 0.0;
  double hi = gauss_fwhm + lorentz_fwhm;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (voigt_unit_peak(mid, gauss_fwhm, lorentz_fwhm) > 0.5 ? lo : hi) = mid;
  }
  return lo + hi;
}

}  // namespace memlab::voigt
