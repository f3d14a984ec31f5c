#pragma once

#include <complex>

namespace memlab::voigt {

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Im z >= 0.
///
/// Two regions: a continued fraction for |z| > 15 and Weideman's 40-term
/// rational expansion elsewhere. Relative error on Re w is below 1e-12 for
/// Im z >= 0.01 (checked against independent references in the tests).
std::complex<double> faddeeva(std::complex<double> z);

/// Voigt profile normalized to unit peak, V(0) = 1. Widths are FWHM in the
/// same unit as delta; both must be > 0.
double voigt_unit_peak(double delta, double gauss_fwhm, double lorentz_fwhm);

/// Full width at half maximum of the profile, by bisection.
double voigt_fwhm(double gauss_fwhm, double lorentz_fwhm);

}  // namespace memlab::voigt
