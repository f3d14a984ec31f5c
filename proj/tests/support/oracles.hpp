#pragma once

// Reference computations the library results are checked against. None of
// them call into memlab numerics.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double kLn2 = std::numbers::ln2;
inline constexpr double kPi = std::numbers::pi;

// Composite Simpson rule on [a, b] with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Gaussian (FWHM g) convolved with a Lorentzian (FWHM l), not normalized.
inline double voigt_convolution_raw(double delta, double g, double l) {
  const double sigma = g / (2.0 * std::sqrt(2.0 * kLn2));
  const double hw = 0.5 * l;
  auto integrand = [&](double x) {
    const double gauss = std::exp(-0.5 * x * x / (sigma * sigma));
    const double u = delta - x;
    return gauss * hw / (u * u + hw * hw);
  };
  return simpson(integrand, -9.0 * sigma, 9.0 * sigma, 40000);
}

inline double voigt_convolution(double delta, double g, double l) {
  return voigt_convolution_raw(delta, g, l) / voigt_convolution_raw(0.0, g, l);
}

// Half-maximum crossing of a unit-peak profile decreasing in |x|, by bisection.
inline double fwhm_by_bisection(const std::function<double(double)>& f, double hi) {
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.5 ? lo : hi) = mid;
  }
  return lo + hi;
}

// Steady-state weak-probe transmission of a homogeneous Lambda medium.
// Rates in rad/ns; the probe oscillates as exp(-i delta t). g2 = OD gamma / 2.
inline double eit_transmission(double delta, double g2, double gamma, double big_delta,
                               double gamma_s, double delta2, double omega_half) {
  using cplx = std::complex<double>;
  const cplx i{0.0, 1.0};
  cplx d = gamma + i * (big_delta - delta);
  if (omega_half > 0.0) d += omega_half * omega_half / (gamma_s + i * (delta2 - delta));
  return std::exp(-2.0 * std::real(g2 / d));
}

// Adiabatic dark-state-polariton estimate of the stored fraction: a signal
// slice entering at t0 is stored if the control area remaining after t0,
// integral of Omega^2 (half Rabi, rad/ns), is smaller than g2, so the
// polariton stops inside the medium.
inline double dsp_write_fraction(const std::function<double(double)>& input_flux,
                                 const std::function<double(double)>& half_rabi, double t_begin,
                                 double t_end, double g2, int n = 1500) {
  double stored = 0.0, total = 0.0;
  const double span = t_end - t_begin;
  for (int k = 0; k < n; ++k) {
    const double t0 = t_begin + span * (k + 0.5) / n;
    const double flux = input_flux(t0);
    double area = 0.0;
    const int m = 1500;
    const double h = (t_end - t0) / m;
    for (int j = 0; j < m; ++j) {
      const double o = half_rabi(t0 + (j + 0.5) * h);
      area += o * o * h;
    }
    total += flux;
    if (area < g2) stored += flux;
  }
  return stored / total;
}

// Least-squares slope of y against x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace oracle
