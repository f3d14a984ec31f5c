#pragma once

namespace memlab::optics {

inline constexpr double kHbar = 1.054571817e-34;       // J s
inline constexpr double kSpeedOfLight = 299792458.0;   // m/s
inline constexpr double kEpsilon0 = 8.8541878128e-12;  // F/m

/// Spectral FWHM (MHz) of a transform-limited Gaussian pulse whose intensity
/// FWHM is dt_ns: dt * dnu = 2 ln2 / pi.
double transform_limit_bandwidth(double dt_ns);

/// Peak Rabi frequency d E0 / hbar in rad/s for a Gaussian beam of the given
/// power (mW) and intensity FWHM (um). Uses I0 = 2P / (pi w^2) with the 1/e^2
/// radius w = FWHM / sqrt(2 ln2).
double peak_rabi_frequency(double power_mw, double beam_fwhm_um, double dipole_cm);

/// Airy transmission of a lossless Fabry-Perot etalon, unit peak.
double etalon_transmission(double detune_ghz, double fsr_ghz, double finesse);

}  // namespace memlab::optics
