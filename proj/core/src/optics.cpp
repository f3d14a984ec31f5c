#include "memlab/optics.hpp"

#include <cmath>
#include <numbers>

#include "memlab/error.hpp"

namespace memlab::optics {

using detail::require;

double transform_limit_bandwidth(double dt_ns) {
  require(dt_ns > 0.0, "transform_limit_bandwidth: dt must be > 0");
  // 1/ns = 1 GHz = 1e3 MHz
  return 2.0 * std::numbers::ln2 / (std::numbers::pi * dt_ns) * 1e3;
}

double peak_rabi_frequency(double power_mw, double beam_fwhm_um, double dipole_cm) {
  require(power_mw > 0.0 && beam_fwhm_um > 0.0 && dipole_cm > 0.0,
          "peak_rabi_frequency: inputs must be > 0");
  const double power = power_mw * 1e-3;
  const double w = beam_fwhm_um * 1e-6 / std::sqrt(2.0 * std::numbers::ln2);
  const double intensity = 2.0 * power / (std::numbers::pi * w * w);
  const double field = std::sqrt(2.0 * intensity / (kSpeedOfLight * kEpsilon0));
  return dipole_cm * field / kHbar;
}

double etalon_transmission(double detune_ghz, double fsr_ghz, double finesse) {
  require(fsr_ghz > 0.0 && finesse > 0.0, "etalon_transmission: fsr and finesse must be > 0");
  const double coeff = std::pow(2.0 * finesse / std::numbers::pi, 2);
  const double s = std::sin(std::numbers::pi * detune_ghz / fsr_ghz);
  return 1.0 / (1.0 + coeff * s * s);
}

}  // namespace memlab::optics
