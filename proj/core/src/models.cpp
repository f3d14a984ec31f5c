#include "memlab/models.hpp"

#include <cmath>
#include <numbers>

#include "memlab/error.hpp"
#include "memlab/voigt.hpp"

namespace memlab::models {

using detail::require;

namespace {
bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }
}  // namespace

void EfficiencyParams::validate() const {
  require(in_unit(eta0_width) && in_unit(eta0_energy) && in_unit(eta0_detuning),
          "efficiency: eta0_* must lie in [0, 1]");
  require(mem_bandwidth_fwhm_mhz > 0.0 && lorentz_fwhm_mhz > 0.0,
          "efficiency: widths must be > 0");
  require(energy_scale_a_pj > 0.0, "efficiency: energy_scale_a_pj must be > 0");
  require(lorentz_peak_absorbance >= 0.0,
          "efficiency: lorentz_peak_absorbance must be >= 0");
}

void NoiseParams::validate() const {
  require(fwm_quad_b >= 0.0 && srs_lin_c >= 0.0 && fl_amp_d >= 0.0 && fl_sat_e_pj >= 0.0,
          "noise: energy-model coefficients must be >= 0");
  require(n_srs >= 0.0 && n_fl >= 0.0 && n_fwm >= 0.0,
          "noise: detuning-model amplitudes must be >= 0");
  require(voigt_gauss_fwhm_mhz > 0.0 && voigt_lorentz_fwhm_mhz > 0.0,
          "noise: Voigt widths must be > 0");
}

void Calibration::validate() const {
  require(rep_rate_hz > 0.0, "calibration: rep_rate_hz must be > 0");
  require(integration_time_s > 0.0, "calibration: integration_time_s must be > 0");
  require(apd_efficiency > 0.0 && apd_efficiency <= 1.0,
          "calibration: apd_efficiency must lie in (0, 1]");
  require(filter_signal_transmission > 0.0 && filter_signal_transmission <= 1.0,
          "calibration: filter_signal_transmission must lie in (0, 1]");
  require(split_ratio_sigma > 0.0, "calibration: split_ratio_sigma must be > 0");
  require(monitor_rate_cps >= 0.0, "calibration: monitor_rate_cps must be >= 0");
  require(split_ratio_rel_unc >= 0.0 && apd_efficiency_rel_unc >= 0.0,
          "calibration: relative uncertainties must be >= 0");
}

double eta_vs_pulse_width(double dt_ns, const EfficiencyParams& p) {
  require(dt_ns > 0.0, "eta_vs_pulse_width: dt must be > 0");
  // ns * MHz = 1e-3
  const double r = 4.0 * std::numbers::ln2 / (dt_ns * p.mem_bandwidth_fwhm_mhz * 1e-3);
  return p.eta0_width / std::sqrt(1.0 + r * r);
}

double eta_vs_control_energy(double e_c_pj, const EfficiencyParams& p) {
  require(e_c_pj > 0.0, "eta_vs_control_energy: energy must be > 0");
  return p.eta0_energy * std::exp(-p.energy_scale_a_pj / e_c_pj);
}

double detuning_absorbance(double delta_mhz, const EfficiencyParams& p) {
  const double u = 2.0 * (delta_mhz - p.lorentz_center_mhz) / p.lorentz_fwhm_mhz;
  return p.lorentz_peak_absorbance / (1.0 + u * u);
}

double eta_vs_detuning(double delta_mhz, const EfficiencyParams& p) {
  return p.eta0_detuning * std::exp(-detuning_absorbance(delta_mhz, p));
}

NoiseComponents noise_components_vs_energy(double e_c_pj, const NoiseParams& p) {
  require(e_c_pj >= 0.0, "noise_vs_energy: energy must be >= 0");
  NoiseComponents n;
  n.fwm = p.fwm_quad_b * e_c_pj * e_c_pj;
  n.srs = p.srs_lin_c * e_c_pj;
  n.fluorescence = e_c_pj > 0.0 ? p.fl_amp_d * e_c_pj / (p.fl_sat_e_pj + e_c_pj) : 0.0;
  return n;
}

double noise_vs_energy(double e_c_pj, const NoiseParams& p) {
  return noise_components_vs_energy(e_c_pj, p).total();
}

NoiseComponents noise_components_vs_detuning(double delta_mhz, const NoiseParams& p) {
  NoiseComponents n;
  n.fwm = p.n_fwm;
  n.srs = p.n_srs;
  n.fluorescence =
      p.n_fl * voigt::voigt_unit_peak(delta_mhz, p.voigt_gauss_fwhm_mhz, p.voigt_lorentz_fwhm_mhz);
  return n;
}

double noise_vs_detuning(double delta_mhz, const NoiseParams& p) {
  return noise_components_vs_detuning(delta_mhz, p).total();
}

double efficiency_model(SweepAxis axis, double x, const EfficiencyParams& p) {
  switch (axis) {
    case SweepAxis::PulseWidth: return eta_vs_pulse_width(x, p);
    case SweepAxis::ControlEnergy: return eta_vs_control_energy(x, p);
    case SweepAxis::Detuning: return eta_vs_detuning(x, p);
  }
  throw DomainError("efficiency_model: unknown axis");
}

double noise_model(SweepAxis axis, double x, const NoiseParams& p, const OperatingPoint& ref) {
  switch (axis) {
    case SweepAxis::PulseWidth: return noise_vs_detuning(ref.detuning_mhz, p);
    case SweepAxis::ControlEnergy: return noise_vs_energy(x, p);
    case SweepAxis::Detuning: return noise_vs_detuning(x, p);
  }
  throw DomainError("noise_model: unknown axis");
}

double snr_model(SweepAxis axis, double x, double alpha2, const Calibration& cal,
                 const EfficiencyParams& ep, const NoiseParams& np, const OperatingPoint& ref) {
  require(alpha2 >= 0.0, "snr_model: alpha2 must be >= 0");
  const double noise = noise_model(axis, x, np, ref);
  if (!(noise > 0.0)) throw UndefinedSnrError("snr_model: noise model is zero, SNR undefined");
  return alpha2 * efficiency_model(axis, x, ep) * cal.apd_efficiency / noise;
}

double mu_one(double alpha2, double snr) {
  require(snr > 0.0, "mu_one: snr must be > 0");
  require(alpha2 > 0.0, "mu_one: alpha2 must be > 0");
  return alpha2 / snr;
}

double eta_mem_from_e2e(double eta_e2e, double filter_transmission) {
  require(filter_transmission > 0.0 && filter_transmission <= 1.0,
          "eta_mem_from_e2e: filter transmission must lie in (0, 1]");
  return eta_e2e / filter_transmission;
}

}  // namespace memlab::models
