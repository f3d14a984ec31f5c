#pragma once

// Closed-form empirical efficiency and noise models of a warm-vapor EIT
// memory, plus the photon-counting figures of merit built on them.
//
// Unit conventions (never converted implicitly):
//   time ns, energy pJ, frequency MHz (ordinary, not angular),
//   noise in detected counts per retrieval attempt.

#include <optional>

namespace memlab::models {

struct EfficiencyParams {
  // eta(dt) = eta0_width / sqrt(1 + (4 ln2 / (dt * bw))^2)
  double eta0_width = 0.128;
  double mem_bandwidth_fwhm_mhz = 220.0;
  // eta(E) = eta0_energy * exp(-a / E)
  double eta0_energy = 0.107;
  double energy_scale_a_pj = 156.0;
  // eta(delta) = eta0_detuning * exp(-alpha(delta)), alpha Lorentzian
  double eta0_detuning = 0.13;
  double lorentz_fwhm_mhz = 1000.0;
  double lorentz_center_mhz = 0.0;
  double lorentz_peak_absorbance = 2.0;

  void validate() const;
};

struct NoiseParams {
  // N(E) = b E^2 + c E + d E / (e + E)
  double fwm_quad_b = 0.0;
  double srs_lin_c = 4e-5;
  double fl_amp_d = 7e-3;
  double fl_sat_e_pj = 16.0;
  // N(delta) = n_srs + n_fl V(delta) + n_fwm, V unit-peak Voigt
  double n_srs = 14e-3;
  double n_fl = 7e-3;
  double n_fwm = 0.0;
  double voigt_gauss_fwhm_mhz = 380.0;
  double voigt_lorentz_fwhm_mhz = 920.0;

  void validate() const;
};

struct Calibration {
  double split_ratio_sigma = 9.0;  // signal / monitor power ratio
  double apd_efficiency = 0.33;
  double rep_rate_hz = 1.0 / 11e-6;
  double integration_time_s = 60.0;
  double monitor_rate_cps = 3333.0;
  double filter_signal_transmission = 0.4;
  // Relative 1-sigma uncertainties used by calibrate_alpha2.
  double split_ratio_rel_unc = 0.05;
  double apd_efficiency_rel_unc = 0.05 / 0.33;

  double attempts() const { return rep_rate_hz * integration_time_s; }
  void validate() const;
};

struct Window {
  double t_min_ns = 0.0;
  double t_max_ns = 0.0;
};

struct MetricsReport {
  double alpha2 = 0.0;
  double eta_e2e = 0.0;
  double eta_mem = 0.0;
  std::optional<double> snr;
  std::optional<double> mu1;
  std::optional<double> storage_time_ns;
  std::optional<Window> window;
};

double eta_vs_pulse_width(double dt_ns, const EfficiencyParams& p);
double eta_vs_control_energy(double e_c_pj, const EfficiencyParams& p);
/// Lorentzian absorbance alpha(delta) entering eta_vs_detuning.
double detuning_absorbance(double delta_mhz, const EfficiencyParams& p);
double eta_vs_detuning(double delta_mhz, const EfficiencyParams& p);

/// Noise components at control energy e_c (pJ).
struct NoiseComponents {
  double fwm = 0.0;
  double srs = 0.0;
  double fluorescence = 0.0;
  double total() const { return fwm + srs + fluorescence; }
};

NoiseComponents noise_components_vs_energy(double e_c_pj, const NoiseParams& p);
double noise_vs_energy(double e_c_pj, const NoiseParams& p);
NoiseComponents noise_components_vs_detuning(double delta_mhz, const NoiseParams& p);
double noise_vs_detuning(double delta_mhz, const NoiseParams& p);

enum class SweepAxis { PulseWidth, ControlEnergy, Detuning };

/// Reference operating point used for the axes a model does not vary.
/// The pulse-width axis has no noise dependence of its own; it takes the
/// detuning noise model at `detuning_mhz`.
struct OperatingPoint {
  double pulse_width_ns = 25.0;
  double control_energy_pj = 560.0;
  double detuning_mhz = 2300.0;
};

double efficiency_model(SweepAxis axis, double x, const EfficiencyParams& p);
double noise_model(SweepAxis axis, double x, const NoiseParams& p,
                   const OperatingPoint& ref = {});

/// SNR = alpha2 * eta(x) * eta_APD / N_noise(x).
/// Throws UndefinedSnrError when the noise model evaluates to zero.
double snr_model(SweepAxis axis, double x, double alpha2, const Calibration& cal,
                 const EfficiencyParams& ep, const NoiseParams& np,
                 const OperatingPoint& ref = {});

/// Input mean photon number that would give SNR = 1 (SNR linear in alpha2).
double mu_one(double alpha2, double snr);

/// Internal memory efficiency from the end-to-end value.
double eta_mem_from_e2e(double eta_e2e, double filter_transmission);

}  // namespace memlab::models
