#pragma once

// One-dimensional three-level Lambda-system Maxwell-Bloch model of EIT/Raman
// storage and retrieval of a weak signal field, in the co-moving frame:
//
//   dE/dz = i g P
//   dP/dt = -(gamma + i Delta) P + i g E + i Omega(t) S
//   dS/dt = -(gamma_s + i delta2) S + i Omega(t) P
//
// z is normalized to the cell length, g^2 = OD * gamma / 2 so that the
// resonant intensity transmission at Omega = 0 is exp(-OD), and Omega(t) is
// half the control Rabi frequency. |E|^2 is a photon flux (photons/ns);
// integral |P|^2 + |S|^2 dz counts atomic excitations.

#include <complex>
#include <span>
#include <vector>

namespace memlab::sim {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586;

/// rad/s from a frequency in MHz.
constexpr double mhz_to_rad_s(double mhz) { return kTwoPi * mhz * 1e6; }

/// Polarization decay (half-width, rad/s) from the natural half-width plus
/// buffer-gas pressure broadening. `coeff_mhz_per_torr` is an FWHM coefficient.
double polarization_decay_rate(double natural_half_width_mhz, double coeff_mhz_per_torr,
                               double pressure_torr);

struct MediumParams {
  double optical_depth = 100.0;  // resonant intensity OD of a fully pumped ensemble
  double pumping_efficiency = 0.8;
  double excited_decay_gamma = polarization_decay_rate(2.3, 19.5, 5.0);
  double ground_decoherence = mhz_to_rad_s(0.2);
  double one_photon_detuning = mhz_to_rad_s(2300.0);  // > 0: red detuned
  double two_photon_detuning = 0.0;
  double cell_length_m = 0.075;

  double effective_optical_depth() const { return optical_depth * pumping_efficiency; }
  void validate() const;
};

struct ControlPulse {
  double peak_rabi = mhz_to_rad_s(540.0);  // full Rabi frequency, rad/s
  double fwhm_ns = 40.0;                   // intensity FWHM
  double center_ns = 0.0;

  /// Rabi frequency (rad/s) at time t.
  double rabi_at(double t_ns) const;
  void validate() const;
};

/// Control energy <-> Rabi calibration E = kappa * integral Omega^2 dt, fixed
/// from a reference (peak power, peak Rabi frequency) pair.
struct ControlCalibration {
  double ref_power_mw = 12.9;
  double ref_rabi = mhz_to_rad_s(540.0);

  double energy_pj(const ControlPulse& c) const;
  /// Peak Rabi frequency that gives `energy_pj` for a pulse of the given FWHM.
  double rabi_for_energy(double energy_pj, double fwhm_ns) const;
};

struct SignalEnvelope {
  std::vector<double> time_ns;
  std::vector<cplx> amplitude;  // sqrt(photons / ns)

  double photon_number() const;
  /// Linear interpolation; zero outside the sampled span.
  cplx at(double t_ns) const;
  SignalEnvelope scaled(cplx k) const;
};

/// Transform-limited Gaussian pulse with intensity FWHM `fwhm_ns` carrying
/// `photons` on average, sampled on n points over [t_begin, t_end].
SignalEnvelope gaussian_envelope(double fwhm_ns, double center_ns, double photons,
                                 double t_begin_ns, double t_end_ns, int n);

struct SpinWaveState {
  std::vector<double> z_m;       // cell centers in [0, L]
  std::vector<cplx> amplitude;   // sqrt(excitations / m)
  double cell_length_m = 0.0;

  double norm() const;  // integral |S|^2 dz
};

struct SimGrid {
  int nz = 128;
  int nt = 20000;
  double t_begin_ns = 0.0;
  double t_end_ns = 100.0;

  double dt_ns() const { return (t_end_ns - t_begin_ns) / nt; }
};

/// Photon-number bookkeeping for one run. Everything is in photons.
struct PhotonBudget {
  double input = 0.0;        // signal photons entering at z = 0
  double initial_spin = 0.0; // spin-wave excitations at t_begin
  double transmitted = 0.0;  // photons leaving at z = L
  double spin = 0.0;         // spin-wave excitations at t_end
  double polarization = 0.0; // optical coherence left at t_end
  double scattered = 0.0;    // lost through excited-state decay
  double decohered = 0.0;    // lost through ground-state decoherence

  double closure_error() const;  // |sources - sinks| / sources
};

struct StorageResult {
  SignalEnvelope leak;
  SpinWaveState spin;
  double scattered_fraction = 0.0;
  PhotonBudget budget;
};

struct RetrievalResult {
  SignalEnvelope output;
  SpinWaveState residual_spin;
  PhotonBudget budget;
};

/// Largest of the control Rabi frequency, detunings and polarization decay,
/// in rad/ns.
double fastest_rate_per_ns(const MediumParams& m, const ControlPulse& c);

/// Rate OD * gamma / 2 (rad/ns) of the stiff collective mode of P.
double collective_rate_per_ns(const MediumParams& m);

/// Throws ResolutionError unless dt <= 0.05 / fastest rate,
/// dt <= 0.5 / collective rate and nz >= max(16, 2 OD).
void check_resolution(const MediumParams& m, const ControlPulse& c, const SimGrid& g);

/// Grid over [t_begin, t_end] with dt = `fraction` times the largest step
/// check_resolution accepts, and nz = max(64, 3 OD).
SimGrid auto_grid(const MediumParams& m, const ControlPulse& c, double t_begin_ns,
                  double t_end_ns, double fraction = 0.5);

StorageResult simulate_storage(const SignalEnvelope& sig, const ControlPulse& ctrl,
                               const MediumParams& m, const SimGrid& grid);

/// Reads out `spin` after an additional dark wait (amplitude decays as
/// exp(-gamma_s * wait)). Control times refer to the retrieval grid.
RetrievalResult simulate_retrieval(const SpinWaveState& spin, const ControlPulse& ctrl,
                                   const MediumParams& m, const SimGrid& grid, double wait_ns);

double internal_efficiency(const SignalEnvelope& input, const SignalEnvelope& output);

/// Steady-state intensity transmission of a weak CW probe at each probe
/// detuning (rad/s, relative to the nominal signal frequency) through the
/// discretized medium with a constant control of Rabi frequency `ctrl_rabi`.
std::vector<double> weak_probe_transmission_spectrum(const MediumParams& m, double ctrl_rabi,
                                                     std::span<const double> probe_detunings,
                                                     int nz = 4096);

enum class ControlScaling {
  /// The same control pulse for every signal width.
  Fixed,
  /// Control stretched with the signal at constant pulse area: for width dt
  /// the FWHM and signal offset scale by s = dt / reference_dt_ns and the
  /// peak Rabi frequency by 1 / sqrt(s). Isolates the adiabatic limit.
  Adiabatic,
};

struct CurveOptions {
  ControlScaling scaling = ControlScaling::Fixed;
  double reference_dt_ns = 25.0;
  double signal_offset_ns = 0.0;  // signal center minus write-control center
  double wait_ns = 0.0;           // dark time between write and read windows
  double grid_fraction = 0.5;
  int jobs = 1;
};

struct CurvePoint {
  double dt_ns = 0.0;
  double eta_mem = 0.0;
};

/// Store and retrieve a one-photon Gaussian of each width with identical
/// write and read control pulses; returns the internal efficiency.
/// Points are independent and run on `opt.jobs` threads.
std::vector<CurvePoint> efficiency_vs_bandwidth_curve(const MediumParams& m,
                                                      const ControlPulse& ctrl,
                                                      std::span<const double> dt_list,
                                                      const CurveOptions& opt = {});

struct MemoryRun {
  StorageResult storage;
  RetrievalResult retrieval;
  double eta_mem = 0.0;
};

/// Write with `write` and read with `read` on auto grids; all times are on
/// the signal's time axis. Each window spans its control center +- 3 FWHM,
/// split at the midpoint when the pulses are closer than that. A dark gap
/// between the windows is applied as pure ground-state decay.
MemoryRun run_memory(const SignalEnvelope& sig, const ControlPulse& write,
                     const ControlPulse& read, const MediumParams& m,
                     double grid_fraction = 0.5, int nz_multiplier = 1);

}  // namespace memlab::sim
