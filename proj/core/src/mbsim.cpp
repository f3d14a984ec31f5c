#include "memlab/mbsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "memlab/error.hpp"
#include "parallel.hpp"

namespace memlab::sim {

using detail::require;

namespace {

constexpr double kPerSecondToPerNs = 1e-9;
constexpr double kWindowFwhms = 3.0;
constexpr double kCollectiveStepLimit = 0.5;
constexpr cplx kI{0.0, 1.0};

double gaussian_amplitude(double t, double center, double fwhm) {
  const double u = (t - center) / fwhm;
  return std::exp(-2.0 * std::numbers::ln2 * u * u);
}

// Rates in rad/ns plus the coupling constant of the discretized medium.
struct Coefficients {
  double gamma = 0.0;
  double gamma_s = 0.0;
  double delta = 0.0;
  double delta2 = 0.0;
  double g = 0.0;
  double dz = 0.0;
  int nz = 0;

  Coefficients(const MediumParams& m, int nz_) : nz(nz_) {
    gamma = m.excited_decay_gamma * kPerSecondToPerNs;
    gamma_s = m.ground_decoherence * kPerSecondToPerNs;
    delta = m.one_photon_detuning * kPerSecondToPerNs;
    delta2 = m.two_photon_detuning * kPerSecondToPerNs;
    g = std::sqrt(0.5 * m.effective_optical_depth() * gamma);
    dz = 1.0 / nz;
  }
};

struct Rates {
  double transmitted = 0.0;
  double scattered = 0.0;
  double decohered = 0.0;
  double input = 0.0;
};

// Staggered march: E lives on cell faces, P and S at cell centers. The face
// recursion E[j+1] = E[j] + i g dz P[j] with the midpoint E[j] + i g dz P[j]/2
// driving P[j] conserves photon number exactly in the semi-discrete system.
class Integrator {
 public:
  explicit Integrator(const Coefficients& k) : k_(k) {}

  cplx output_field(const std::vector<cplx>& p, cplx e_in) const {
    cplx e = e_in;
    for (int j = 0; j < k_.nz; ++j) e += kI * k_.g * k_.dz * p[j];
    return e;
  }

  // Derivatives of (P, S) and of the loss/flux accumulators.
  Rates rhs(const std::vector<cplx>& p, const std::vector<cplx>& s, cplx e_in, double omega,
            std::vector<cplx>& dp, std::vector<cplx>& ds) const {
    const cplx decay_p = k_.gamma + kI * k_.delta;
    const cplx decay_s = k_.gamma_s + kI * k_.delta2;
    const cplx step = kI * k_.g * k_.dz;
    cplx e = e_in;
    double sum_p2 = 0.0;
    double sum_s2 = 0.0;
    for (int j = 0; j < k_.nz; ++j) {
      const cplx mid = e + 0.5 * step * p[j];
      dp[j] = -decay_p * p[j] + kI * k_.g * mid + kI * omega * s[j];
      ds[j] = -decay_s * s[j] + kI * omega * p[j];
      e += step * p[j];
      sum_p2 += std::norm(p[j]);
      sum_s2 += std::norm(s[j]);
    }
    Rates r;
    r.transmitted = std::norm(e);
    r.scattered = 2.0 * k_.gamma * sum_p2 * k_.dz;
    r.decohered = 2.0 * k_.gamma_s * sum_s2 * k_.dz;
    r.input = std::norm(e_in);
    return r;
  }

  template <class InputFn, class ControlFn>
  void run(std::vector<cplx>& p, std::vector<cplx>& s, const SimGrid& grid, InputFn&& e_in,
           ControlFn&& omega, std::vector<cplx>& e_out, PhotonBudget& budget) {
    const int nz = k_.nz;
    const double dt = grid.dt_ns();
    std::vector<cplx> k1p(nz), k2p(nz), k3p(nz), k4p(nz);
    std::vector<cplx> k1s(nz), k2s(nz), k3s(nz), k4s(nz);
    std::vector<cplx> tp(nz), ts(nz);

    e_out.assign(grid.nt + 1, cplx{});
    double t = grid.t_begin_ns;
    e_out[0] = output_field(p, e_in(t));
    for (int n = 0; n < grid.nt; ++n) {
      const cplx in0 = e_in(t);
      const cplx in1 = e_in(t + 0.5 * dt);
      const cplx in2 = e_in(t + dt);
      const double om0 = omega(t);
      const double om1 = omega(t + 0.5 * dt);
      const double om2 = omega(t + dt);

      const Rates r1 = rhs(p, s, in0, om0, k1p, k1s);
      for (int j = 0; j < nz; ++j) {
        tp[j] = p[j] + 0.5 * dt * k1p[j];
        ts[j] = s[j] + 0.5 * dt * k1s[j];
      }
      const Rates r2 = rhs(tp, ts, in1, om1, k2p, k2s);
      for (int j = 0; j < nz; ++j) {
        tp[j] = p[j] + 0.5 * dt * k2p[j];
        ts[j] = s[j] + 0.5 * dt * k2s[j];
      }
      const Rates r3 = rhs(tp, ts, in1, om1, k3p, k3s);
      for (int j = 0; j < nz; ++j) {
        tp[j] = p[j] + dt * k3p[j];
        ts[j] = s[j] + dt * k3s[j];
      }
      const Rates r4 = rhs(tp, ts, in2, om2, k4p, k4s);
      for (int j = 0; j < nz; ++j) {
        p[j] += dt / 6.0 * (k1p[j] + 2.0 * k2p[j] + 2.0 * k3p[j] + k4p[j]);
        s[j] += dt / 6.0 * (k1s[j] + 2.0 * k2s[j] + 2.0 * k3s[j] + k4s[j]);
      }
      auto rk = [dt](double a, double b, double c, double d) {
        return dt / 6.0 * (a + 2.0 * b + 2.0 * c + d);
      };
      budget.transmitted += rk(r1.transmitted, r2.transmitted, r3.transmitted, r4.transmitted);
      budget.scattered += rk(r1.scattered, r2.scattered, r3.scattered, r4.scattered);
      budget.decohered += rk(r1.decohered, r2.decohered, r3.decohered, r4.decohered);
      budget.input += rk(r1.input, r2.input, r3.input, r4.input);

      t = grid.t_begin_ns + (n + 1) * dt;
      e_out[n + 1] = output_field(p, in2);
    }
  }

 private:
  const Coefficients& k_;
};

double excitation_norm(const std::vector<cplx>& v, double dz) {
  double sum = 0.0;
  for (const cplx& x : v) sum += std::norm(x);
  return sum * dz;
}

SpinWaveState to_spin_state(const std::vector<cplx>& s, double length_m) {
  SpinWaveState out;
  const int nz = static_cast<int>(s.size());
  out.cell_length_m = length_m;
  out.z_m.resize(nz);
  out.amplitude.resize(nz);
  const double scale = 1.0 / std::sqrt(length_m);
  for (int j = 0; j < nz; ++j) {
    out.z_m[j] = (j + 0.5) * length_m / nz;
    out.amplitude[j] = s[j] * scale;
  }
  return out;
}

// Normalized-length amplitudes on nz cells, resampled linearly if needed.
std::vector<cplx> from_spin_state(const SpinWaveState& st, int nz) {
  require(st.cell_length_m > 0.0, "spin wave: cell length must be > 0");
  const double scale = std::sqrt(st.cell_length_m);
  const int n_in = static_cast<int>(st.amplitude.size());
  std::vector<cplx> out(nz);
  if (n_in == nz) {
    for (int j = 0; j < nz; ++j) out[j] = st.amplitude[j] * scale;
    return out;
  }
  for (int j = 0; j < nz; ++j) {
    const double x = (j + 0.5) / nz * n_in - 0.5;
    const int i0 = std::clamp(static_cast<int>(std::floor(x)), 0, n_in - 1);
    const int i1 = std::min(i0 + 1, n_in - 1);
    const double f = std::clamp(x - i0, 0.0, 1.0);
    out[j] = ((1.0 - f) * st.amplitude[i0] + f * st.amplitude[i1]) * scale;
  }
  return out;
}

SignalEnvelope make_envelope(const SimGrid& grid, std::vector<cplx> field) {
  SignalEnvelope env;
  env.time_ns.resize(grid.nt + 1);
  for (int n = 0; n <= grid.nt; ++n) env.time_ns[n] = grid.t_begin_ns + n * grid.dt_ns();
  env.amplitude = std::move(field);
  return env;
}

void validate_grid(const SimGrid& g) {
  require(g.nz > 0 && g.nt > 0, "grid: nz and nt must be > 0");
  require(g.t_end_ns > g.t_begin_ns, "grid: t_end must exceed t_begin");
}

}  // namespace

double polarization_decay_rate(double natural_half_width_mhz, double coeff_mhz_per_torr,
                               double pressure_torr) {
  require(natural_half_width_mhz >= 0.0 && coeff_mhz_per_torr >= 0.0 && pressure_torr >= 0.0,
          "polarization_decay_rate: inputs must be >= 0");
  return mhz_to_rad_s(natural_half_width_mhz + 0.5 * coeff_mhz_per_torr * pressure_torr);
}

void MediumParams::validate() const {
  require(optical_depth >= 0.0, "medium: optical_depth must be >= 0");
  require(pumping_efficiency >= 0.0 && pumping_efficiency <= 1.0,
          "medium: pumping_efficiency must lie in [0, 1]");
  require(excited_decay_gamma >= 0.0 && ground_decoherence >= 0.0,
          "medium: decay rates must be >= 0");
  require(cell_length_m > 0.0, "medium: cell_length_m must be > 0");
}

double ControlPulse::rabi_at(double t_ns) const {
  return peak_rabi * gaussian_amplitude(t_ns, center_ns, fwhm_ns);
}

void ControlPulse::validate() const {
  require(peak_rabi >= 0.0, "control: peak_rabi must be >= 0");
  require(fwhm_ns > 0.0, "control: fwhm_ns must be > 0");
}

namespace {
// integral of exp(-4 ln2 t^2 / fwhm^2) dt in ns
double gaussian_area_ns(double fwhm_ns) {
  return fwhm_ns * std::sqrt(std::numbers::pi / (4.0 * std::numbers::ln2));
}
}  // namespace

double ControlCalibration::energy_pj(const ControlPulse& c) const {
  // kappa = P_ref / Omega_ref^2; mW * ns = pJ
  const double rel = c.peak_rabi / ref_rabi;
  return ref_power_mw * rel * rel * gaussian_area_ns(c.fwhm_ns);
}

double ControlCalibration::rabi_for_energy(double energy_pj, double fwhm_ns) const {
  require(energy_pj >= 0.0 && fwhm_ns > 0.0, "rabi_for_energy: invalid energy or width");
  return ref_rabi * std::sqrt(energy_pj / (ref_power_mw * gaussian_area_ns(fwhm_ns)));
}

double SignalEnvelope::photon_number() const {
  double sum = 0.0;
  for (std::size_t i = 1; i < time_ns.size(); ++i)
    sum += 0.5 * (std::norm(amplitude[i]) + std::norm(amplitude[i - 1])) *
           (time_ns[i] - time_ns[i - 1]);
  return sum;
}

cplx SignalEnvelope::at(double t_ns) const {
  if (time_ns.empty() || t_ns < time_ns.front() || t_ns > time_ns.back()) return {};
  const auto it = std::upper_bound(time_ns.begin(), time_ns.end(), t_ns);
  if (it == time_ns.end()) return amplitude.back();
  const std::size_t i1 = static_cast<std::size_t>(it - time_ns.begin());
  const std::size_t i0 = i1 - 1;
  const double f = (t_ns - time_ns[i0]) / (time_ns[i1] - time_ns[i0]);
  return (1.0 - f) * amplitude[i0] + f * amplitude[i1];
}

SignalEnvelope SignalEnvelope::scaled(cplx k) const {
  SignalEnvelope out = *this;
  for (auto& a : out.amplitude) a *= k;
  return out;
}

SignalEnvelope gaussian_envelope(double fwhm_ns, double center_ns, double photons,
                                 double t_begin_ns, double t_end_ns, int n) {
  require(fwhm_ns > 0.0 && photons >= 0.0 && n >= 2 && t_end_ns > t_begin_ns,
          "gaussian_envelope: invalid arguments");
  const double peak = std::sqrt(photons / gaussian_area_ns(fwhm_ns));
  SignalEnvelope env;
  env.time_ns.resize(n);
  env.amplitude.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = t_begin_ns + (t_end_ns - t_begin_ns) * i / (n - 1);
    env.time_ns[i] = t;
    env.amplitude[i] = peak * gaussian_amplitude(t, center_ns, fwhm_ns);
  }
  return env;
}

double SpinWaveState::norm() const {
  if (amplitude.empty()) return 0.0;
  return excitation_norm(amplitude, cell_length_m / amplitude.size());
}

double PhotonBudget::closure_error() const {
  const double sources = input + initial_spin;
  const double sinks = transmitted + spin + polarization + scattered + decohered;
  if (sources <= 0.0) return std::abs(sinks);
  return std::abs(sources - sinks) / sources;
}

double fastest_rate_per_ns(const MediumParams& m, const ControlPulse& c) {
  return std::max({c.peak_rabi * kPerSecondToPerNs,
                   std::abs(m.one_photon_detuning) * kPerSecondToPerNs,
                   m.excited_decay_gamma * kPerSecondToPerNs,
                   std::abs(m.two_photon_detuning) * kPerSecondToPerNs});
}

double collective_rate_per_ns(const MediumParams& m) {
  return 0.5 * m.effective_optical_depth() * m.excited_decay_gamma * kPerSecondToPerNs;
}

namespace {
double max_time_step(const MediumParams& m, const ControlPulse& c) {
  const double rate = fastest_rate_per_ns(m, c);
  const double collective = collective_rate_per_ns(m);
  double dt = rate > 0.0 ? 0.05 / rate : INFINITY;
  if (collective > 0.0) dt = std::min(dt, kCollectiveStepLimit / collective);
  return dt;
}
}  // namespace

void check_resolution(const MediumParams& m, const ControlPulse& c, const SimGrid& g) {
  validate_grid(g);
  const double dt_max = max_time_step(m, c);
  const int nz_min = std::max(16, static_cast<int>(std::ceil(2.0 * m.effective_optical_depth())));
  if (g.dt_ns() > dt_max * (1.0 + 1e-12) || g.nz < nz_min) {
    std::ostringstream os;
    os << "under-resolved grid: dt = " << g.dt_ns() << " ns (max " << dt_max
       << " ns), nz = " << g.nz << " (min " << nz_min << ")";
    throw ResolutionError(os.str());
  }
}

SimGrid auto_grid(const MediumParams& m, const ControlPulse& c, double t_begin_ns,
                  double t_end_ns, double fraction) {
  require(t_end_ns > t_begin_ns, "auto_grid: empty time span");
  require(fraction > 0.0 && fraction <= 1.0, "auto_grid: fraction must lie in (0, 1]");
  const double dt_max = max_time_step(m, c);
  const double dt = std::isfinite(dt_max) ? fraction * dt_max : (t_end_ns - t_begin_ns) / 100.0;
  SimGrid g;
  g.t_begin_ns = t_begin_ns;
  g.t_end_ns = t_end_ns;
  g.nt = std::max(100, static_cast<int>(std::ceil((t_end_ns - t_begin_ns) / dt)));
  g.nz = std::max(64, static_cast<int>(std::ceil(3.0 * m.effective_optical_depth())));
  return g;
}

StorageResult simulate_storage(const SignalEnvelope& sig, const ControlPulse& ctrl,
                               const MediumParams& m, const SimGrid& grid) {
  m.validate();
  ctrl.validate();
  require(sig.time_ns.size() == sig.amplitude.size(), "signal: size mismatch");
  check_resolution(m, ctrl, grid);

  const Coefficients k(m, grid.nz);
  Integrator integ(k);
  std::vector<cplx> p(grid.nz), s(grid.nz), e_out;
  PhotonBudget budget;
  integ.run(
      p, s, grid, [&](double t) { return sig.at(t); },
      [&](double t) { return 0.5 * ctrl.rabi_at(t) * kPerSecondToPerNs; }, e_out, budget);

  budget.spin = excitation_norm(s, k.dz);
  budget.polarization = excitation_norm(p, k.dz);

  StorageResult res;
  res.leak = make_envelope(grid, std::move(e_out));
  res.spin = to_spin_state(s, m.cell_length_m);
  res.scattered_fraction = budget.input > 0.0 ? budget.scattered / budget.input : 0.0;
  res.budget = budget;
  return res;
}

RetrievalResult simulate_retrieval(const SpinWaveState& spin, const ControlPulse& ctrl,
                                   const MediumParams& m, const SimGrid& grid, double wait_ns) {
  m.validate();
  ctrl.validate();
  require(wait_ns >= 0.0, "simulate_retrieval: wait must be >= 0");
  check_resolution(m, ctrl, grid);

  const Coefficients k(m, grid.nz);
  std::vector<cplx> s = from_spin_state(spin, grid.nz);
  const double decay = std::exp(-k.gamma_s * wait_ns);
  for (auto& v : s) v *= decay;
  std::vector<cplx> p(grid.nz), e_out;

  PhotonBudget budget;
  budget.initial_spin = excitation_norm(s, k.dz);
  Integrator integ(k);
  integ.run(
      p, s, grid, [](double) { return cplx{}; },
      [&](double t) { return 0.5 * ctrl.rabi_at(t) * kPerSecondToPerNs; }, e_out, budget);
  budget.spin = excitation_norm(s, k.dz);
  budget.polarization = excitation_norm(p, k.dz);

  RetrievalResult res;
  res.output = make_envelope(grid, std::move(e_out));
  res.residual_spin = to_spin_state(s, m.cell_length_m);
  res.budget = budget;
  return res;
}

double internal_efficiency(const SignalEnvelope& input, const SignalEnvelope& output) {
  const double n_in = input.photon_number();
  require(n_in > 0.0, "internal_efficiency: input photon number must be > 0");
  return output.photon_number() / n_in;
}

std::vector<double> weak_probe_transmission_spectrum(const MediumParams& m, double ctrl_rabi,
                                                     std::span<const double> probe_detunings,
                                                     int nz) {
  m.validate();
  require(ctrl_rabi >= 0.0, "weak_probe_transmission_spectrum: ctrl_rabi must be >= 0");
  require(nz > 0, "weak_probe_transmission_spectrum: nz must be > 0");
  const Coefficients k(m, nz);
  const double omega = 0.5 * ctrl_rabi * kPerSecondToPerNs;
  const double a = 0.5 * k.g * k.g * k.dz;
  std::vector<double> out;
  out.reserve(probe_detunings.size());
  for (double det : probe_detunings) {
    const double d = det * kPerSecondToPerNs;
    // Steady state of (P, S) for a CW probe oscillating as exp(-i d t).
    cplx denom = k.gamma + kI * (k.delta - d);
    const cplx ground = k.gamma_s + kI * (k.delta2 - d);
    bool dark = false;
    if (omega > 0.0) {
      if (std::abs(ground) == 0.0)
        dark = true;
      else
        denom += omega * omega / ground;
    }
    if (dark || a == 0.0) {
      out.push_back(1.0);
      continue;
    }
    // One cell of the staggered march: E[j+1] = E[j] (D - a) / (D + a).
    const cplx cell = (denom - a) / (denom + a);
    out.push_back(std::pow(std::norm(cell), nz));
  }
  return out;
}

std::vector<CurvePoint> efficiency_vs_bandwidth_curve(const MediumParams& m,
                                                      const ControlPulse& base,
                                                      std::span<const double> dt_list,
                                                      const CurveOptions& opt) {
  for (double dt : dt_list) require(dt > 0.0, "efficiency_vs_bandwidth_curve: dt must be > 0");
  require(opt.reference_dt_ns > 0.0, "efficiency_vs_bandwidth_curve: reference_dt must be > 0");
  std::vector<CurvePoint> out(dt_list.size());
  detail::parallel_for(dt_list.size(), opt.jobs, [&](std::size_t i) {
    const double dt = dt_list[i];
    ControlPulse ctrl = base;
    double offset = opt.signal_offset_ns;
    if (opt.scaling == ControlScaling::Adiabatic) {
      const double s = dt / opt.reference_dt_ns;
      ctrl.fwhm_ns = base.fwhm_ns * s;
      ctrl.center_ns = base.center_ns * s;
      ctrl.peak_rabi = base.peak_rabi / std::sqrt(s);
      offset *= s;
    }
    const double sig_center = ctrl.center_ns + offset;
    const double t0 = std::min(sig_center - kWindowFwhms * dt,
                               ctrl.center_ns - kWindowFwhms * ctrl.fwhm_ns);
    const double t1 = std::max(sig_center + kWindowFwhms * dt,
                               ctrl.center_ns + kWindowFwhms * ctrl.fwhm_ns);
    const SimGrid wg = auto_grid(m, ctrl, t0, t1, opt.grid_fraction);
    const SignalEnvelope sig = gaussian_envelope(dt, sig_center, 1.0, t0, t1, wg.nt + 1);
    const StorageResult st = simulate_storage(sig, ctrl, m, wg);

    ControlPulse read = ctrl;
    read.center_ns = kWindowFwhms * ctrl.fwhm_ns;
    const SimGrid rg = auto_grid(m, read, 0.0, 2.0 * kWindowFwhms * ctrl.fwhm_ns,
                                 opt.grid_fraction);
    const RetrievalResult rt = simulate_retrieval(st.spin, read, m, rg, opt.wait_ns);
    out[i] = {dt, rt.output.photon_number() / st.budget.input};
  });
  return out;
}

MemoryRun run_memory(const SignalEnvelope& sig, const ControlPulse& write,
                     const ControlPulse& read, const MediumParams& m, double grid_fraction,
                     int nz_multiplier) {
  require(nz_multiplier >= 1, "run_memory: nz_multiplier must be >= 1");
  require(!sig.time_ns.empty(), "run_memory: empty signal");
  require(read.center_ns > write.center_ns, "run_memory: read pulse must follow the write pulse");
  const double midpoint = 0.5 * (write.center_ns + read.center_ns);
  const double w0 = std::min(sig.time_ns.front(), write.center_ns - kWindowFwhms * write.fwhm_ns);
  const double w1 = std::min(
      std::max(sig.time_ns.back(), write.center_ns + kWindowFwhms * write.fwhm_ns), midpoint);
  require(w1 > w0, "run_memory: empty write window");

  MemoryRun run;
  SimGrid wg = auto_grid(m, write, w0, w1, grid_fraction);
  wg.nz *= nz_multiplier;
  run.storage = simulate_storage(sig, write, m, wg);

  const double r0 = std::max(w1, read.center_ns - kWindowFwhms * read.fwhm_ns);
  const double r1 = read.center_ns + kWindowFwhms * read.fwhm_ns;
  ControlPulse local = read;
  local.center_ns = read.center_ns - r0;
  SimGrid rg = auto_grid(m, local, 0.0, r1 - r0, grid_fraction);
  rg.nz *= nz_multiplier;
  run.retrieval = simulate_retrieval(run.storage.spin, local, m, rg, r0 - w1);
  for (double& t : run.retrieval.output.time_ns) t += r0;
  run.eta_mem = run.retrieval.output.photon_number() / run.storage.budget.input;
  return run;
}

}  // namespace memlab::sim
