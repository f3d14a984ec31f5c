// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "memlab/config.hpp"
#include "memlab/counting.hpp"
#include "memlab/fitting.hpp"
#include "memlab/io.hpp"
#include "memlab/mbsim.hpp"
#include "memlab/models.hpp"
#include "memlab/noise_fit.hpp"
#include "memlab/report.hpp"
#include "memlab/sweep.hpp"
#include "memlab/voigt.hpp"
#include "oracles.hpp"
#include "scan.hpp"

using namespace memlab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Collects named sub-checks; the criterion passes when all of them do.
class Checks {
 public:
  void operator()(bool ok, const std::string& what) {
    if (!ok) failed_.push_back(what);
    ++n_;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
  bool ok() const { return failed_.empty(); }
  std::string summary() const {
    std::string s = notes_;
    for (const auto& f : failed_) s += (s.empty() ? "" : "; ") + std::string("FAILED ") + f;
    return s;
  }

 private:
  int n_ = 0;
  std::vector<std::string> failed_;
  std::string notes_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------

void metrics_chain(Checks& ok) {
  const models::Calibration cal;
  const double attempts = cal.attempts();
  // Counts that a memory with eta_mem = 0.33 behind a 0.4 filter would give at |alpha|^2 = 1.
  const double n_noise = 1.0e4;
  const double n_signal = n_noise + 0.33 * 0.4 * cal.apd_efficiency * attempts;
  const double eta_e2e = counting::eta_e2e_from_counts(n_signal, n_noise, 1.0, cal);
  ok(std::abs(eta_e2e - 0.132) < 1e-12, "eta_e2e = 0.132");
  ok(std::abs(eta_e2e - 0.13) <= 0.02, "eta_e2e within 13(2)%");
  ok(std::abs(models::eta_mem_from_e2e(eta_e2e, 0.4) - 0.33) < 1e-12, "eta_mem inverse");
  const double mu1 = models::mu_one(1.0, 14.0);
  ok(std::abs(mu1 - 0.0714) < 1e-4, "mu1 = 0.0714");
  ok(std::abs(mu1 - 0.07) <= 0.02, "mu1 within 0.07(2)");
  ok.note("eta_e2e " + fmt("%.4f", eta_e2e) + ", mu1 " + fmt("%.4f", mu1));
}

void model_anchors(Checks& ok) {
  models::EfficiencyParams e;
  e.eta0_width = 0.128;
  e.mem_bandwidth_fwhm_mhz = 220.0;
  e.eta0_energy = 0.107;
  e.energy_scale_a_pj = 156.0;
  models::NoiseParams n;
  n.fwm_quad_b = 0.0;
  n.srs_lin_c = 4e-5;
  n.fl_amp_d = 7e-3;
  n.fl_sat_e_pj = 16.0;
  const double a = models::eta_vs_pulse_width(25.0, e);
  const double b = models::eta_vs_control_energy(560.0, e);
  const double c = models::noise_vs_energy(560.0, n);
  ok(std::abs(a - 0.1143) <= 1e-4, "eta_vs_pulse_width(25) = 0.1143");
  ok(std::abs(b - 0.0810) <= 1e-4, "eta_vs_control_energy(560) = 0.0810");
  ok(std::abs(c - 0.0292) <= 1e-4, "noise_vs_energy(560) = 0.0292");
  ok.note(fmt("%.5f", a) + ", " + fmt("%.5f", b) + ", " + fmt("%.5f", c));
}

void histogram_round_trip(Checks& ok) {
  const config::RunConfig c = config::parse_config("{}");
  const auto& cal = c.calibration;
  const auto env = sweep::model_envelopes(c, c.synth.eta_e2e);
  const double split = c.timing.retrieval_split_ns();
  const counting::DetectionWindow w{split, c.analysis.t_max_ns};
  const double attempts = cal.attempts();

  // Expectation inside the window: Gaussian retrieval (8 ns FWHM at 140 ns) cut at t_min, t_max.
  const double sigma = 8.0 / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const double center = c.timing.read_center_ns();
  const double frac = 0.5 * (std::erf((w.t_max_ns - center) / (sigma * std::sqrt(2.0))) +
                             std::erf((center - w.t_min_ns) / (sigma * std::sqrt(2.0))));
  const double eta_true = c.synth.eta_e2e * frac;
  const double snr_true = eta_true * cal.apd_efficiency / c.synth.noise_per_attempt;

  int eta_ok = 0, snr_ok = 0;
  std::map<double, int> storage;
  std::vector<double> st;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto h = sweep::synthesize_pair(c, env, c.synth.noise_per_attempt, seed);
    const double ns = static_cast<double>(counting::counts_in_window(h.signal, w));
    const double nn = static_cast<double>(counting::counts_in_window(h.noise, w));
    const double eta = counting::eta_e2e_from_counts(ns, nn, 1.0, cal);
    const double snr = counting::snr_from_counts(ns, nn);
    const double s = ns - nn;
    const double eta_se = std::sqrt(ns + nn) / (cal.apd_efficiency * attempts);
    const double snr_se = std::sqrt(ns / (nn * nn) + s * s / (nn * nn * nn));
    eta_ok += std::abs(eta - eta_true) <= 3.0 * eta_se;
    snr_ok += std::abs(snr - snr_true) <= 3.0 * snr_se;
    const double t = counting::extract_storage_time(counting::noise_correct(h.signal, h.noise), split);
    ++storage[t];
    st.push_back(t);
  }
  ok(eta_ok >= 95, "eta_e2e within 3 SE in >= 95 seeds");
  ok(snr_ok >= 95, "SNR within 3 SE in >= 95 seeds");

  // Storage time: exact on the expected histogram, and the modal and median value over seeds.
  const auto [t0, t1] = counting::default_span(c.timing);
  counting::RealHistogram expected;
  expected.t0_ns = t0;
  expected.values = counting::expected_counts(env.retrieved, env.leak, sweep::span_noise(c, c.synth.noise_per_attempt),
                                              cal, t0, t1, 1.0);
  const double t_exp = counting::extract_storage_time(expected, split);
  std::sort(st.begin(), st.end());
  const auto mode = std::max_element(storage.begin(), storage.end(),
                                     [](const auto& a, const auto& b) { return a.second < b.second; });
  ok(t_exp == 140.0, "storage time 140 ns on expected counts");
  ok(st[49] == 140.0 && st[50] == 140.0, "median storage time 140 ns");
  ok(mode->first == 140.0, "modal storage time 140 ns");
  ok.note("eta " + std::to_string(eta_ok) + "/100, SNR " + std::to_string(snr_ok) +
          "/100, SNR_true " + fmt("%.2f", snr_true) + ", storage expected " + fmt("%.0f", t_exp) +
          " ns, seeds " + fmt("%.0f", st.front()) + ".." + fmt("%.0f", st.back()) + " ns with " +
          std::to_string(storage[140.0]) + " at 140");
}

void noise_decomposition(Checks& ok) {
  const scan::Truth truth;
  const auto sc = scan::make_scan(0, truth);
  const auto rows = fit::decompose_vs_detuning(sc, 2);
  const double z = scan::sidak_z(static_cast<int>(rows.size()));
  int comp_ok = 0, fwm_ok = 0;
  for (const auto& r : rows) {
    if (!r.components) continue;
    const auto& c = *r.components;
    const double v = voigt::voigt_unit_peak(r.delta_mhz, 380.0, 920.0);
    comp_ok += std::abs(c.value.srs - truth.n_srs) <= z * c.sigma.srs &&
               std::abs(c.value.fluorescence - truth.n_fl * v) <= z * c.sigma.fluorescence;
    fwm_ok += std::abs(c.value.fwm) <= z * c.sigma.fwm;
  }
  const int n = static_cast<int>(rows.size());
  ok(comp_ok == n, "SRS and fluorescence components at every detuning");
  ok(fwm_ok == n, "FWM consistent with zero at every detuning");

  const fit::TotalNoiseFit t = fit::fit_total_noise(fit::detuning_points(rows));
  ok(t.converged, "total-noise fit converged");
  // Three parameters jointly at the family-wise 2-sigma rate.
  const double z3 = scan::sidak_z(3);
  ok(std::abs(t.params[0] - truth.n_srs) <= z3 * t.sigma[0], "N_SRS recovered");
  ok(std::abs(t.params[1] - truth.n_fl) <= z3 * t.sigma[1], "N_fl recovered");
  ok(std::abs(t.params[2] - truth.n_fwm) <= z3 * std::max(t.sigma[2], 1e-300) || t.n_fwm_pinned,
     "N_FWM consistent with zero");
  ok.note(std::to_string(comp_ok) + "/" + std::to_string(n) + " detunings, z " + fmt("%.3f", z) +
          "; N_SRS " + fmt("%.5f", t.params[0]) + "(" + fmt("%.5f", t.sigma[0]) + "), N_fl " +
          fmt("%.5f", t.params[1]) + "(" + fmt("%.5f", t.sigma[1]) + "), N_FWM " +
          fmt("%.2g", t.params[2]));
}

void voigt_accuracy(Checks& ok) {
  double worst = 0.0;
  for (double d = -5000.0; d <= 5000.0; d += 25.0) {
    const double ref = oracle::voigt_convolution(d, 380.0, 920.0);
    const double v = voigt::voigt_unit_peak(d, 380.0, 920.0);
    worst = std::max(worst, std::abs(v - ref) / ref);
  }
  const double w_ref = oracle::fwhm_by_bisection(
      [](double d) { return oracle::voigt_convolution(d, 380.0, 920.0); }, 3000.0);
  const double w = voigt::voigt_fwhm(380.0, 920.0);
  ok(worst < 1e-5, "max relative error < 1e-5");
  ok(std::abs(w / w_ref - 1.0) < 5e-3, "FWHM within 0.5%");
  ok.note("max rel err " + fmt("%.2e", worst) + ", FWHM " + fmt("%.1f", w) + " vs oracle " +
          fmt("%.1f", w_ref) + " MHz");
}

sim::MediumParams resonant(double od) {
  sim::MediumParams m;
  m.optical_depth = od;
  m.pumping_efficiency = 1.0;
  m.one_photon_detuning = 0.0;
  m.ground_decoherence = 0.0;
  return m;
}

void simulator_physics(Checks& ok) {
  using sim::ControlPulse;
  {
    const sim::MediumParams m = resonant(2.0);
    ControlPulse c;
    c.peak_rabi = 0.0;
    c.fwhm_ns = 10.0;
    const auto sig = sim::gaussian_envelope(100.0, 0.0, 1.0, -300.0, 300.0, 2001);
    const auto r = sim::simulate_storage(sig, c, m, sim::auto_grid(m, c, -300.0, 300.0));
    const double t = r.leak.photon_number() / r.budget.input;
    ok(std::abs(t / std::exp(-2.0) - 1.0) < 0.01, "Beer-Lambert");
    ok.note("Beer-Lambert " + fmt("%.5f", t) + " vs " + fmt("%.5f", std::exp(-2.0)));
  }
  {
    const sim::MediumParams m = resonant(10.0);
    ControlPulse c;
    c.peak_rabi = sim::mhz_to_rad_s(200.0);
    c.fwhm_ns = 20000.0;
    const auto sig = sim::gaussian_envelope(200.0, 0.0, 1.0, -600.0, 600.0, 4001);
    const auto r = sim::simulate_storage(sig, c, m, sim::auto_grid(m, c, -600.0, 600.0, 1.0));
    const double t = r.leak.photon_number() / r.budget.input;
    ok(t > 0.99, "EIT transparency");
    ok.note("EIT T " + fmt("%.4f", t));
  }
  {
    const sim::MediumParams m;
    const double omega = sim::mhz_to_rad_s(540.0);
    const double gamma = m.excited_decay_gamma * 1e-9;
    const double g2 = 0.5 * m.effective_optical_depth() * gamma;
    std::vector<double> dets;
    for (int i = -40; i <= 40; ++i) dets.push_back(sim::mhz_to_rad_s(2300.0 + 125.0 * i));
    const auto t = sim::weak_probe_transmission_spectrum(m, omega, dets);
    double worst = 0.0;
    for (std::size_t i = 0; i < dets.size(); ++i) {
      const double ref = oracle::eit_transmission(dets[i] * 1e-9, g2, gamma, m.one_photon_detuning * 1e-9,
                                                  m.ground_decoherence * 1e-9, 0.0, 0.5 * omega * 1e-9);
      worst = std::max(worst, std::abs(t[i] - ref) / ref);
    }
    ok(worst < 0.01, "weak-probe spectrum");
    ok.note("weak-probe max rel err " + fmt("%.1e", worst));
  }
  {
    sim::MediumParams m = resonant(60.0);
    const auto sig = sim::gaussian_envelope(30.0, 0.0, 1.0, -75.0, 126.0, 3001);
    ControlPulse w;
    w.peak_rabi = 0.9e9;
    w.fwhm_ns = 42.0;
    w.center_ns = -9.0;
    const auto s = sim::simulate_storage(sig, w, m, sim::auto_grid(m, w, -75.0, 126.0, 1.0));
    ok(s.budget.closure_error() < 1e-3, "photon budget");
    ok.note("budget closure " + fmt("%.1e", s.budget.closure_error()));
  }
  {
    sim::MediumParams m;
    m.optical_depth = 20.0;
    m.ground_decoherence = sim::mhz_to_rad_s(0.5);
    const auto sig = sim::gaussian_envelope(25.0, 0.0, 1.0, -75.0, 75.0, 2001);
    ControlPulse write;
    write.fwhm_ns = 40.0;
    write.center_ns = -20.0;
    std::vector<double> waits, logs;
    for (double rc : {160.0, 200.0, 240.0, 280.0}) {
      ControlPulse read = write;
      read.center_ns = rc;
      waits.push_back(rc);
      logs.push_back(std::log(sim::run_memory(sig, write, read, m).eta_mem));
    }
    const double rate = -oracle::slope(waits, logs);
    const double want = 2.0 * m.ground_decoherence * 1e-9;
    ok(std::abs(rate / want - 1.0) < 0.01, "decay slope 2 gamma_gs");
    ok.note("decay slope/2gamma " + fmt("%.6f", rate / want));
  }
  {
    const config::RunConfig c = config::parse_config("{}");
    const sim::MediumParams m = c.medium.params();
    const auto write = c.control.pulse(c.timing.write_center_ns(), c.control.energy_pj);
    const auto read = c.control.pulse(c.timing.read_center_ns(), c.control.energy_pj);
    const auto sig = sim::gaussian_envelope(c.signal.fwhm_ns, 0.0, c.signal.photons, -100.0, 100.0, 2001);
    const double coarse = sim::run_memory(sig, write, read, m, 0.5, 1).eta_mem;
    const double fine = sim::run_memory(sig, write, read, m, 0.25, 2).eta_mem;
    const double rel = std::abs(fine / coarse - 1.0);
    ok(rel < 5e-3, "grid halving");
    ok.note("grid halving eta_mem " + fmt("%.6f", coarse) + " -> " + fmt("%.6f", fine) +
            " (rel " + fmt("%.1e", rel) + ")");
  }
}

struct FitCase {
  const char* model;
  std::vector<double> truth, init, lower, upper;
  double x0, x1;
};

std::vector<FitCase> fit_cases() {
  return {
      {"proportional", {2.0}, {0.5}, {-kInf}, {kInf}, 0.1, 10.0},
      {"linear", {0.3, -1.7}, {0.0, 0.0}, {-kInf, -kInf}, {kInf, kInf}, -5.0, 5.0},
      {"noise_energy", {2e-8, 4e-5, 7e-3, 16.0}, {1e-8, 2e-5, 3e-3, 40.0}, {0, 0, 0, 0}, {kInf, kInf, kInf, 1e4}, 5.0, 560.0},
      {"noise_detuning_total", {0.014, 0.007, 0.0}, {0.01, 0.01, 0.0}, {0, 0, 0}, {kInf, kInf, 0}, -3000.0, 3000.0},
      {"eta_pulse_width", {0.128, 220.0}, {0.2, 100.0}, {0, 1}, {1, 1e5}, 2.0, 200.0},
      {"eta_energy", {0.107, 156.0}, {0.2, 50.0}, {0, 0}, {1, 1e4}, 30.0, 1500.0},
      {"eta_detuning", {0.13, 1000.0, 150.0, 2.0}, {0.1, 700.0, 0.0, 1.0}, {0, 10, -5000, 0}, {1, 1e4, 5000, 20}, -3000.0, 3000.0},
      {"exp_decay", {3.0, 0.02}, {1.0, 0.05}, {0, 0}, {kInf, kInf}, 0.0, 200.0},
  };
}

void fit_engine(Checks& ok) {
  double worst_chi2 = 0.0, worst_grad = 0.0;
  for (const FitCase& c : fit_cases()) {
    const fit::Model m = fit::make_model(c.model);
    fit::Dataset d;
    for (int i = 0; i < 25; ++i) {
      const double x = c.x0 + (c.x1 - c.x0) * i / 24.0;
      d.x.push_back(x);
      d.y.push_back(m.value(x, c.truth));
    }
    double scale = 0.0;
    for (double y : d.y) scale = std::max(scale, std::abs(y));
    d.sigma_y.assign(d.x.size(), 1e-3 * scale);
    const fit::FitResult r = fit::least_squares_fit(m, d, c.init, c.lower, c.upper);
    worst_chi2 = std::max(worst_chi2, r.converged ? r.chi2_reduced : kInf);

    for (int i = 0; i < 40; ++i) {
      const double x = c.x0 + (c.x1 - c.x0) * (i + 0.37) / 40.0;
      std::vector<double> g(m.n_params());
      m.gradient(x, c.truth, g);
      const auto fd = fit::finite_difference_gradient(m, x, c.truth);
      double gs = 0.0;
      for (double v : g) gs = std::max(gs, std::abs(v));
      for (std::size_t j = 0; j < g.size(); ++j)
        worst_grad = std::max(worst_grad, std::abs(g[j] - fd[j]) / std::max(std::abs(g[j]), 1e-6 * gs));
    }
  }
  ok(worst_chi2 < 1e-10, "exact data chi2_red < 1e-10");
  ok(worst_grad <= 1e-4, "Jacobian vs finite differences");

  const fit::Model ne = fit::make_model("noise_energy");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    fit::Dataset d;
    for (int i = 0; i < 8; ++i) {
      const double x = 70.0 * (i + 1);
      d.x.push_back(x);
      d.y.push_back(1e-2 * (u(rng) - 0.3) + 3e-5 * x);
      d.sigma_y.push_back(1e-3);
    }
    const std::vector<double> lo{0.0, 1e-5 * u(rng), 0.0, 1.0};
    const std::vector<double> hi{1e-7, 3e-5, 5e-3 * u(rng) + 1e-4, 200.0};
    const fit::FitResult r = fit::least_squares_fit(ne, d, {0.5e-7, hi[1], 0.5 * hi[2], 50.0}, lo, hi);
    for (std::size_t j = 0; j < 4; ++j) violations += r.params[j] < lo[j] || r.params[j] > hi[j];
  }
  ok(violations == 0, "bounds never violated");

  std::normal_distribution<double> n(0.0, 1.0);
  fit::Dataset d;
  for (int i = 0; i < 12; ++i) {
    const double x = 40.0 * (i + 1);
    d.x.push_back(x);
    d.y.push_back(4e-5 * x + 7e-3 * x / (16.0 + x) + 4e-4 * n(rng));
    d.sigma_y.push_back(4e-4);
  }
  const std::vector<double> init{1e-8, 1e-5, 1e-3, 50.0}, lo{0, 0, 0, 0}, hi{kInf, kInf, kInf, 1e4};
  const fit::FitResult ref = fit::least_squares_fit(ne, d, init, lo, hi);
  std::vector<std::size_t> idx(d.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  bool same = true;
  for (int k = 0; k < 20; ++k) {
    std::shuffle(idx.begin(), idx.end(), rng);
    fit::Dataset p;
    for (auto i : idx) {
      p.x.push_back(d.x[i]);
      p.y.push_back(d.y[i]);
      p.sigma_y.push_back(d.sigma_y[i]);
    }
    const fit::FitResult r = fit::least_squares_fit(ne, p, init, lo, hi);
    same = same && std::memcmp(r.params.data(), ref.params.data(), sizeof(double) * 4) == 0 &&
           std::memcmp(r.covariance.data(), ref.covariance.data(), sizeof(double) * 16) == 0 &&
           std::memcmp(&r.chi2, &ref.chi2, sizeof(double)) == 0;
  }
  ok(same, "permutation invariance bit-exact");
  ok.note("worst chi2_red " + fmt("%.1e", worst_chi2) + ", worst gradient rel err " +
          fmt("%.1e", worst_grad) + ", " + std::to_string(violations) + " bound violations");
}

#ifdef MEMLAB_CLI_PATH
int run_cli(const std::filesystem::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && env -u MEMLAB_SEED '" MEMLAB_CLI_PATH "' " +
                          args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

void determinism(Checks& ok) {
  const config::RunConfig c = config::parse_config(R"({"sweep": {"synthesize_counts": true}})");
  const std::string a = sweep::sweep_csv(c, sweep::run_sweep(c, 2024, 1));
  const std::string b = sweep::sweep_csv(c, sweep::run_sweep(c, 2024, 4));
  ok(a == b, "library sweep CSV identical across runs and worker counts");

  const config::RunConfig d = config::parse_config(
      R"({"sweep": {"axis": "detuning_mhz", "start": -3000, "stop": 3000, "steps": 13}})");
  ok(sweep::sweep_csv(d, sweep::run_sweep(d, 1, 1)) == sweep::sweep_csv(d, sweep::run_sweep(d, 1, 3)),
     "detuning sweep CSV identical");

#ifdef MEMLAB_CLI_PATH
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "memlab_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  io::write_text(dir / "sweep.json", R"({"sweep": {"synthesize_counts": true}})");
  int rc = run_cli(dir, "sweep --config sweep.json --seed 7 --out a.csv --svg a.svg");
  rc |= run_cli(dir, "sweep --config sweep.json --seed 7 --out b.csv --svg b.svg --jobs 3");
  rc |= run_cli(dir, "counts synth --seed 7 --out s");
  io::write_text(dir / "an.json", R"({"analysis": {"tradeoff_t_max_ns": [150, 155, 170]},
      "inputs": {"signal_histogram": "s/signal.csv", "noise_histogram": "s/noise.csv"}})");
  rc |= run_cli(dir, "analyze --config an.json --out a.json");
  rc |= run_cli(dir, "analyze --config an.json --out b.json");
  ok(rc == 0, "CLI runs succeed");
  ok(io::read_text(dir / "a.csv") == io::read_text(dir / "b.csv"), "CLI sweep CSV identical");
  ok(io::read_text(dir / "a.svg") == io::read_text(dir / "b.svg"), "CLI sweep SVG identical");
  ok(io::read_text(dir / "a.json") == io::read_text(dir / "b.json"), "CLI analysis JSON identical");
  ok.note("library and CLI outputs compared byte for byte");
#else
  ok.note("library outputs compared byte for byte");
#endif
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Checks&)> run;
  };
  const std::vector<Criterion> criteria{
      {"metrics consistency chain", metrics_chain},
      {"model-curve anchors", model_anchors},
      {"histogram round trip", histogram_round_trip},
      {"noise-decomposition recovery", noise_decomposition},
      {"Voigt accuracy", voigt_accuracy},
      {"simulator physics suite", simulator_physics},
      {"fit engine suite", fit_engine},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Checks ok;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].run(ok);
    } catch (const std::exception& e) {
      ok(false, std::string("exception: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !ok.ok();
    std::printf("%s  %zu  %-30s %7.1f s  %s\n", ok.ok() ? "PASS" : "FAIL", i + 1, criteria[i].name, s,
                ok.summary().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
