#include "memlab/sweep.hpp"

#include <cmath>

#include "memlab/error.hpp"
#include "memlab/io.hpp"
#include "parallel.hpp"

namespace memlab::sweep {

namespace {

constexpr int kEnvelopeSamples = 4001;

sim::SignalEnvelope gaussian_around(double fwhm, double center, double photons) {
  return sim::gaussian_envelope(fwhm, center, photons, center - 4.0 * fwhm, center + 4.0 * fwhm,
                                kEnvelopeSamples);
}

// Config with the swept quantity set to x.
config::RunConfig at_point(const config::RunConfig& c, double x) {
  config::RunConfig p = c;
  switch (c.sweep.axis) {
    case models::SweepAxis::PulseWidth:
      p.signal.fwhm_ns = x;
      p.operating_point.pulse_width_ns = x;
      break;
    case models::SweepAxis::ControlEnergy:
      p.control.energy_pj = x;
      p.operating_point.control_energy_pj = x;
      break;
    case models::SweepAxis::Detuning:
      p.medium.one_photon_detuning_mhz = x;
      p.operating_point.detuning_mhz = x;
      break;
  }
  return p;
}

std::string csv_cell(const std::optional<double>& v) {
  return v ? io::format_double(*v) : std::string();
}

std::string csv_text(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ';';
  return s;
}

}  // namespace

Envelopes model_envelopes(const config::RunConfig& c, double eta_e2e) {
  detail::require(eta_e2e >= 0.0, "model_envelopes: eta_e2e must be >= 0");
  Envelopes e;
  e.eta_mem = models::eta_mem_from_e2e(eta_e2e, c.calibration.filter_signal_transmission);
  e.leak = gaussian_around(c.signal.fwhm_ns, 0.0, c.signal.photons * c.synth.leak_fraction);
  e.retrieved = gaussian_around(c.synth.retrieval_fwhm_ns, c.timing.read_center_ns(),
                                c.signal.photons * e.eta_mem);
  return e;
}

Envelopes simulated_envelopes(const config::RunConfig& c) {
  const sim::MediumParams m = c.medium.params();
  const double fw = c.signal.fwhm_ns;
  const auto sig = sim::gaussian_envelope(fw, 0.0, c.signal.photons, -3.0 * fw, 3.0 * fw, 2001);
  const auto write = c.control.pulse(c.timing.write_center_ns(), c.control.energy_pj);
  const auto read = c.control.pulse(c.timing.read_center_ns(), c.control.energy_pj);
  const sim::MemoryRun run = sim::run_memory(sig, write, read, m);
  return {run.retrieval.output, run.storage.leak, run.eta_mem};
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 finalizer over base and stream
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double span_noise(const config::RunConfig& c, double window_noise) {
  const auto [t0, t1] = counting::default_span(c.timing);
  const double window = c.analysis.t_max_ns - c.timing.retrieval_split_ns();
  detail::require(window > 0.0, "span_noise: empty noise window");
  return window_noise * (t1 - t0) / window;
}

HistogramPair synthesize_pair(const config::RunConfig& c, const Envelopes& env,
                              double window_noise, std::uint64_t seed) {
  const double noise = span_noise(c, window_noise);
  HistogramPair h;
  h.signal = counting::synthesize_histogram(env.retrieved, env.leak, noise, c.calibration,
                                            c.timing, c.analysis.bin_width_ns,
                                            derive_seed(seed, 0));
  h.noise = counting::synthesize_histogram({}, {}, noise, c.calibration, c.timing,
                                           c.analysis.bin_width_ns, derive_seed(seed, 1));
  return h;
}

counting::Alpha2 synthetic_alpha2(const config::RunConfig& c) {
  return {c.signal.photons, counting::calibrate_alpha2(c.calibration).rel_uncertainty};
}

std::vector<Row> run_sweep(const config::RunConfig& c, std::uint64_t seed, int jobs) {
  const std::vector<double> xs = config::resolve_sweep(c.sweep);
  std::vector<Row> rows(xs.size());
  detail::parallel_for(xs.size(), jobs, [&](std::size_t i) {
    Row& row = rows[i];
    row.x = xs[i];
    try {
      const config::RunConfig p = at_point(c, xs[i]);
      const auto axis = c.sweep.axis;
      std::optional<Envelopes> env;
      if (c.sweep.source == config::Source::Model) {
        row.eta_e2e = models::efficiency_model(axis, xs[i], c.efficiency);
        row.eta_mem = models::eta_mem_from_e2e(*row.eta_e2e, c.calibration.filter_signal_transmission);
      } else {
        env = simulated_envelopes(p);
        row.eta_mem = env->eta_mem;
        row.eta_e2e = env->eta_mem * c.calibration.filter_signal_transmission;
      }
      const models::NoiseComponents n =
          axis == models::SweepAxis::ControlEnergy
              ? models::noise_components_vs_energy(xs[i], c.noise)
              : models::noise_components_vs_detuning(p.operating_point.detuning_mhz, c.noise);
      row.noise_fwm = n.fwm;
      row.noise_srs = n.srs;
      row.noise_fluorescence = n.fluorescence;
      row.noise_total = n.total();
      if (n.total() > 0.0) {
        row.snr = c.signal.photons * *row.eta_e2e * c.calibration.apd_efficiency / n.total();
        if (*row.snr > 0.0) row.mu1 = models::mu_one(c.signal.photons, *row.snr);
      }
      if (c.sweep.synthesize_counts) {
        if (!env) env = model_envelopes(p, *row.eta_e2e);
        const HistogramPair h = synthesize_pair(p, *env, n.total(), derive_seed(seed, i));
        const counting::Analysis a =
            counting::analyze(h.signal, h.noise, synthetic_alpha2(p), p.calibration, p.timing,
                              p.analysis.t_max_ns);
        row.eta_e2e_counted = a.metrics.eta_e2e;
        row.snr_counted = a.metrics.snr;
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return rows;
}

std::string sweep_csv(const config::RunConfig& c, const std::vector<Row>& rows) {
  std::string text = config::axis_key(c.sweep.axis) +
                     ",eta_e2e,eta_mem,noise_fwm,noise_srs,noise_fluorescence,noise_total,snr,mu1";
  if (c.sweep.synthesize_counts) text += ",eta_e2e_counted,snr_counted";
  text += ",error\n";
  for (const Row& r : rows) {
    text += io::format_double(r.x) + "," + csv_cell(r.eta_e2e) + "," + csv_cell(r.eta_mem) + "," +
            csv_cell(r.noise_fwm) + "," + csv_cell(r.noise_srs) + "," +
            csv_cell(r.noise_fluorescence) + "," + csv_cell(r.noise_total) + "," +
            csv_cell(r.snr) + "," + csv_cell(r.mu1);
    if (c.sweep.synthesize_counts)
      text += "," + csv_cell(r.eta_e2e_counted) + "," + csv_cell(r.snr_counted);
    text += "," + csv_text(r.error) + "\n";
  }
  return text;
}

}  // namespace memlab::sweep
