#include "memlab/counting.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "memlab/error.hpp"

namespace memlab::counting {

using detail::require;

namespace {

constexpr int kSubsamples = 32;

std::vector<double> as_real(const std::vector<std::int64_t>& v) {
  return {v.begin(), v.end()};
}

// Photons in [a, b) of an envelope, midpoint rule on kSubsamples points.
double envelope_photons(const sim::SignalEnvelope& env, double a, double b) {
  if (env.time_ns.empty() || b <= env.time_ns.front() || a >= env.time_ns.back()) return 0.0;
  const double h = (b - a) / kSubsamples;
  double sum = 0.0;
  for (int k = 0; k < kSubsamples; ++k) sum += std::norm(env.at(a + (k + 0.5) * h));
  return sum * h;
}

std::size_t index_at_or_after(double t0, double bw, std::size_t n, double t) {
  const double x = std::ceil((t - t0) / bw - 1e-9);
  if (x <= 0.0) return 0;
  return std::min(n, static_cast<std::size_t>(x));
}

struct Regions {
  std::size_t split = 0;
  std::size_t n = 0;
};

Regions regions(double t0, double bw, std::size_t n, double split_ns) {
  Regions r{index_at_or_after(t0, bw, n, split_ns), n};
  if (r.split == 0) throw AnalysisError("input region before the retrieval split is empty");
  if (r.split >= n) throw AnalysisError("retrieval region after the split is empty");
  return r;
}

double storage_time(std::span<const double> v, double bw, const Regions& r) {
  const std::size_t in_peak = argmax(v, 0, r.split);
  const std::size_t out_peak = argmax(v, r.split, r.n);
  return static_cast<double>(out_peak - in_peak) * bw;
}

DetectionWindow window_from(std::span<const double> v, double t0, double bw, double t_max_ns,
                            const Regions& r) {
  const std::size_t leak_peak = argmax(v, 0, r.split);
  const std::size_t ret_peak = argmax(v, r.split, r.n);
  if (ret_peak <= leak_peak + 1) throw AnalysisError("no valley between leak and retrieval peaks");
  std::size_t best = leak_peak + 1;
  for (std::size_t i = leak_peak + 1; i < ret_peak; ++i)
    if (v[i] < v[best]) best = i;
  DetectionWindow w{t0 + static_cast<double>(best) * bw, t_max_ns};
  if (!(w.t_max_ns > w.t_min_ns)) throw AnalysisError("t_max must exceed the window lower limit");
  return w;
}

template <class T>
T window_sum(const std::vector<T>& v, double t0, double bw, const DetectionWindow& w) {
  require(w.t_max_ns > w.t_min_ns, "detection window: t_min must be < t_max");
  T sum{};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = t0 + static_cast<double>(i) * bw;
    if (a >= w.t_min_ns - 1e-9 && a + bw <= w.t_max_ns + 1e-9) sum += v[i];
  }
  return sum;
}

}  // namespace

void ArrivalHistogram::validate() const {
  require(bin_width_ns > 0.0, "histogram: bin width must be > 0");
  require(rep_rate_hz > 0.0 && integration_time_s > 0.0,
          "histogram: rep rate and integration time must be > 0");
  for (auto c : counts) require(c >= 0, "histogram: counts must be >= 0");
}

RealHistogram RealHistogram::from(const ArrivalHistogram& h) {
  return {h.bin_width_ns, h.t0_ns, as_real(h.counts), h.rep_rate_hz, h.integration_time_s};
}

void SequenceTiming::validate() const {
  require(signal_delay_ns >= 0.0, "timing: signal_delay_ns must be >= 0");
  require(read_delay_ns > signal_delay_ns, "timing: read_delay_ns must exceed signal_delay_ns");
  require(pump_duration_us > 0.0 && write_time_ns > 0.0 && rep_period_us > 0.0,
          "timing: durations must be > 0");
  const double last_pulse_end_us =
      pump_duration_us + (read_delay_ns + 3.0 * write_time_ns) * 1e-3;
  require(rep_period_us > last_pulse_end_us, "timing: rep_period_us must exceed the sequence");
}

Alpha2 calibrate_alpha2(const Calibration& cal) {
  cal.validate();
  Alpha2 a;
  a.value = cal.monitor_rate_cps * cal.split_ratio_sigma / (cal.rep_rate_hz * cal.apd_efficiency);
  double rel2 = cal.split_ratio_rel_unc * cal.split_ratio_rel_unc +
                cal.apd_efficiency_rel_unc * cal.apd_efficiency_rel_unc;
  const double monitor_counts = cal.monitor_rate_cps * cal.integration_time_s;
  if (monitor_counts > 0.0) rel2 += 1.0 / monitor_counts;
  a.rel_uncertainty = std::sqrt(rel2);
  return a;
}

std::vector<double> expected_counts(const sim::SignalEnvelope& signal,
                                    const sim::SignalEnvelope& leak, double noise_per_attempt,
                                    const Calibration& cal, double t_begin_ns, double t_end_ns,
                                    double bin_width_ns) {
  cal.validate();
  require(noise_per_attempt >= 0.0, "expected_counts: noise rate must be >= 0");
  require(bin_width_ns > 0.0 && t_end_ns > t_begin_ns, "expected_counts: invalid binning");
  const auto nb = static_cast<std::size_t>(std::ceil((t_end_ns - t_begin_ns) / bin_width_ns - 1e-9));
  const double attempts = cal.attempts();
  const double detect = cal.apd_efficiency * cal.filter_signal_transmission * attempts;
  const double noise_per_bin = noise_per_attempt * attempts / static_cast<double>(nb);
  std::vector<double> lambda(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    const double a = t_begin_ns + static_cast<double>(i) * bin_width_ns;
    const double b = a + bin_width_ns;
    lambda[i] = detect * (envelope_photons(signal, a, b) + envelope_photons(leak, a, b)) +
                noise_per_bin;
  }
  return lambda;
}

std::pair<double, double> default_span(const SequenceTiming& timing) {
  return {-100.0, timing.read_center_ns() + 100.0};
}

ArrivalHistogram synthesize_histogram(const sim::SignalEnvelope& signal,
                                      const sim::SignalEnvelope& leak, double noise_per_attempt,
                                      const Calibration& cal, const SequenceTiming& timing,
                                      double bin_width_ns, std::uint64_t seed) {
  timing.validate();
  const auto [t0, t1] = default_span(timing);
  const std::vector<double> lambda =
      expected_counts(signal, leak, noise_per_attempt, cal, t0, t1, bin_width_ns);
  std::mt19937_64 rng(seed);
  ArrivalHistogram h;
  h.bin_width_ns = bin_width_ns;
  h.t0_ns = t0;
  h.rep_rate_hz = cal.rep_rate_hz;
  h.integration_time_s = cal.integration_time_s;
  h.counts.resize(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (lambda[i] > 0.0) {
      std::poisson_distribution<std::int64_t> draw(lambda[i]);
      h.counts[i] = draw(rng);
    }
  }
  return h;
}

std::size_t argmax(std::span<const double> v, std::size_t begin, std::size_t end) {
  if (begin >= end || end > v.size()) throw AnalysisError("argmax over an empty region");
  const double top = *std::max_element(v.begin() + static_cast<std::ptrdiff_t>(begin),
                                       v.begin() + static_cast<std::ptrdiff_t>(end));
  // Bins within rounding of the maximum count as tied.
  const double floor = top - 1e-12 * std::abs(top);
  std::size_t best = begin;
  while (v[best] < floor) ++best;
  return best;
}

double extract_storage_time(const RealHistogram& h, double split_ns) {
  return storage_time(h.values, h.bin_width_ns,
                      regions(h.t0_ns, h.bin_width_ns, h.size(), split_ns));
}

double extract_storage_time(const ArrivalHistogram& h, double split_ns) {
  return extract_storage_time(RealHistogram::from(h), split_ns);
}

DetectionWindow default_window(const RealHistogram& h, double t_max_ns, double split_ns) {
  return window_from(h.values, h.t0_ns, h.bin_width_ns, t_max_ns,
                     regions(h.t0_ns, h.bin_width_ns, h.size(), split_ns));
}

DetectionWindow default_window(const ArrivalHistogram& h, double t_max_ns, double split_ns) {
  return default_window(RealHistogram::from(h), t_max_ns, split_ns);
}

std::int64_t counts_in_window(const ArrivalHistogram& h, const DetectionWindow& w) {
  return window_sum(h.counts, h.t0_ns, h.bin_width_ns, w);
}

double counts_in_window(const RealHistogram& h, const DetectionWindow& w) {
  return window_sum(h.values, h.t0_ns, h.bin_width_ns, w);
}

double eta_e2e_from_counts(double n_signal, double n_noise, double alpha2,
                           const Calibration& cal) {
  const double denom = alpha2 * cal.apd_efficiency * cal.rep_rate_hz * cal.integration_time_s;
  require(denom > 0.0, "eta_e2e_from_counts: denominator must be > 0");
  return (n_signal - n_noise) / denom;
}

double snr_from_counts(double n_signal, double n_noise) {
  require(n_signal >= 0.0 && n_noise >= 0.0, "snr_from_counts: counts must be >= 0");
  if (n_noise == 0.0) throw UndefinedSnrError("snr_from_counts: zero noise counts, SNR undefined");
  return (n_signal - n_noise) / n_noise;
}

RealHistogram noise_correct(const ArrivalHistogram& signal, const ArrivalHistogram& noise) {
  if (signal.size() != noise.size() || signal.bin_width_ns != noise.bin_width_ns ||
      signal.t0_ns != noise.t0_ns)
    throw DomainError("noise_correct: histograms have different binning");
  if (signal.rep_rate_hz != noise.rep_rate_hz ||
      signal.integration_time_s != noise.integration_time_s)
    throw DomainError("noise_correct: histograms have different acquisition metadata");
  RealHistogram out = RealHistogram::from(signal);
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] -= static_cast<double>(noise.counts[i]);
  return out;
}

std::vector<TradeoffPoint> window_tradeoff(const ArrivalHistogram& signal,
                                           const ArrivalHistogram& noise, double alpha2,
                                           const Calibration& cal, double t_min_ns,
                                           std::span<const double> t_max_list) {
  std::vector<TradeoffPoint> out;
  out.reserve(t_max_list.size());
  for (double t_max : t_max_list) {
    const DetectionWindow w{t_min_ns, t_max};
    TradeoffPoint p;
    p.t_max_ns = t_max;
    p.n_signal = static_cast<double>(counts_in_window(signal, w));
    p.n_noise = static_cast<double>(counts_in_window(noise, w));
    p.eta_e2e = eta_e2e_from_counts(p.n_signal, p.n_noise, alpha2, cal);
    if (p.n_noise > 0.0) p.snr = snr_from_counts(p.n_signal, p.n_noise);
    out.push_back(p);
  }
  return out;
}

Analysis analyze(const ArrivalHistogram& signal, const ArrivalHistogram& noise,
                 const Alpha2& alpha2, const Calibration& cal, const SequenceTiming& timing,
                 double t_max_ns) {
  signal.validate();
  noise.validate();
  const RealHistogram corrected = noise_correct(signal, noise);
  const double split = timing.retrieval_split_ns();

  Analysis a;
  const DetectionWindow w = default_window(corrected, t_max_ns, split);
  a.n_signal = static_cast<double>(counts_in_window(signal, w));
  a.n_noise = static_cast<double>(counts_in_window(noise, w));

  auto& m = a.metrics;
  m.alpha2 = alpha2.value;
  m.window = models::Window{w.t_min_ns, w.t_max_ns};
  m.storage_time_ns = extract_storage_time(corrected, split);
  m.eta_e2e = eta_e2e_from_counts(a.n_signal, a.n_noise, alpha2.value, cal);
  m.eta_mem = models::eta_mem_from_e2e(m.eta_e2e, cal.filter_signal_transmission);
  a.eta_nonpositive = m.eta_e2e <= 0.0;

  const double denom = alpha2.value * cal.apd_efficiency * cal.attempts();
  const double stat = std::sqrt(a.n_signal + a.n_noise) / denom;
  a.eta_e2e_sigma = std::hypot(m.eta_e2e * alpha2.rel_uncertainty, stat);

  if (a.n_noise > 0.0) {
    const double snr = snr_from_counts(a.n_signal, a.n_noise);
    m.snr = snr;
    const double s = a.n_signal;
    const double n = a.n_noise;
    const double poisson = std::sqrt(s / (n * n) + s * s / (n * n * n));
    a.snr_sigma = std::hypot(snr * alpha2.rel_uncertainty, poisson);
    if (snr > 0.0) m.mu1 = models::mu_one(alpha2.value, snr);
  }
  return a;
}

}  // namespace memlab::counting
