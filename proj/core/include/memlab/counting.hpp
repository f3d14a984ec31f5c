#pragma once

// Photon-counting forward model and histogram analysis: arrival-time
// histograms, detection windows, end-to-end efficiency, SNR and storage time.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "memlab/mbsim.hpp"
#include "memlab/models.hpp"

namespace memlab::counting {

using models::Calibration;

struct ArrivalHistogram {
  double bin_width_ns = 1.0;
  double t0_ns = 0.0;  // left edge of bin 0
  std::vector<std::int64_t> counts;
  double rep_rate_hz = 1.0 / 11e-6;
  double integration_time_s = 60.0;

  std::size_t size() const { return counts.size(); }
  double bin_time(std::size_t i) const { return t0_ns + static_cast<double>(i) * bin_width_ns; }
  double end_ns() const { return bin_time(counts.size()); }
  void validate() const;
};

/// Histogram with real-valued bins, e.g. after noise subtraction.
struct RealHistogram {
  double bin_width_ns = 1.0;
  double t0_ns = 0.0;
  std::vector<double> values;
  double rep_rate_hz = 0.0;
  double integration_time_s = 0.0;

  std::size_t size() const { return values.size(); }
  double bin_time(std::size_t i) const { return t0_ns + static_cast<double>(i) * bin_width_ns; }

  static RealHistogram from(const ArrivalHistogram& h);
};

struct DetectionWindow {
  double t_min_ns = 0.0;
  double t_max_ns = 155.0;
};

/// Pulse sequence of one storage attempt. Histogram time 0 is the peak of the
/// input signal; the write control is centered at -signal_delay_ns and the
/// read control read_delay_ns after it.
struct SequenceTiming {
  double pump_duration_us = 10.0;
  double write_time_ns = 40.0;  // control pulse FWHM
  double signal_delay_ns = 20.0;
  double read_delay_ns = 160.0;
  double rep_period_us = 11.0;

  double write_center_ns() const { return -signal_delay_ns; }
  double read_center_ns() const { return read_delay_ns - signal_delay_ns; }
  /// Bins at or after this time form the retrieval region.
  double retrieval_split_ns() const { return read_center_ns() - 20.0; }
  void validate() const;
};

struct Alpha2 {
  double value = 0.0;
  double rel_uncertainty = 0.0;  // quadrature sum of sigma, eta_APD, N_mon terms
};

/// |alpha|^2 = N_mon sigma / (f_rep eta_APD).
Alpha2 calibrate_alpha2(const Calibration& cal);

/// Expected detected counts per bin over [t_begin, t_end): signal and leak
/// envelopes (photons/ns per attempt at the memory output) pass the filter
/// chain and the detector; `noise_per_attempt` detected counts are spread
/// uniformly over the span.
std::vector<double> expected_counts(const sim::SignalEnvelope& signal,
                                    const sim::SignalEnvelope& leak, double noise_per_attempt,
                                    const Calibration& cal, double t_begin_ns, double t_end_ns,
                                    double bin_width_ns);

/// Default histogram span for a sequence: [-100 ns, read center + 100 ns).
std::pair<double, double> default_span(const SequenceTiming& timing);

/// Poisson draw of expected_counts over default_span(timing). Deterministic for
/// a fixed seed.
ArrivalHistogram synthesize_histogram(const sim::SignalEnvelope& signal,
                                      const sim::SignalEnvelope& leak, double noise_per_attempt,
                                      const Calibration& cal, const SequenceTiming& timing,
                                      double bin_width_ns, std::uint64_t seed);

/// Earliest bin index of the maximum over [begin, end); values within 1e-12
/// relative of the maximum count as tied.
std::size_t argmax(std::span<const double> v, std::size_t begin, std::size_t end);

/// Time from the input-region maximum (bins before split_ns) to the
/// retrieval-region maximum (bins at or after split_ns), earliest bin on ties.
double extract_storage_time(const RealHistogram& h, double split_ns);
double extract_storage_time(const ArrivalHistogram& h, double split_ns);

/// t_min is the earliest minimum strictly after the leak peak and before the
/// retrieval peak.
DetectionWindow default_window(const RealHistogram& h, double t_max_ns, double split_ns);
DetectionWindow default_window(const ArrivalHistogram& h, double t_max_ns, double split_ns);

/// Sum over bins lying entirely inside [t_min, t_max].
std::int64_t counts_in_window(const ArrivalHistogram& h, const DetectionWindow& w);
double counts_in_window(const RealHistogram& h, const DetectionWindow& w);

/// eta_e2e = (N_signal - N_noise) / (|alpha|^2 eta_APD f_rep t_int).
double eta_e2e_from_counts(double n_signal, double n_noise, double alpha2, const Calibration& cal);

/// SNR = (N_signal - N_noise) / N_noise; throws UndefinedSnrError for N_noise = 0.
double snr_from_counts(double n_signal, double n_noise);

/// Per-bin difference; bins may go negative.
RealHistogram noise_correct(const ArrivalHistogram& signal, const ArrivalHistogram& noise);

struct TradeoffPoint {
  double t_max_ns = 0.0;
  double n_signal = 0.0;
  double n_noise = 0.0;
  double eta_e2e = 0.0;
  std::optional<double> snr;  // empty when no noise counts fall in the window
};

std::vector<TradeoffPoint> window_tradeoff(const ArrivalHistogram& signal,
                                           const ArrivalHistogram& noise, double alpha2,
                                           const Calibration& cal, double t_min_ns,
                                           std::span<const double> t_max_list);

struct Analysis {
  models::MetricsReport metrics;
  double n_signal = 0.0;
  double n_noise = 0.0;
  double eta_e2e_sigma = 0.0;
  std::optional<double> snr_sigma;
  bool eta_nonpositive = false;
};

/// Full single-histogram analysis with the window lower limit from
/// default_window on the noise-corrected histogram.
Analysis analyze(const ArrivalHistogram& signal, const ArrivalHistogram& noise,
                 const Alpha2& alpha2, const Calibration& cal, const SequenceTiming& timing,
                 double t_max_ns = 155.0);

}  // namespace memlab::counting
