#pragma once

// Batch evaluation over one axis and the forward chain from a run config to
// synthetic arrival-time histograms.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "memlab/config.hpp"
#include "memlab/counting.hpp"
#include "memlab/mbsim.hpp"

namespace memlab::sweep {

/// Memory-output envelopes (photons/ns per attempt, before the filter chain).
struct Envelopes {
  sim::SignalEnvelope retrieved;
  sim::SignalEnvelope leak;
  double eta_mem = 0.0;
};

/// Gaussian leak at t = 0 and Gaussian retrieval at the read center carrying
/// photons * eta_e2e / filter transmission.
Envelopes model_envelopes(const config::RunConfig& c, double eta_e2e);

/// Maxwell-Bloch write/read with the config's signal, control and medium.
/// Control centers follow the sequence timing.
Envelopes simulated_envelopes(const config::RunConfig& c);

/// Independent generator seed for stream `stream` of base seed `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Detected noise counts per attempt spread over the whole histogram span
/// so that `window_noise` of them fall in [retrieval split, t_max].
double span_noise(const config::RunConfig& c, double window_noise);

struct HistogramPair {
  counting::ArrivalHistogram signal;  // memory output plus noise
  counting::ArrivalHistogram noise;   // noise alone (signal blocked)
};

/// Signal histogram from stream 0, noise histogram from stream 1 of `seed`.
HistogramPair synthesize_pair(const config::RunConfig& c, const Envelopes& env,
                              double window_noise, std::uint64_t seed);

/// |alpha|^2 of the synthetic input with the calibration's relative error.
counting::Alpha2 synthetic_alpha2(const config::RunConfig& c);

struct Row {
  double x = 0.0;
  std::optional<double> eta_e2e;
  std::optional<double> eta_mem;
  std::optional<double> noise_fwm;
  std::optional<double> noise_srs;
  std::optional<double> noise_fluorescence;
  std::optional<double> noise_total;
  std::optional<double> snr;
  std::optional<double> mu1;
  std::optional<double> eta_e2e_counted;
  std::optional<double> snr_counted;
  std::string error;
};

/// One row per resolved axis value, in axis order. Point i draws its
/// histograms from derive_seed(seed, i). A failing point records its error
/// and leaves its values empty.
std::vector<Row> run_sweep(const config::RunConfig& c, std::uint64_t seed, int jobs);

std::string sweep_csv(const config::RunConfig& c, const std::vector<Row>& rows);

}  // namespace memlab::sweep
