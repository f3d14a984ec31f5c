#pragma once

// Run configuration: JSON with one object per section. Every key carries its
// unit in its name; nothing is converted implicitly. Unknown keys are errors.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "memlab/counting.hpp"
#include "memlab/mbsim.hpp"
#include "memlab/models.hpp"

namespace memlab::config {

enum class Mode { Simulate, Synth, Analyze, Fit, Sweep };
enum class Source { Model, Simulator };

std::string to_string(Mode m);
std::string to_string(Source s);
std::string axis_key(models::SweepAxis a);  // "pulse_width_ns", ...

struct MediumConfig {
  double optical_depth = 100.0;
  double pumping_efficiency = 0.8;
  double natural_half_width_mhz = 2.3;
  double pressure_coeff_mhz_per_torr = 19.5;
  double pressure_torr = 5.0;
  double ground_decoherence_mhz = 0.2;
  double one_photon_detuning_mhz = 2300.0;
  double two_photon_detuning_mhz = 0.0;
  double cell_length_m = 0.075;

  sim::MediumParams params() const;
};

struct ControlConfig {
  double fwhm_ns = 40.0;
  double energy_pj = 560.0;
  double ref_power_mw = 12.9;
  double ref_rabi_mhz = 540.0;

  sim::ControlCalibration calibration() const;
  /// Control of this energy and width centered at `center_ns`.
  sim::ControlPulse pulse(double center_ns, double energy_pj) const;
};

struct SignalConfig {
  double fwhm_ns = 25.0;
  double photons = 1.0;  // |alpha|^2 of the synthetic input
};

struct SynthConfig {
  Source source = Source::Model;
  double eta_e2e = 0.13;             // model source: retrieved fraction after filters
  double leak_fraction = 0.3;        // model source: unstored input fraction
  double retrieval_fwhm_ns = 8.0;    // model source: retrieval envelope width
  // Flat noise floor: detected counts per attempt inside [retrieval split, t_max].
  double noise_per_attempt = 3.06e-3;
};

struct AnalysisConfig {
  double t_max_ns = 155.0;
  double bin_width_ns = 1.0;
  std::vector<double> tradeoff_t_max_ns;  // empty: no trade-off table
};

struct SweepConfig {
  models::SweepAxis axis = models::SweepAxis::ControlEnergy;
  double start = 280.0;
  double stop = 560.0;
  int steps = 8;
  Source source = Source::Model;
  bool synthesize_counts = false;
};

struct Inputs {
  std::string signal_histogram;
  std::string noise_histogram;
  std::string dataset;  // x,y,sigma_y
  std::string scan;     // delta_mhz,x,y,sigma_y
  std::string signal_envelope;
  std::string leak_envelope;
  std::string metrics;  // analysis JSON for reports
  std::vector<std::string> fits;
};

struct RunConfig {
  Mode mode = Mode::Sweep;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string output;
  MediumConfig medium;
  ControlConfig control;
  SignalConfig signal;
  counting::SequenceTiming timing;
  models::Calibration calibration;
  models::EfficiencyParams efficiency;
  models::NoiseParams noise;
  models::OperatingPoint operating_point;
  SynthConfig synth;
  AnalysisConfig analysis;
  SweepConfig sweep;
  Inputs inputs;
};

/// Parses and validates JSON text. Relative input paths resolve against
/// `base_dir`. Throws ConfigError naming the offending key.
RunConfig parse_config(const std::string& json_text,
                       const std::filesystem::path& base_dir = {});

/// Reads, parses and validates a config file; input files must exist.
RunConfig validate_config(const std::filesystem::path& path);

/// Range and consistency checks; input files must exist.
void validate(const RunConfig& c);

/// Fully defaulted config as JSON text (2-space indent, stable key order).
std::string dump_config(const RunConfig& c);

/// Axis values of the sweep in increasing order.
std::vector<double> resolve_sweep(const SweepConfig& s);

/// CLI value, else MEMLAB_SEED, else the config value.
std::uint64_t resolve_seed(std::optional<std::uint64_t> cli, const RunConfig& c);

}  // namespace memlab::config
