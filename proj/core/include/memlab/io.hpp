#pragma once

// File formats: histogram CSV with JSON sidecar, envelope CSV, dataset CSV.
// Readers report malformed input as ConfigError addressed by file and line.

#include <filesystem>
#include <string>
#include <vector>

#include "memlab/counting.hpp"
#include "memlab/fitting.hpp"
#include "memlab/mbsim.hpp"
#include "memlab/noise_fit.hpp"

namespace memlab::io {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);
/// Decimal ns with at most 3 fractional digits, trailing zeros trimmed.
/// Throws DomainError if t is not a multiple of 1 ps.
std::string format_time_ns(double t);

/// Sidecar of "dir/name.csv" is "dir/name.json".
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// `time_ns,counts` rows at bin left edges, plus {bin_ns, rep_rate_hz, t_int_s}.
void write_histogram(const std::filesystem::path& csv, const counting::ArrivalHistogram& h);
counting::ArrivalHistogram read_histogram(const std::filesystem::path& csv);

/// `time_ns,re,im`
void write_envelope(const std::filesystem::path& csv, const sim::SignalEnvelope& e);
sim::SignalEnvelope read_envelope(const std::filesystem::path& csv);

/// `x,y,sigma_y`
void write_dataset(const std::filesystem::path& csv, const fit::Dataset& d);
fit::Dataset read_dataset(const std::filesystem::path& csv);

/// Long format `delta_mhz,x,y,sigma_y`; detunings keep first-appearance order.
std::vector<fit::ScanPoint> read_scan(const std::filesystem::path& csv);
void write_scan(const std::filesystem::path& csv, const std::vector<fit::ScanPoint>& scan);

/// Numeric CSV with an exact header; one vector per row.
std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& csv,
                                                  const std::vector<std::string>& header);
/// Replaces the file contents; throws ConfigError on I/O failure.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace memlab::io
