#pragma once

// JSON serialization of metrics and fit results, and single-series SVG plots.

#include <string>
#include <vector>

#include "memlab/counting.hpp"
#include "memlab/fitting.hpp"
#include "memlab/models.hpp"
#include "memlab/noise_fit.hpp"

namespace memlab::report {

inline constexpr const char* kReportSchema = "memlab.report/1";
inline constexpr const char* kAnalysisSchema = "memlab.analysis/1";
inline constexpr const char* kFitSchema = "memlab.fit/1";

/// Non-finite numbers are written as null.
std::string metrics_json(const models::MetricsReport& m);
models::MetricsReport parse_metrics(const std::string& json_text);

std::string analysis_json(const counting::Analysis& a,
                          const std::vector<counting::TradeoffPoint>& tradeoff);

std::string fit_json(const fit::FitResult& r);
std::string noise_energy_fit_json(const fit::NoiseEnergyFit& f);
std::string decomposition_json(const std::vector<fit::DecomposedPoint>& rows,
                               const fit::TotalNoiseFit& total);
std::string total_noise_fit_json(const fit::TotalNoiseFit& t);

/// Versioned report. Absent metrics or fits are written as null; each fit
/// text must be a JSON document.
std::string emit_report(const models::MetricsReport* metrics,
                        const std::vector<std::string>& fit_texts);

/// Plain SVG with one polyline, axis frame and labels. Needs >= 2 points.
std::string svg_polyline(const std::vector<double>& x, const std::vector<double>& y,
                         const std::string& title, const std::string& x_label,
                         const std::string& y_label);

}  // namespace memlab::report
