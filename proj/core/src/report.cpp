#include "memlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "memlab/error.hpp"

namespace memlab::report {

namespace {

using json = nlohmann::ordered_json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json optional_number(const std::optional<double>& v) {
  return v ? number(*v) : json(nullptr);
}

json vector_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    a.push_back(row);
  }
  return a;
}

json metrics_object(const models::MetricsReport& m) {
  json j;
  j["alpha2"] = number(m.alpha2);
  j["eta_e2e"] = number(m.eta_e2e);
  j["eta_mem"] = number(m.eta_mem);
  j["snr"] = optional_number(m.snr);
  j["mu1"] = optional_number(m.mu1);
  j["storage_time_ns"] = optional_number(m.storage_time_ns);
  if (m.window) {
    j["window"] = {{"t_min_ns", number(m.window->t_min_ns)}, {"t_max_ns", number(m.window->t_max_ns)}};
  } else {
    j["window"] = nullptr;
  }
  return j;
}

json fit_object(const fit::FitResult& r) {
  json j;
  j["schema"] = kFitSchema;
  j["model"] = r.model;
  j["param_names"] = r.param_names;
  j["params"] = vector_json(r.params);
  j["sigma"] = r.converged ? vector_json(fit::param_uncertainties(r)) : json(nullptr);
  j["fixed"] = r.fixed;
  j["covariance"] = matrix_json(r.covariance);
  j["chi2"] = number(r.chi2);
  j["chi2_reduced"] = number(r.chi2_reduced);
  j["dof"] = r.dof;
  j["converged"] = r.converged;
  j["n_iterations"] = r.n_iterations;
  j["diagnostic"] = r.diagnostic;
  return j;
}

json noise_energy_object(const fit::NoiseEnergyFit& f) {
  json j = fit_object(f.fit);
  j["sigma"] = vector_json(f.sigma);
  j["b_frozen"] = f.b_frozen;
  j["sigma_b_free"] = number(f.sigma_b_free);
  j["saturation_unresolved"] = f.saturation_unresolved;
  return j;
}

json components_object(const models::NoiseComponents& c) {
  return {{"fwm", number(c.fwm)}, {"srs", number(c.srs)}, {"fluorescence", number(c.fluorescence)}};
}

json total_object(const fit::TotalNoiseFit& t) {
  json j;
  j["schema"] = kFitSchema;
  j["model"] = "noise_detuning_total";
  j["param_names"] = t.param_names;
  j["params"] = vector_json(t.params);
  j["sigma"] = vector_json(t.sigma);
  j["covariance"] = matrix_json(t.covariance);
  j["chi2"] = number(t.totals_fit.chi2);
  j["chi2_reduced"] = number(t.totals_fit.chi2_reduced);
  j["dof"] = t.totals_fit.dof;
  j["converged"] = t.converged;
  j["n_iterations"] = t.totals_fit.n_iterations;
  j["wing_degenerate"] = t.wing_degenerate;
  j["n_fwm_pinned"] = t.n_fwm_pinned;
  j["warnings"] = t.warnings;
  return j;
}

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number()) throw ConfigError(key, "expected a number or null");
  return j[key].get<double>();
}

double read_required(const json& j, const char* key) {
  const auto v = read_optional(j, key);
  if (!v) throw ConfigError(key, "missing metric");
  return *v;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string metrics_json(const models::MetricsReport& m) { return metrics_object(m).dump(2) + "\n"; }

models::MetricsReport parse_metrics(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("metrics", std::string("invalid JSON: ") + e.what());
  }
  const json& j = doc.contains("metrics") ? doc["metrics"] : doc;
  if (!j.is_object()) throw ConfigError("metrics", "expected an object");
  models::MetricsReport m;
  m.alpha2 = read_required(j, "alpha2");
  m.eta_e2e = read_required(j, "eta_e2e");
  m.eta_mem = read_required(j, "eta_mem");
  m.snr = read_optional(j, "snr");
  m.mu1 = read_optional(j, "mu1");
  m.storage_time_ns = read_optional(j, "storage_time_ns");
  if (j.contains("window") && !j["window"].is_null()) {
    const json& w = j["window"];
    m.window = models::Window{read_required(w, "t_min_ns"), read_required(w, "t_max_ns")};
  }
  return m;
}

std::string analysis_json(const counting::Analysis& a,
                          const std::vector<counting::TradeoffPoint>& tradeoff) {
  json j;
  j["schema"] = kAnalysisSchema;
  j["metrics"] = metrics_object(a.metrics);
  j["n_signal"] = number(a.n_signal);
  j["n_noise"] = number(a.n_noise);
  j["eta_e2e_sigma"] = number(a.eta_e2e_sigma);
  j["snr_sigma"] = optional_number(a.snr_sigma);
  j["eta_nonpositive"] = a.eta_nonpositive;
  json t = json::array();
  for (const auto& p : tradeoff)
    t.push_back({{"t_max_ns", number(p.t_max_ns)},
                 {"n_signal", number(p.n_signal)},
                 {"n_noise", number(p.n_noise)},
                 {"eta_e2e", number(p.eta_e2e)},
                 {"snr", optional_number(p.snr)}});
  j["tradeoff"] = t;
  return j.dump(2) + "\n";
}

std::string fit_json(const fit::FitResult& r) { return fit_object(r).dump(2) + "\n"; }

std::string noise_energy_fit_json(const fit::NoiseEnergyFit& f) {
  return noise_energy_object(f).dump(2) + "\n";
}

std::string total_noise_fit_json(const fit::TotalNoiseFit& t) { return total_object(t).dump(2) + "\n"; }

std::string decomposition_json(const std::vector<fit::DecomposedPoint>& rows,
                               const fit::TotalNoiseFit& total) {
  json j;
  j["schema"] = kFitSchema;
  j["model"] = "noise_decomposition";
  json per = json::array();
  for (const auto& r : rows) {
    json p;
    p["delta_mhz"] = number(r.delta_mhz);
    p["e_ref_pj"] = number(r.e_ref_pj);
    p["converged"] = r.converged;
    p["fwm_excluded"] = r.fwm_excluded;
    p["saturation_unresolved"] = r.saturation_unresolved;
    p["components"] = r.components ? components_object(r.components->value) : json(nullptr);
    p["sigma"] = r.components ? components_object(r.components->sigma) : json(nullptr);
    p["fit"] = r.fit ? noise_energy_object(*r.fit) : json(nullptr);
    p["error"] = r.error.empty() ? json(nullptr) : json(r.error);
    per.push_back(p);
  }
  j["per_detuning"] = per;
  j["total"] = total_object(total);
  return j.dump(2) + "\n";
}

std::string emit_report(const models::MetricsReport* metrics,
                        const std::vector<std::string>& fit_texts) {
  json j;
  j["schema"] = kReportSchema;
  j["metrics"] = metrics ? metrics_object(*metrics) : json(nullptr);
  if (fit_texts.empty()) {
    j["fits"] = nullptr;
  } else {
    json fits = json::array();
    for (const auto& t : fit_texts) {
      try {
        fits.push_back(json::parse(t));
      } catch (const json::parse_error& e) {
        throw ConfigError("fits", std::string("invalid JSON: ") + e.what());
      }
    }
    j["fits"] = fits;
  }
  return j.dump(2) + "\n";
}

std::string svg_polyline(const std::vector<double>& x, const std::vector<double>& y,
                         const std::string& title, const std::string& x_label,
                         const std::string& y_label) {
  detail::require(x.size() == y.size() && x.size() >= 2, "svg_polyline: need >= 2 points");
  constexpr double kW = 640.0, kH = 400.0, kL = 70.0, kR = 20.0, kT = 40.0, kB = 50.0;
  double x0 = x.front(), x1 = x.front(), y0 = y.front(), y1 = y.front();
  for (std::size_t i = 0; i < x.size(); ++i) {
    detail::require(std::isfinite(x[i]) && std::isfinite(y[i]), "svg_polyline: non-finite point");
    x0 = std::min(x0, x[i]);
    x1 = std::max(x1, x[i]);
    y0 = std::min(y0, y[i]);
    y1 = std::max(y1, y[i]);
  }
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;
  auto px = [&](double v) { return kL + (v - x0) / (x1 - x0) * (kW - kL - kR); };
  auto py = [&](double v) { return kH - kB - (v - y0) / (y1 - y0) * (kH - kT - kB); };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
                  "viewBox=\"0 0 640 400\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"400\" fill=\"white\"/>\n";
  s += "<rect x=\"" + fmt(kL) + "\" y=\"" + fmt(kT) + "\" width=\"" + fmt(kW - kL - kR) +
       "\" height=\"" + fmt(kH - kT - kB) + "\" fill=\"none\" stroke=\"black\"/>\n";
  s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + escape_xml(title) + "</text>\n";
  s += "<text x=\"320\" y=\"390\" text-anchor=\"middle\" font-size=\"12\">" + escape_xml(x_label) + "</text>\n";
  s += "<text x=\"16\" y=\"200\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 200)\">" +
       escape_xml(y_label) + "</text>\n";
  char buf[64];
  for (const auto& [v, yy] : {std::pair{x0, kH - kB + 16.0}, std::pair{x1, kH - kB + 16.0}}) {
    std::snprintf(buf, sizeof buf, "%.4g", v);
    s += "<text x=\"" + fmt(px(v)) + "\" y=\"" + fmt(yy) + "\" text-anchor=\"middle\" font-size=\"10\">" +
         buf + "</text>\n";
  }
  for (double v : {y0, y1}) {
    std::snprintf(buf, sizeof buf, "%.4g", v);
    s += "<text x=\"" + fmt(kL - 6.0) + "\" y=\"" + fmt(py(v) + 4.0) +
         "\" text-anchor=\"end\" font-size=\"10\">" + buf + "</text>\n";
  }
  s += "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? " " : "") + fmt(px(x[i])) + "," + fmt(py(y[i]));
  s += "\"/>\n</svg>\n";
  return s;
}

}  // namespace memlab::report
