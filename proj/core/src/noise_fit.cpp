#include "memlab/noise_fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "memlab/error.hpp"
#include "memlab/voigt.hpp"
#include "parallel.hpp"

namespace memlab::fit {

using detail::require;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> safe_uncertainties(const FitResult& r) {
  if (!r.converged) return std::vector<double>(r.params.size(), kInf);
  return param_uncertainties(r);
}

// Weighted linear least squares for (b, c, d) at fixed e, clipped to >= 0.
std::vector<double> linear_start(const Dataset& data, double e, bool with_b) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double x = data.x[k];
    const double w = 1.0 / data.sigma_y[k];
    a(i, 0) = with_b ? x * x * w : 0.0;
    a(i, 1) = x * w;
    a(i, 2) = (x == 0.0 ? 0.0 : x / (e + x)) * w;
    rhs(i) = data.y[k] * w;
  }
  const Eigen::VectorXd s = a.colPivHouseholderQr().solve(rhs);
  std::vector<double> p{0.0, 0.0, 0.0, e};
  for (int j = 0; j < 3; ++j)
    if (std::isfinite(s(j))) p[static_cast<std::size_t>(j)] = std::max(s(j), 0.0);
  if (!with_b) p[0] = 0.0;
  return p;
}

bool better(const FitResult& a, const FitResult& b) {
  if (a.converged != b.converged) return a.converged;
  return a.chi2 < b.chi2;
}

FitResult best_energy_fit(const Model& m, const Dataset& data, bool b_free,
                          const std::vector<double>& extra_start) {
  double x_max = 0.0;
  for (double x : data.x) x_max = std::max(x_max, x);
  const double e_max = 100.0 * x_max;
  const std::vector<double> lower{0.0, 0.0, 0.0, 0.0};
  const std::vector<double> upper{b_free ? kInf : 0.0, kInf, kInf, e_max};

  std::vector<std::vector<double>> starts;
  for (double f : {0.03, 0.1, 0.3, 1.0, 3.0, 100.0}) starts.push_back(linear_start(data, f * x_max, b_free));
  if (!extra_start.empty()) {
    std::vector<double> s = extra_start;
    if (!b_free) s[0] = 0.0;
    s[3] = std::clamp(s[3], 0.0, e_max);
    starts.push_back(s);
  }
  FitResult best;
  bool have = false;
  for (const auto& s : starts) {
    FitResult r = least_squares_fit(m, data, s, lower, upper);
    if (!have || better(r, best)) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

}  // namespace

NoiseEnergyFit fit_noise_energy(const Dataset& data, bool allow_b_freeze) {
  require(data.size() >= 5, "fit_noise_energy: need at least 5 points");
  data.validate(4);
  double x_min = kInf;
  double x_max = 0.0;
  for (double x : data.x) {
    require(x >= 0.0, "fit_noise_energy: energies must be >= 0");
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
  }
  require(x_max > 0.0 && x_max >= 2.0 * x_min, "fit_noise_energy: energies must span a factor >= 2");

  const Model m = make_model("noise_energy");
  NoiseEnergyFit out;
  FitResult free_fit = best_energy_fit(m, data, true, {});
  const std::vector<double> free_sigma = safe_uncertainties(free_fit);
  out.sigma_b_free = free_fit.converged
                         ? std::sqrt(free_fit.covariance(0, 0) * std::max(1.0, free_fit.chi2_reduced))
                         : kInf;
  out.fit = free_fit;
  out.sigma = free_sigma;

  if (allow_b_freeze) {
    FitResult frozen = best_energy_fit(m, data, false, free_fit.params);
    if (frozen.converged && (!free_fit.converged || frozen.chi2 - free_fit.chi2 < 1.0)) {
      out.fit = std::move(frozen);
      out.sigma = safe_uncertainties(out.fit);
      out.b_frozen = true;
    }
  }

  const double e = out.fit.params[3];
  double& sigma_e = out.sigma[3];
  if (e > 5.0 * x_max || sigma_e >= e) {
    out.saturation_unresolved = true;
    sigma_e = std::max(sigma_e, e);
  }
  return out;
}

ComponentEstimate components_at(const NoiseEnergyFit& f, double e_ref) {
  const auto& p = f.fit.params;
  models::NoiseParams np;
  np.fwm_quad_b = p[0];
  np.srs_lin_c = p[1];
  np.fl_amp_d = p[2];
  np.fl_sat_e_pj = p[3];
  ComponentEstimate est;
  est.value = models::noise_components_vs_energy(e_ref, np);

  if (!f.fit.converged) {
    est.sigma = {kInf, kInf, kInf};
    est.total_sigma = kInf;
    est.covariance = Eigen::Vector3d::Constant(kInf).asDiagonal();
    return est;
  }
  // Poisson weights are absolute: the covariance is only ever inflated by a
  // poor fit, never deflated by a lucky one.
  const Eigen::MatrixXd cov = f.fit.covariance * std::max(1.0, f.fit.chi2_reduced);
  const double s = e_ref == 0.0 ? 0.0 : e_ref / (p[3] + e_ref);
  // Rows: d(fwm, srs, fl) / d(b, c, d, e).
  const double grads[3][4] = {
      {e_ref * e_ref, 0.0, 0.0, 0.0},
      {0.0, e_ref, 0.0, 0.0},
      {0.0, 0.0, s, e_ref == 0.0 ? 0.0 : -p[2] * s / (p[3] + e_ref)}};
  for (int u = 0; u < 3; ++u) {
    for (int v = 0; v < 3; ++v) {
      double acc = 0.0;
      for (int i = 0; i < 4; ++i) {
        if (grads[u][i] == 0.0) continue;
        for (int j = 0; j < 4; ++j) {
          if (grads[v][j] == 0.0) continue;
          const double c = cov(i, j);
          acc += std::isfinite(c) ? grads[u][i] * c * grads[v][j]
                                  : (u == v ? kInf : std::numeric_limits<double>::quiet_NaN());
        }
      }
      est.covariance(u, v) = acc;
    }
  }
  {
    const double t = est.covariance.sum();
    est.total_sigma = std::isfinite(t) ? std::sqrt(std::max(t, 0.0)) : kInf;
  }
  if (f.b_frozen) {
    // The frozen fit has no FWM freedom; its spread is taken from the free fit.
    const double sf = f.sigma_b_free * e_ref * e_ref;
    est.covariance.row(0).setZero();
    est.covariance.col(0).setZero();
    est.covariance(0, 0) = sf * sf;
  }
  for (int u = 0; u < 3; ++u) {
    if (!(est.covariance(u, u) >= 0.0)) est.covariance(u, u) = kInf;
    for (int v = 0; v < 3; ++v)
      if (u != v && std::isnan(est.covariance(u, v))) est.covariance(u, v) = 0.0;
  }
  est.sigma.fwm = std::sqrt(est.covariance(0, 0));
  est.sigma.srs = std::sqrt(est.covariance(1, 1));
  est.sigma.fluorescence = std::sqrt(est.covariance(2, 2));
  return est;
}

std::vector<DecomposedPoint> decompose_vs_detuning(const std::vector<ScanPoint>& scan, int jobs) {
  double e_ref = 0.0;
  for (const auto& sp : scan)
    for (double x : sp.data.x) e_ref = std::max(e_ref, x);

  std::vector<DecomposedPoint> rows(scan.size());
  detail::parallel_for(scan.size(), jobs, [&](std::size_t i) {
    DecomposedPoint& row = rows[i];
    row.delta_mhz = scan[i].delta_mhz;
    row.e_ref_pj = e_ref;
    try {
      NoiseEnergyFit f = fit_noise_energy(scan[i].data);
      if (!f.fit.converged) {
        const Model m = make_model("noise_energy");
        f.fit = best_energy_fit(m, scan[i].data, false, f.fit.params);
        f.sigma = safe_uncertainties(f.fit);
        f.b_frozen = true;
        row.fwm_excluded = true;
      }
      row.converged = f.fit.converged;
      row.saturation_unresolved = f.saturation_unresolved;
      row.components = components_at(f, e_ref);
      row.fit = std::move(f);
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
  });
  return rows;
}

std::vector<DetuningPoint> detuning_points(const std::vector<DecomposedPoint>& rows) {
  std::vector<DetuningPoint> pts;
  for (const auto& r : rows) {
    if (!r.components || !r.converged) continue;
    const auto& c = *r.components;
    DetuningPoint p;
    p.delta_mhz = r.delta_mhz;
    p.total = c.value.total();
    p.sigma_total = c.total_sigma;
    p.components = c;
    pts.push_back(p);
  }
  return pts;
}

TotalNoiseFit fit_total_noise(const std::vector<DetuningPoint>& points, double gauss,
                              double lorentz) {
  require(gauss > 0.0 && lorentz > 0.0, "fit_total_noise: Voigt widths must be > 0");
  require(points.size() >= 3, "fit_total_noise: need at least 3 detunings");
  TotalNoiseFit out;

  double max_abs_delta = 0.0;
  double scale = 0.0;
  bool stacked = true;
  for (const auto& p : points) {
    max_abs_delta = std::max(max_abs_delta, std::abs(p.delta_mhz));
    scale = std::max(scale, std::abs(p.total));
    if (!p.components) stacked = false;
  }
  const double fwhm = voigt::voigt_fwhm(gauss, lorentz);
  if (max_abs_delta < 1.5 * fwhm) {
    out.wing_degenerate = true;
    out.warnings.push_back("detunings do not reach the Voigt wings; n_srs and n_fl are degenerate");
  }
  // Uncertainties from noiseless inputs can be zero; keep weights finite.
  const double sigma_floor = scale > 0.0 ? 1e-9 * scale : 1e-30;
  auto sig = [&](double s) { return std::max(s, sigma_floor); };

  Dataset d;
  double lo = kInf;
  double hi = 0.0;
  for (const auto& p : points) {
    if (!std::isfinite(p.sigma_total)) continue;
    d.x.push_back(p.delta_mhz);
    d.y.push_back(p.total);
    d.sigma_y.push_back(sig(p.sigma_total));
    lo = std::min(lo, p.total);
    hi = std::max(hi, p.total);
  }
  require(d.size() >= 3, "fit_total_noise: need at least 3 detunings with finite uncertainty");
  const Model m = make_model("noise_detuning_total", {gauss, lorentz});
  out.totals_fit = least_squares_fit(m, d, {std::max(lo, 0.0), std::max(hi - lo, 0.0), 0.0},
                                     {0.0, 0.0, 0.0}, {kInf, kInf, 0.0});
  const FitResult& t = out.totals_fit;
  out.converged = t.converged;
  out.params = {t.params[0], t.params[1], 0.0};
  out.covariance = Eigen::Vector3d::Constant(kInf).asDiagonal();
  if (t.converged)
    out.covariance = t.covariance.topLeftCorner<3, 3>() * std::max(1.0, t.chi2_reduced);
  out.covariance(2, 2) = 0.0;

  double w_sum = 0.0;
  double wy_sum = 0.0;
  for (const auto& p : points) {
    if (!p.components) continue;
    const double s = p.components->sigma.fwm;
    if (!std::isfinite(s)) continue;
    const double w = 1.0 / (sig(s) * sig(s));
    w_sum += w;
    wy_sum += w * p.components->value.fwm;
  }
  if (!stacked || w_sum == 0.0) {
    out.n_fwm_pinned = true;
    out.warnings.push_back("no FWM components; n_fwm held at 0");
  } else {
    // Split the constant: n_srs = K - n_fwm.
    const double fwm = std::clamp(wy_sum / w_sum, 0.0, out.params[0]);
    const double var_fwm = 1.0 / w_sum;
    out.params[0] -= fwm;
    out.params[2] = fwm;
    out.covariance(0, 0) += var_fwm;
    out.covariance(2, 2) = var_fwm;
    out.covariance(0, 2) = out.covariance(2, 0) = -var_fwm;
  }
  out.sigma.resize(3);
  for (int j = 0; j < 3; ++j) {
    const double v = out.covariance(j, j);
    out.sigma[static_cast<std::size_t>(j)] = std::isfinite(v) ? std::sqrt(std::max(v, 0.0)) : kInf;
  }
  return out;
}

}  // namespace memlab::fit
