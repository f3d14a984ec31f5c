#include "memlab/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <tuple>

#include "memlab/error.hpp"
#include "memlab/voigt.hpp"

namespace memlab::fit {

using detail::require;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxDamping = 1e10;

Model proportional() {
  return {"proportional", {"c"},
          [](double x, std::span<const double> p) { return p[0] * x; },
          [](double x, std::span<const double>, std::span<double> g) { g[0] = x; }};
}

Model linear() {
  return {"linear", {"a", "b"},
          [](double x, std::span<const double> p) { return p[0] + p[1] * x; },
          [](double x, std::span<const double>, std::span<double> g) {
            g[0] = 1.0;
            g[1] = x;
          }};
}

double saturation(double x, double e) { return x == 0.0 ? 0.0 : x / (e + x); }

Model noise_energy() {
  return {"noise_energy", {"b", "c", "d", "e"},
          [](double x, std::span<const double> p) {
            return p[0] * x * x + p[1] * x + p[2] * saturation(x, p[3]);
          },
          [](double x, std::span<const double> p, std::span<double> g) {
            const double s = saturation(x, p[3]);
            g[0] = x * x;
            g[1] = x;
            g[2] = s;
            g[3] = x == 0.0 ? 0.0 : -p[2] * s / (p[3] + x);
          }};
}

Model noise_detuning_total(double gauss, double lorentz) {
  require(gauss > 0.0 && lorentz > 0.0, "noise_detuning_total: Voigt widths must be > 0");
  return {"noise_detuning_total", {"n_srs", "n_fl", "n_fwm"},
          [gauss, lorentz](double x, std::span<const double> p) {
            return p[0] + p[1] * voigt::voigt_unit_peak(x, gauss, lorentz) + p[2];
          },
          [gauss, lorentz](double x, std::span<const double>, std::span<double> g) {
            g[0] = 1.0;
            g[1] = voigt::voigt_unit_peak(x, gauss, lorentz);
            g[2] = 1.0;
          }};
}

Model eta_pulse_width() {
  // ns * MHz = 1e-3
  return {"eta_pulse_width", {"eta0", "bandwidth_mhz"},
          [](double x, std::span<const double> p) {
            const double u = 4.0 * std::numbers::ln2 / (x * p[1] * 1e-3);
            return p[0] / std::sqrt(1.0 + u * u);
          },
          [](double x, std::span<const double> p, std::span<double> g) {
            const double u = 4.0 * std::numbers::ln2 / (x * p[1] * 1e-3);
            const double s = 1.0 + u * u;
            g[0] = 1.0 / std::sqrt(s);
            g[1] = p[0] * u * u / (p[1] * s * std::sqrt(s));
          }};
}

Model eta_energy() {
  return {"eta_energy", {"eta0", "a_pj"},
          [](double x, std::span<const double> p) { return p[0] * std::exp(-p[1] / x); },
          [](double x, std::span<const double> p, std::span<double> g) {
            const double e = std::exp(-p[1] / x);
            g[0] = e;
            g[1] = -p[0] * e / x;
          }};
}

Model eta_detuning() {
  return {"eta_detuning", {"eta0", "fwhm_mhz", "center_mhz", "peak_absorbance"},
          [](double x, std::span<const double> p) {
            const double q = 2.0 * (x - p[2]) / p[1];
            return p[0] * std::exp(-p[3] / (1.0 + q * q));
          },
          [](double x, std::span<const double> p, std::span<double> g) {
            const double q = 2.0 * (x - p[2]) / p[1];
            const double l = 1.0 / (1.0 + q * q);
            const double f = p[0] * std::exp(-p[3] * l);
            const double dl_dq = -2.0 * q * l * l;
            const double df_dq = -f * p[3] * dl_dq;
            g[0] = std::exp(-p[3] * l);
            g[1] = df_dq * (-q / p[1]);
            g[2] = df_dq * (-2.0 / p[1]);
            g[3] = -f * l;
          }};
}

Model exp_decay() {
  return {"exp_decay", {"a", "k"},
          [](double x, std::span<const double> p) { return p[0] * std::exp(-p[1] * x); },
          [](double x, std::span<const double> p, std::span<double> g) {
            const double e = std::exp(-p[1] * x);
            g[0] = e;
            g[1] = -p[0] * x * e;
          }};
}

struct Problem {
  const Model& model;
  std::vector<double> x, y, w;  // w = 1 / sigma
  std::vector<std::size_t> free;

  double chi2(std::span<const double> p) const {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = (y[i] - model.value(x[i], p)) * w[i];
      s += r * r;
    }
    return s;
  }

  // Residual vector r and Jacobian dr/dp over the free parameters.
  void linearize(std::span<const double> p, Eigen::VectorXd& r, Eigen::MatrixXd& jac) const {
    const std::size_t n = x.size();
    r.resize(static_cast<Eigen::Index>(n));
    jac.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(free.size()));
    std::vector<double> g(p.size());
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      r(row) = (y[i] - model.value(x[i], p)) * w[i];
      model.gradient(x[i], p, g);
      for (std::size_t k = 0; k < free.size(); ++k)
        jac(row, static_cast<Eigen::Index>(k)) = -g[free[k]] * w[i];
    }
  }
};

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

// Pseudo-inverse of a normal matrix after diagonal scaling. Directions with
// a relative eigenvalue below 1e-12 are unconstrained: the parameters that
// participate in them get infinite variance.
Eigen::MatrixXd covariance_from_normal(const Eigen::MatrixXd& a) {
  const Eigen::Index k = a.rows();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
  if (k == 0) return cov;
  Eigen::VectorXd d(k);
  std::vector<bool> unbounded(static_cast<std::size_t>(k), false);
  for (Eigen::Index j = 0; j < k; ++j) {
    d(j) = a(j, j) > 0.0 ? 1.0 / std::sqrt(a(j, j)) : 0.0;
    if (a(j, j) <= 0.0) unbounded[static_cast<std::size_t>(j)] = true;
  }
  const Eigen::MatrixXd s = d.asDiagonal() * a * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  const Eigen::VectorXd ev = es.eigenvalues();
  const Eigen::MatrixXd v = es.eigenvectors();
  const double tol = 1e-12 * std::max(ev.maxCoeff(), 0.0);
  Eigen::MatrixXd inv = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index e = 0; e < k; ++e) {
    if (ev(e) > tol && ev(e) > 0.0) {
      inv += v.col(e) * v.col(e).transpose() / ev(e);
    } else {
      for (Eigen::Index j = 0; j < k; ++j)
        if (std::abs(v(j, e)) > 1e-6) unbounded[static_cast<std::size_t>(j)] = true;
    }
  }
  cov = d.asDiagonal() * inv * d.asDiagonal();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!unbounded[static_cast<std::size_t>(j)]) continue;
    for (Eigen::Index i = 0; i < k; ++i) {
      cov(i, j) = std::numeric_limits<double>::quiet_NaN();
      cov(j, i) = std::numeric_limits<double>::quiet_NaN();
    }
    cov(j, j) = kInf;
  }
  return cov;
}

}  // namespace

void Dataset::validate(std::size_t n_free) const {
  require(y.size() == x.size() && sigma_y.size() == x.size(),
          "dataset: x, y and sigma_y must have equal lengths");
  require(x.size() >= n_free + 1, "dataset: need at least n_free + 1 points");
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(std::isfinite(x[i]) && std::isfinite(y[i]), "dataset: values must be finite");
    require(sigma_y[i] > 0.0 && std::isfinite(sigma_y[i]), "dataset: sigma_y must be > 0");
  }
}

Dataset Dataset::with_poisson_sigma(std::vector<double> x, std::vector<double> y,
                                    double attempts) {
  require(attempts > 0.0, "dataset: attempts must be > 0");
  Dataset d{std::move(x), std::move(y), {}};
  d.sigma_y.reserve(d.y.size());
  for (double v : d.y) {
    require(v >= 0.0, "dataset: Poisson weights need y >= 0");
    d.sigma_y.push_back(std::sqrt(std::max(v * attempts, 1.0)) / attempts);
  }
  return d;
}

std::vector<std::string> registered_models() {
  return {"proportional",    "linear",     "noise_energy", "noise_detuning_total",
          "eta_pulse_width", "eta_energy", "eta_detuning", "exp_decay"};
}

Model make_model(std::string_view name, const ModelConstants& c) {
  if (name == "proportional") return proportional();
  if (name == "linear") return linear();
  if (name == "noise_energy") return noise_energy();
  if (name == "noise_detuning_total")
    return noise_detuning_total(c.voigt_gauss_fwhm_mhz, c.voigt_lorentz_fwhm_mhz);
  if (name == "eta_pulse_width") return eta_pulse_width();
  if (name == "eta_energy") return eta_energy();
  if (name == "eta_detuning") return eta_detuning();
  if (name == "exp_decay") return exp_decay();
  throw DomainError("unknown model '" + std::string(name) + "'");
}

std::vector<double> finite_difference_gradient(const Model& m, double x,
                                               std::span<const double> p, double step) {
  std::vector<double> q(p.begin(), p.end());
  std::vector<double> g(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double h = step * std::max(std::abs(p[j]), 1.0);
    q[j] = p[j] + h;
    const double up = m.value(x, q);
    q[j] = p[j] - h;
    const double down = m.value(x, q);
    q[j] = p[j];
    g[j] = (up - down) / (2.0 * h);
  }
  return g;
}

FitResult least_squares_fit(const Model& m, const Dataset& data, std::vector<double> init,
                            std::vector<double> lower, std::vector<double> upper,
                            const FitOptions& opt) {
  const std::size_t np = m.n_params();
  require(init.size() == np && lower.size() == np && upper.size() == np,
          "least_squares_fit: parameter vectors must match the model");
  FitResult res;
  res.model = m.name;
  res.param_names = m.param_names;
  res.fixed.resize(np);

  Problem pb{m, {}, {}, {}, {}};
  for (std::size_t j = 0; j < np; ++j) {
    require(!(lower[j] > upper[j]), "least_squares_fit: lower bound exceeds upper bound");
    require(init[j] >= lower[j] && init[j] <= upper[j],
            "least_squares_fit: initial value outside bounds");
    res.fixed[j] = lower[j] == upper[j];
    if (!res.fixed[j]) pb.free.push_back(j);
  }
  data.validate(pb.free.size());

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(data.x[a], data.y[a], data.sigma_y[a]) <
           std::tie(data.x[b], data.y[b], data.sigma_y[b]);
  });
  for (std::size_t i : order) {
    pb.x.push_back(data.x[i]);
    pb.y.push_back(data.y[i]);
    pb.w.push_back(1.0 / data.sigma_y[i]);
  }

  const std::size_t nf = pb.free.size();
  const auto kf = static_cast<Eigen::Index>(nf);
  res.dof = static_cast<int>(data.size() - nf);
  std::vector<double> p = std::move(init);
  double chi2 = pb.chi2(p);
  auto finish = [&](bool converged, std::string diag) {
    res.params = p;
    res.chi2 = chi2;
    res.chi2_reduced = chi2 / res.dof;
    res.converged = converged;
    res.diagnostic = std::move(diag);
    return res;
  };
  if (!std::isfinite(chi2)) return finish(false, "model is not finite at the initial point");

  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  double lambda = opt.initial_damping;
  bool converged = nf == 0;
  std::string diag = converged ? "no free parameters" : "";
  while (!converged && res.n_iterations < opt.max_iterations) {
    ++res.n_iterations;
    pb.linearize(p, r, jac);
    if (!all_finite(jac) || !r.allFinite()) return finish(false, "non-finite Jacobian");
    const Eigen::MatrixXd a = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;

    // Parameters on a bound whose descent direction points outward are held.
    std::vector<Eigen::Index> act;
    for (Eigen::Index k = 0; k < kf; ++k) {
      const std::size_t j = pb.free[static_cast<std::size_t>(k)];
      const bool pinned = (p[j] <= lower[j] && grad(k) > 0.0) ||
                          (p[j] >= upper[j] && grad(k) < 0.0);
      if (!pinned) act.push_back(k);
    }
    if (act.empty()) {
      converged = true;
      diag = "all free parameters held at bounds";
      break;
    }
    const auto na = static_cast<Eigen::Index>(act.size());
    Eigen::MatrixXd aa(na, na);
    Eigen::VectorXd ga(na);
    for (Eigen::Index i = 0; i < na; ++i) {
      ga(i) = grad(act[static_cast<std::size_t>(i)]);
      for (Eigen::Index k = 0; k < na; ++k)
        aa(i, k) = a(act[static_cast<std::size_t>(i)], act[static_cast<std::size_t>(k)]);
    }
    const double dmax = aa.diagonal().maxCoeff();
    if (!(dmax > 0.0)) return finish(false, "singular normal equations: model is insensitive to every parameter");

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd lhs = aa;
      for (Eigen::Index i = 0; i < na; ++i) lhs(i, i) += lambda * std::max(aa(i, i), 1e-12 * dmax);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(lhs);
      Eigen::VectorXd step = ldlt.solve(-ga);
      if (ldlt.info() != Eigen::Success || !step.allFinite()) {
        if (lambda > kMaxDamping) return finish(false, "singular normal equations");
        lambda *= 10.0;
        continue;
      }
      std::vector<double> trial = p;
      for (Eigen::Index i = 0; i < na; ++i) {
        const std::size_t j = pb.free[static_cast<std::size_t>(act[static_cast<std::size_t>(i)])];
        trial[j] = std::clamp(p[j] + step(i), lower[j], upper[j]);
      }
      const double chi2_trial = pb.chi2(trial);
      if (std::isfinite(chi2_trial) && chi2_trial < chi2) {
        bool small_step = true;
        for (std::size_t j : pb.free)
          if (std::abs(trial[j] - p[j]) > opt.param_tolerance * std::abs(trial[j]))
            small_step = false;
        const bool small_drop = chi2 - chi2_trial <= opt.chi2_tolerance * chi2;
        p = std::move(trial);
        chi2 = chi2_trial;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (small_step || small_drop || chi2 == 0.0) converged = true;
      } else {
        lambda *= 10.0;
        if (lambda > kMaxDamping) {
          // No descent at any damping: the current point is a minimum to
          // working precision.
          converged = true;
          diag = "no further decrease";
          break;
        }
      }
    }
  }
  if (!converged) return finish(false, "iteration limit reached");

  res.covariance = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(np), static_cast<Eigen::Index>(np));
  if (nf > 0) {
    pb.linearize(p, r, jac);
    const Eigen::MatrixXd cf = covariance_from_normal(jac.transpose() * jac);
    for (Eigen::Index i = 0; i < kf; ++i)
      for (Eigen::Index k = 0; k < kf; ++k)
        res.covariance(static_cast<Eigen::Index>(pb.free[static_cast<std::size_t>(i)]),
                       static_cast<Eigen::Index>(pb.free[static_cast<std::size_t>(k)])) = cf(i, k);
  }
  return finish(true, diag);
}

std::vector<double> param_uncertainties(const FitResult& r) {
  require(r.converged, "param_uncertainties: fit did not converge");
  const double scale = std::sqrt(r.chi2_reduced);
  std::vector<double> s(r.params.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double v = r.covariance(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
    s[j] = std::isinf(v) ? kInf : std::sqrt(std::max(v, 0.0)) * scale;
  }
  return s;
}

Eigen::MatrixXd scaled_covariance(const FitResult& r) { return r.covariance * r.chi2_reduced; }

}  // namespace memlab::fit
