#pragma once

// Bound-constrained Levenberg-Marquardt least squares over a fixed registry
// of models.

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace memlab::fit {

struct Dataset {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> sigma_y;

  std::size_t size() const { return x.size(); }
  /// Equal lengths, finite values, sigma_y > 0, at least n_free + 1 points.
  void validate(std::size_t n_free) const;

  /// Poisson weights for y in counts per attempt: sigma = sqrt(y * attempts) / attempts,
  /// with a one-count floor for empty points.
  static Dataset with_poisson_sigma(std::vector<double> x, std::vector<double> y,
                                    double attempts);
};

struct Model {
  std::string name;
  std::vector<std::string> param_names;
  std::function<double(double x, std::span<const double> p)> value;
  // Writes df/dp into `grad` (size = param count).
  std::function<void(double x, std::span<const double> p, std::span<double> grad)> gradient;

  std::size_t n_params() const { return param_names.size(); }
};

/// Constants of models that carry fixed shape parameters.
struct ModelConstants {
  double voigt_gauss_fwhm_mhz = 380.0;
  double voigt_lorentz_fwhm_mhz = 920.0;
};

/// Names accepted by make_model, in registry order.
std::vector<std::string> registered_models();
/// Throws DomainError for an unknown name.
Model make_model(std::string_view name, const ModelConstants& constants = {});

/// Central-difference gradient with relative step `step`.
std::vector<double> finite_difference_gradient(const Model& m, double x,
                                               std::span<const double> p, double step = 1e-6);

struct FitOptions {
  int max_iterations = 200;
  double initial_damping = 1e-3;
  double param_tolerance = 1e-8;
  double chi2_tolerance = 1e-10;
};

struct FitResult {
  std::string model;
  std::vector<std::string> param_names;
  std::vector<double> params;
  std::vector<bool> fixed;       // lower == upper bound
  Eigen::MatrixXd covariance;    // unscaled (J^T J)^-1; inf where unconstrained
  double chi2 = 0.0;
  double chi2_reduced = 0.0;
  int dof = 0;
  bool converged = false;
  int n_iterations = 0;
  std::string diagnostic;
};

/// Fits `m` to `data` starting from `init`. Parameters with lower == upper are
/// held fixed. Infinite bounds are allowed. Data order does not affect the
/// result. Numerical failures yield converged = false with a diagnostic.
FitResult least_squares_fit(const Model& m, const Dataset& data, std::vector<double> init,
                            std::vector<double> lower, std::vector<double> upper,
                            const FitOptions& opt = {});

/// sqrt(diag(covariance)) * sqrt(chi2_reduced); infinity for unconstrained
/// directions, zero for fixed parameters. Throws DomainError if not converged.
std::vector<double> param_uncertainties(const FitResult& r);

/// Covariance scaled by chi2_reduced, consistent with param_uncertainties.
Eigen::MatrixXd scaled_covariance(const FitResult& r);

}  // namespace memlab::fit
