#pragma once

// Two-stage readout-noise decomposition: per-detuning fits of noise versus
// control energy, then the detuning model through the assembled components.

#include <optional>
#include <string>
#include <vector>

#include "memlab/fitting.hpp"
#include "memlab/models.hpp"

namespace memlab::fit {

struct NoiseEnergyFit {
  FitResult fit;                     // (b, c, d, e); b held at 0 when b_frozen
  std::vector<double> sigma;         // reported 1-sigma per parameter
  bool b_frozen = false;
  double sigma_b_free = 0.0;         // sigma_b of the fit with b free
  bool saturation_unresolved = false;
};

/// Fits N(E) = b E^2 + c E + d E / (e + E) with all parameters >= 0.
/// Requires >= 5 points spanning a factor >= 2 in E. Several starting values
/// of e are tried and the lowest chi2 kept. When freezing b at 0 costs less
/// than 1 in chi2 the frozen fit is reported. e is flagged unresolved when
/// e > 5 max(E) or sigma_e >= e; its sigma is then raised to at least e.
NoiseEnergyFit fit_noise_energy(const Dataset& data, bool allow_b_freeze = true);

/// Components at energy e_ref with their propagated covariance, ordered
/// (fwm, srs, fluorescence). Unconstrained components have infinite variance.
struct ComponentEstimate {
  models::NoiseComponents value;
  models::NoiseComponents sigma;
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  double total_sigma = 0.0;  // from the reported fit alone
};

ComponentEstimate components_at(const NoiseEnergyFit& f, double e_ref_pj);

struct ScanPoint {
  double delta_mhz = 0.0;
  Dataset data;  // x = control energy (pJ), y = counts per attempt
};

struct DecomposedPoint {
  double delta_mhz = 0.0;
  double e_ref_pj = 0.0;
  bool converged = false;
  bool fwm_excluded = false;  // refit with b held at 0 after a failed fit
  bool saturation_unresolved = false;
  std::optional<ComponentEstimate> components;
  std::optional<NoiseEnergyFit> fit;
  std::string error;
};

/// Per-detuning decomposition at the scan's maximum control energy. A failed
/// detuning is recorded in its row; the others are unaffected. Output keeps
/// the input order.
std::vector<DecomposedPoint> decompose_vs_detuning(const std::vector<ScanPoint>& scan,
                                                   int jobs = 1);

struct DetuningPoint {
  double delta_mhz = 0.0;
  double total = 0.0;
  double sigma_total = 0.0;
  std::optional<ComponentEstimate> components;
};

struct TotalNoiseFit {
  std::vector<std::string> param_names{"n_srs", "n_fl", "n_fwm"};
  std::vector<double> params;       // (n_srs, n_fl, n_fwm)
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();  // scaled, same order
  std::vector<double> sigma;
  FitResult totals_fit;             // (n_srs + n_fwm, n_fl, 0) against the totals
  bool converged = false;
  bool wing_degenerate = false;
  bool n_fwm_pinned = false;        // no FWM components were supplied
  std::vector<std::string> warnings;
};

/// Fits N(delta) = n_srs + n_fl V(delta) + n_fwm with fixed Voigt widths.
/// The totals fix n_fl and the constant n_srs + n_fwm; the constant is split
/// using the inverse-variance mean of per-detuning FWM components when every
/// point carries them, otherwise n_fwm is held at 0.
TotalNoiseFit fit_total_noise(const std::vector<DetuningPoint>& points,
                              double voigt_gauss_fwhm_mhz = 380.0,
                              double voigt_lorentz_fwhm_mhz = 920.0);

/// Assembles fit_total_noise input from a decomposition, skipping failed rows.
std::vector<DetuningPoint> detuning_points(const std::vector<DecomposedPoint>& rows);

}  // namespace memlab::fit
