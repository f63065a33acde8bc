#pragma once

// Derivative-free least squares: a bounded Nelder-Mead simplex plus the two
// model fits (saturation curve, Fano spectrum).

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "wqed/ensemble.hpp"
#include "wqed/params.hpp"

namespace wqed {

enum class DatasetKind { Spectrum, Saturation, G2 };

/// x: detuning (GHz), applied power (nW) or delay (ns) depending on kind.
struct Dataset {
  DatasetKind kind = DatasetKind::Saturation;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> y_err;  // empty -> unit weights
  PowerConversion conversion;
};

const Dataset& validate(const Dataset& d);

/// Two or three numeric columns (x, y[, y_err]); '#' lines and blank lines
/// skipped; ',' or whitespace separated. Throws InvalidDataset / Io.
Dataset read_dataset_csv(const std::string& path, DatasetKind kind);
Dataset parse_dataset_csv(const std::string& text, DatasetKind kind);

struct Bound {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

struct MinimizeOptions {
  std::size_t max_evaluations = 20000;
  double x_tolerance = 1e-8;  // simplex diameter, in scaled parameter units
  double f_tolerance = 1e-12; // spread of objective over the simplex
  double initial_step = 0.05; // relative to the bound width (or |x|, 1)
  int restarts = 2;           // re-seed the simplex at the optimum
};

enum class MinimizeStatus { Converged, MaxEvaluations };

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  MinimizeStatus status = MinimizeStatus::Converged;
  bool converged() const { return status == MinimizeStatus::Converged; }
};

using Objective = std::function<double(const std::vector<double>&)>;

/// Nelder-Mead with trial points reflected back into the box. Deterministic.
/// Throws NonFiniteObjective if the objective returns NaN or inf.
MinimizeResult minimize(const Objective& f, std::vector<double> initial,
                        const std::vector<Bound>& bounds, const MinimizeOptions& options = {});

struct FittedParameter {
  std::string name;
  double value = 0.0;
  double uncertainty = 0.0;  // NaN when the curvature is singular
  bool free = true;
};

struct FitResult {
  std::vector<FittedParameter> params;
  double residual_norm = 0.0;  // weighted sum of squares
  double residual_per_point = 0.0;
  std::size_t n_evaluations = 0;
  bool converged = false;
  bool unidentifiable = false;
  std::vector<std::string> warnings;
  std::map<std::string, double> derived;

  const FittedParameter& param(const std::string& name) const;
};

/// Local quadratic expansion of the weighted sum of squares around `x`.
/// Returns the covariance-based 1-sigma uncertainties (NaN entries if the
/// Hessian is singular) and whether it is rank deficient beyond `rank_tol`.
struct CurvatureInfo {
  std::vector<double> sigma;
  bool rank_deficient = false;
  std::vector<bool> unidentified;  // large component on a null direction
};
CurvatureInfo curvature_uncertainties(const Objective& chi2, const std::vector<double>& x,
                                      const std::vector<Bound>& bounds, std::size_t n_points,
                                      bool scale_by_residual, double rank_tol = 1e-8);

// --- saturation -------------------------------------------------------------

/// Free-parameter mask for fit_saturation; Gamma always stays fixed.
struct SaturationMask {
  bool beta = true;
  bool sigma = true;
  bool alpha = true;
  bool dephasing = true;
};

/// Parameter vector of the saturation model.
struct SaturationParams {
  double beta = 0.85;
  double sigma = 3.6;                   // units of Gamma
  double alpha = 0.43;
  double dephasing_over_gamma = 0.79;   // gamma_deph / gamma_rad
};

struct SaturationFitOptions {
  double gamma_rad = 2.5;        // fixed, ns^-1
  SaturationParams initial;
  SaturationMask free;
  MinimizeOptions minimizer;
  std::size_t quadrature_order = 0;  // 0 -> converged order for the widest sigma
  double sigma_max = 8.0;
};

/// Noise-averaged resonant T_total at each flux (photons per lifetime), with
/// a fixed quadrature rule. This is the fit model.
std::vector<double> saturation_model(const SaturationParams& p, double gamma_rad,
                                     const std::vector<double>& flux, const GaussRule& rule);

/// Fits measured T(power). Derived outputs: "n_c" (noise-free critical flux)
/// and "switching_energy_aJ".
FitResult fit_saturation(const Dataset& data, const SaturationFitOptions& options);

// --- Fano spectrum ----------------------------------------------------------

struct FanoParams {
  double reflectivity = 0.1;     // r_left = r_right
  double phi_left = 0.0;
  double phi_right = 0.0;
  double phase_dispersion = 0.0; // rad per Gamma
  double offset_ghz = 0.0;       // emitter line centre
  double scale = 1.0;            // overall transmission scale
  double beta = 0.85;
};

struct FanoFitOptions {
  EmitterParams emitter;  // gamma_rad, gamma_deph fixed; beta is the start value
  FanoParams initial;
  MinimizeOptions minimizer;
};

/// Model for fit_fano: scale * |t_total|^2 at frequency x (GHz).
std::vector<double> fano_model(const FanoParams& p, const EmitterParams& emitter,
                               const std::vector<double>& x_ghz);

FitResult fit_fano(const Dataset& data, const FanoFitOptions& options);

std::string to_string(DatasetKind kind);
DatasetKind dataset_kind_from_string(const std::string& s);

}  // namespace wqed
