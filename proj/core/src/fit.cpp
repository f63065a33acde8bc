#include "wqed/fit.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "wqed/dynamics.hpp"
#include "wqed/error.hpp"
#include "wqed/scattering.hpp"

namespace wqed {

std::string to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::Spectrum: return "spectrum";
    case DatasetKind::Saturation: return "saturation";
    case DatasetKind::G2: return "g2";
  }
  return "unknown";
}

DatasetKind dataset_kind_from_string(const std::string& s) {
  if (s == "spectrum") return DatasetKind::Spectrum;
  if (s == "saturation") return DatasetKind::Saturation;
  if (s == "g2") return DatasetKind::G2;
  fail(ErrorCode::InvalidDataset, "unknown dataset kind '" + s + "'");
}

const Dataset& validate(const Dataset& d) {
  if (d.x.size() != d.y.size()) fail(ErrorCode::InvalidDataset, "x and y differ in length");
  if (!d.y_err.empty() && d.y_err.size() != d.y.size())
    fail(ErrorCode::InvalidDataset, "y_err and y differ in length");
  if (d.x.size() < 2) fail(ErrorCode::InvalidDataset, "dataset needs at least two rows");
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    if (!std::isfinite(d.x[i]) || !std::isfinite(d.y[i]))
      fail(ErrorCode::InvalidDataset, "non-finite value in row " + std::to_string(i + 1));
    if (i > 0 && !(d.x[i] > d.x[i - 1]))
      fail(ErrorCode::InvalidDataset, "x must be strictly increasing (row " + std::to_string(i + 1) + ")");
    if (!d.y_err.empty() && !(d.y_err[i] > 0.0))
      fail(ErrorCode::InvalidDataset, "y_err must be > 0 (row " + std::to_string(i + 1) + ")");
  }
  if (d.kind == DatasetKind::Saturation) validate(d.conversion);
  return d;
}

Dataset parse_dataset_csv(const std::string& text, DatasetKind kind) {
  Dataset d;
  d.kind = kind;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> row;
    std::size_t pos = first;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
      if (pos >= line.size()) break;
      double v = 0.0;
      const char* begin = line.data() + pos;
      const char* end = line.data() + line.size();
      auto [ptr, ec] = std::from_chars(begin, end, v);
      if (ec != std::errc() || ptr == begin)
        fail(ErrorCode::InvalidDataset, "line " + std::to_string(lineno) + ": not a number");
      row.push_back(v);
      pos = static_cast<std::size_t>(ptr - line.data());
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
      if (pos < line.size()) {
        if (line[pos] != ',')
          fail(ErrorCode::InvalidDataset, "line " + std::to_string(lineno) + ": unexpected character");
        ++pos;
      }
    }
    if (row.size() < 2 || row.size() > 3)
      fail(ErrorCode::InvalidDataset, "line " + std::to_string(lineno) + ": expected 2 or 3 columns");
    if (columns == 0) columns = row.size();
    if (row.size() != columns)
      fail(ErrorCode::InvalidDataset, "line " + std::to_string(lineno) + ": inconsistent column count");
    d.x.push_back(row[0]);
    d.y.push_back(row[1]);
    if (columns == 3) d.y_err.push_back(row[2]);
  }
  validate(d);
  return d;
}

Dataset read_dataset_csv(const std::string& path, DatasetKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open dataset '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dataset_csv(ss.str(), kind);
}

const FittedParameter& FitResult::param(const std::string& name) const {
  for (const auto& p : params)
    if (p.name == name) return p;
  fail(ErrorCode::OutOfRange, "no fitted parameter named '" + name + "'");
}

namespace {

double weighted_ss(const std::vector<double>& model, const Dataset& d) {
  double acc = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double r = (model[i] - d.y[i]) / (d.y_err.empty() ? 1.0 : d.y_err[i]);
    acc += r * r;
  }
  return acc;
}

// Generic driver: the full parameter vector with a free mask.
struct ParamSpace {
  std::vector<std::string> names;
  std::vector<double> full;
  std::vector<bool> free;
  std::vector<Bound> bounds;

  std::vector<double> free_values() const {
    std::vector<double> v;
    for (std::size_t i = 0; i < full.size(); ++i)
      if (free[i]) v.push_back(full[i]);
    return v;
  }
  std::vector<Bound> free_bounds() const {
    std::vector<Bound> b;
    for (std::size_t i = 0; i < full.size(); ++i)
      if (free[i]) b.push_back(bounds[i]);
    return b;
  }
  std::vector<double> expand(const std::vector<double>& v) const {
    std::vector<double> out = full;
    std::size_t k = 0;
    for (std::size_t i = 0; i < full.size(); ++i)
      if (free[i]) out[i] = v[k++];
    return out;
  }
};

FitResult run_fit(const ParamSpace& space, const std::function<std::vector<double>(const std::vector<double>&)>& model,
                  const Dataset& data, const MinimizeOptions& options) {
  const Objective chi2 = [&](const std::vector<double>& v) {
    return weighted_ss(model(space.expand(v)), data);
  };
  const auto bounds = space.free_bounds();
  const MinimizeResult mr = minimize(chi2, space.free_values(), bounds, options);

  FitResult fr;
  fr.residual_norm = mr.value;
  fr.residual_per_point = mr.value / static_cast<double>(data.x.size());
  fr.n_evaluations = mr.evaluations;
  fr.converged = mr.converged();
  if (!fr.converged) fr.warnings.push_back("MaxEvaluations: returning best point found");

  const CurvatureInfo ci =
      curvature_uncertainties(chi2, mr.x, bounds, data.x.size(), data.y_err.empty());
  fr.unidentifiable = ci.rank_deficient;
  const auto values = space.expand(mr.x);
  std::size_t k = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    FittedParameter p;
    p.name = space.names[i];
    p.value = values[i];
    p.free = space.free[i];
    if (p.free) {
      p.uncertainty = ci.sigma[k];
      if (ci.rank_deficient && ci.unidentified[k])
        fr.warnings.push_back("Unidentifiable: " + p.name);
      ++k;
    } else {
      p.uncertainty = 0.0;
    }
    fr.params.push_back(p);
  }
  if (ci.rank_deficient && fr.warnings.empty()) fr.warnings.push_back("Unidentifiable: Hessian rank deficient");
  return fr;
}

SaturationParams saturation_from(const std::vector<double>& v) {
  return {v[0], v[1], v[2], v[3]};
}

}  // namespace

std::vector<double> saturation_model(const SaturationParams& p, double gamma_rad,
                                     const std::vector<double>& flux, const GaussRule& rule) {
  EmitterParams e{gamma_rad, p.beta, p.dephasing_over_gamma * gamma_rad};
  const NoiseModel noise{p.sigma, p.alpha};
  std::vector<double> out;
  out.reserve(flux.size());
  for (double n : flux) {
    const auto bright = [&](double d) { return transmission_closed_form(e, {d, n}).total; };
    out.push_back(average_spectrum_fixed(bright, 1.0, noise, rule, 0.0));
  }
  return out;
}

FitResult fit_saturation(const Dataset& data, const SaturationFitOptions& options) {
  validate(data);
  if (data.kind != DatasetKind::Saturation) fail(ErrorCode::InvalidDataset, "expected a saturation dataset");
  if (!(options.gamma_rad > 0.0)) fail(ErrorCode::OutOfRange, "gamma_rad must be > 0");
  const auto& init = options.initial;
  if (!options.free.beta && init.beta == 0.0)
    fail(ErrorCode::NoContrast, "beta fixed at 0: no resonant contrast, critical flux undefined");

  std::vector<double> flux;
  for (double p : data.x) flux.push_back(units::power_to_flux(p, options.gamma_rad, data.conversion));

  ParamSpace space;
  space.names = {"beta", "sigma", "alpha", "gamma_deph_over_gamma"};
  space.full = {init.beta, init.sigma, init.alpha, init.dephasing_over_gamma};
  space.free = {options.free.beta, options.free.sigma, options.free.alpha, options.free.dephasing};
  space.bounds = {{0.0, 1.0}, {0.0, options.sigma_max}, {0.0, 0.999}, {0.0, 10.0}};

  std::size_t order = options.quadrature_order;
  std::string order_warning;
  if (order == 0) {
    // Worst case for the Gaussian rule is the widest sigma in the box.
    EmitterParams e{options.gamma_rad, std::max(init.beta, 0.5), init.dephasing_over_gamma * options.gamma_rad};
    EnsembleSpec spec;
    spec.noise = {options.sigma_max, 0.0};
    const auto bright = [&](double d) { return transmission_closed_form(e, {d, flux.front()}).total; };
    try {
      order = converged_order(bright, spec, 0.0);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::QuadratureNotConverged) throw;
      order = spec.max_order;
      order_warning = std::string("QuadratureNotConverged: using order ") + std::to_string(order);
    }
  }
  const auto rule = gauss_hermite(order);

  const auto model = [&](const std::vector<double>& v) {
    return saturation_model(saturation_from(v), options.gamma_rad, flux, *rule);
  };
  FitResult fr = run_fit(space, model, data, options.minimizer);
  if (!order_warning.empty()) fr.warnings.push_back(order_warning);

  const EmitterParams fitted{options.gamma_rad, fr.param("beta").value,
                             fr.param("gamma_deph_over_gamma").value * options.gamma_rad};
  const double nc = critical_flux(fitted, {});
  fr.derived["n_c"] = nc;
  fr.derived["switching_energy_aJ"] = units::switching_energy_aj(nc, data.conversion.wavelength_nm);
  fr.derived["quadrature_order"] = static_cast<double>(order);
  return fr;
}

std::vector<double> fano_model(const FanoParams& p, const EmitterParams& emitter,
                               const std::vector<double>& x_ghz) {
  EmitterParams e = emitter;
  e.beta = p.beta;
  const CavityBackground cav{p.reflectivity, p.reflectivity, p.phi_left, p.phi_right, p.phase_dispersion};
  std::vector<double> out;
  out.reserve(x_ghz.size());
  for (double x : x_ghz) {
    const double detuning = 2.0 * std::numbers::pi * (x - p.offset_ghz) / emitter.gamma_rad;
    out.push_back(p.scale * std::norm(composite(e, cav, detuning).t));
  }
  return out;
}

FitResult fit_fano(const Dataset& data, const FanoFitOptions& options) {
  validate(data);
  if (data.kind != DatasetKind::Spectrum) fail(ErrorCode::InvalidDataset, "expected a spectrum dataset");
  validate(options.emitter);
  const auto& in = options.initial;

  ParamSpace space;
  space.names = {"reflectivity", "phi_left", "phi_right", "phase_dispersion", "offset_ghz", "scale", "beta"};
  space.full = {in.reflectivity, in.phi_left, in.phi_right, in.phase_dispersion, in.offset_ghz, in.scale, in.beta};
  space.free.assign(space.full.size(), true);
  const double inf = std::numeric_limits<double>::infinity();
  space.bounds = {{0.0, 0.95}, {-inf, inf}, {-inf, inf}, {-inf, inf}, {-inf, inf}, {0.0, 10.0}, {0.0, 1.0}};

  const auto model = [&](const std::vector<double>& v) {
    const FanoParams p{v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
    return fano_model(p, options.emitter, data.x);
  };
  return run_fit(space, model, data, options.minimizer);
}

}  // namespace wqed
