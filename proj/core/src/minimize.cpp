#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "wqed/error.hpp"
#include "wqed/fit.hpp"

namespace wqed {
namespace {

// Maps a parameter to the unit interval when both bounds are finite and to
// x / scale otherwise, so one tolerance serves every parameter.
struct Scaling {
  std::vector<double> lo, width;
  std::vector<bool> boxed;

  Scaling(const std::vector<double>& x0, const std::vector<Bound>& bounds) {
    for (std::size_t i = 0; i < x0.size(); ++i) {
      const bool b = std::isfinite(bounds[i].lo) && std::isfinite(bounds[i].hi);
      boxed.push_back(b);
      lo.push_back(b ? bounds[i].lo : 0.0);
      width.push_back(b ? bounds[i].hi - bounds[i].lo : std::max(1.0, std::abs(x0[i])));
    }
  }
  std::vector<double> to_unit(const std::vector<double>& x) const {
    std::vector<double> u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) u[i] = (x[i] - lo[i]) / width[i];
    return u;
  }
  std::vector<double> from_unit(const std::vector<double>& u) const {
    std::vector<double> x(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) x[i] = lo[i] + u[i] * width[i];
    return x;
  }
};

class Engine {
 public:
  Engine(const Objective& f, const std::vector<Bound>& bounds, const Scaling& scaling,
         const MinimizeOptions& options)
      : f_(f), bounds_(bounds), scaling_(scaling), options_(options) {}

  double eval(std::vector<double>& u) {
    project(u);
    const double v = f_(scaling_.from_unit(u));
    ++evaluations_;
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteObjective, "objective returned a non-finite value");
    return v;
  }

  bool budget_left() const { return evaluations_ < options_.max_evaluations; }
  std::size_t evaluations() const { return evaluations_; }

  // Runs one simplex from `start`; returns true on convergence.
  bool run(std::vector<double>& best, double& best_value) {
    const std::size_t n = best.size();
    std::vector<std::vector<double>> pts(n + 1, best);
    std::vector<double> vals(n + 1, best_value);
    for (std::size_t i = 0; i < n; ++i) {
      const double step = options_.initial_step;
      double& c = pts[i + 1][i];
      c += (scaling_.boxed[i] && c + step > 1.0) ? -step : step;
      if (!budget_left()) {
        pts.resize(i + 1);
        vals.resize(i + 1);
        const auto it = std::min_element(vals.begin(), vals.end());
        best = pts[static_cast<std::size_t>(it - vals.begin())];
        best_value = *it;
        return false;
      }
      vals[i + 1] = eval(pts[i + 1]);
    }

    std::vector<std::size_t> order(n + 1);
    while (true) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
      const auto& lo_pt = pts[order.front()];
      double diameter = 0.0;
      for (const auto& p : pts)
        for (std::size_t k = 0; k < n; ++k) diameter = std::max(diameter, std::abs(p[k] - lo_pt[k]));
      const double spread = vals[order.back()] - vals[order.front()];
      if (diameter < options_.x_tolerance ||
          spread < options_.f_tolerance * std::max(1.0, std::abs(vals[order.front()]))) {
        best = pts[order.front()];
        best_value = vals[order.front()];
        return true;
      }
      // A step costs at most n + 2 evaluations (reflect, expand or contract,
      // shrink); stop before it could overrun the budget.
      if (evaluations_ + n + 2 > options_.max_evaluations) {
        best = pts[order.front()];
        best_value = vals[order.front()];
        return false;
      }

      const std::size_t worst = order.back();
      const std::size_t second = order[n - 1];
      std::vector<double> centroid(n, 0.0);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[order[j]][k] / static_cast<double>(n);

      auto along = [&](double coef) {
        std::vector<double> p(n);
        for (std::size_t k = 0; k < n; ++k) p[k] = centroid[k] + coef * (pts[worst][k] - centroid[k]);
        return p;
      };

      auto reflected = along(-1.0);
      const double fr = eval(reflected);
      if (fr < vals[order.front()]) {
        auto expanded = along(-2.0);
        const double fe = eval(expanded);
        if (fe < fr) {
          pts[worst] = expanded;
          vals[worst] = fe;
        } else {
          pts[worst] = reflected;
          vals[worst] = fr;
        }
        continue;
      }
      if (fr < vals[second]) {
        pts[worst] = reflected;
        vals[worst] = fr;
        continue;
      }
      const bool outside = fr < vals[worst];
      auto contracted = along(outside ? -0.5 : 0.5);
      const double fc = eval(contracted);
      if (fc < (outside ? fr : vals[worst])) {
        pts[worst] = contracted;
        vals[worst] = fc;
        continue;
      }
      // Shrink towards the best vertex.
      const std::size_t b = order.front();
      for (std::size_t j = 1; j <= n; ++j) {
        auto& p = pts[order[j]];
        for (std::size_t k = 0; k < n; ++k) p[k] = pts[b][k] + 0.5 * (p[k] - pts[b][k]);
        vals[order[j]] = eval(p);
      }
    }
  }

 private:
  // Reflect at the box faces, then clamp whatever is still outside.
  void project(std::vector<double>& u) const {
    for (std::size_t i = 0; i < u.size(); ++i) {
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      if (scaling_.boxed[i]) {
        lo = 0.0;
        hi = 1.0;
      } else {
        if (std::isfinite(bounds_[i].lo)) lo = (bounds_[i].lo - scaling_.lo[i]) / scaling_.width[i];
        if (std::isfinite(bounds_[i].hi)) hi = (bounds_[i].hi - scaling_.lo[i]) / scaling_.width[i];
      }
      if (u[i] < lo) u[i] = lo + (lo - u[i]);
      if (u[i] > hi) u[i] = hi - (u[i] - hi);
      u[i] = std::clamp(u[i], lo, hi);
    }
  }

  const Objective& f_;
  const std::vector<Bound>& bounds_;
  const Scaling& scaling_;
  const MinimizeOptions& options_;
  std::size_t evaluations_ = 0;
};

}  // namespace

MinimizeResult minimize(const Objective& f, std::vector<double> initial,
                        const std::vector<Bound>& bounds, const MinimizeOptions& options) {
  if (initial.empty()) fail(ErrorCode::OutOfRange, "no free parameters");
  if (bounds.size() != initial.size()) fail(ErrorCode::OutOfRange, "bounds and initial differ in length");
  for (std::size_t i = 0; i < initial.size(); ++i) {
    if (!std::isfinite(initial[i])) fail(ErrorCode::NonFinite, "initial parameter is not finite");
    if (initial[i] < bounds[i].lo || initial[i] > bounds[i].hi)
      fail(ErrorCode::OutOfRange, "initial parameter outside its bounds");
  }

  const Scaling scaling(initial, bounds);
  Engine engine(f, bounds, scaling, options);
  std::vector<double> u = scaling.to_unit(initial);
  double value = engine.eval(u);

  bool converged = engine.run(u, value);
  for (int r = 0; r < options.restarts && converged; ++r) {
    const double before = value;
    converged = engine.run(u, value);
    if (before - value <= options.f_tolerance * std::max(1.0, std::abs(value))) break;
  }

  MinimizeResult res;
  res.x = scaling.from_unit(u);
  res.value = value;
  res.evaluations = engine.evaluations();
  res.status = converged ? MinimizeStatus::Converged : MinimizeStatus::MaxEvaluations;
  return res;
}

CurvatureInfo curvature_uncertainties(const Objective& chi2, const std::vector<double>& x,
                                      const std::vector<Bound>& bounds, std::size_t n_points,
                                      bool scale_by_residual, double rank_tol) {
  const std::size_t n = x.size();
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double width = (std::isfinite(bounds[i].lo) && std::isfinite(bounds[i].hi))
                             ? bounds[i].hi - bounds[i].lo
                             : std::max(1.0, std::abs(x[i]));
    h[i] = 1e-4 * width;
  }
  // Stencil points that would leave the box are shifted inside; the central
  // difference is then taken about the shifted centre.
  std::vector<double> c = x;
  for (std::size_t i = 0; i < n; ++i) {
    if (c[i] - 2.0 * h[i] < bounds[i].lo) c[i] = bounds[i].lo + 2.0 * h[i];
    if (c[i] + 2.0 * h[i] > bounds[i].hi) c[i] = bounds[i].hi - 2.0 * h[i];
  }
  auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
    std::vector<double> p = c;
    p[i] += di * h[i];
    p[j] += dj * h[j];
    return chi2(p);
  };
  const double f0 = chi2(c);
  Eigen::MatrixXd hess(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    hess(i, i) = (at(i, 1, i, 0) - 2.0 * f0 + at(i, -1, i, 0)) / (h[i] * h[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = (at(i, 1, j, 1) - at(i, 1, j, -1) - at(i, -1, j, 1) + at(i, -1, j, -1)) /
                       (4.0 * h[i] * h[j]);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }

  // Rank test on the Hessian in step-normalised units. Negative curvature at
  // the optimum means the direction is not resolved either.
  Eigen::MatrixXd scaled = hess;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scaled(i, j) *= h[i] * h[j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled);
  const auto& ev = es.eigenvalues();
  CurvatureInfo info;
  info.sigma.assign(n, std::numeric_limits<double>::quiet_NaN());
  info.unidentified.assign(n, false);
  const double emax = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
  if (!(emax > 0.0)) {
    info.rank_deficient = true;
    info.unidentified.assign(n, true);
    return info;
  }
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev(k) >= rank_tol * emax) continue;
    info.rank_deficient = true;
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(es.eigenvectors()(static_cast<Eigen::Index>(i), k)) > 0.1) info.unidentified[i] = true;
  }
  if (info.rank_deficient) return info;

  const double dof = n_points > n ? static_cast<double>(n_points - n) : 1.0;
  const double factor = scale_by_residual ? std::max(f0, 0.0) / dof : 1.0;
  const Eigen::MatrixXd cov = 2.0 * hess.inverse() * factor;
  for (std::size_t i = 0; i < n; ++i)
    info.sigma[i] = cov(i, i) >= 0.0 ? std::sqrt(cov(i, i)) : std::numeric_limits<double>::quiet_NaN();
  return info;
}

}  // namespace wqed
