#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "mtinsar/catalog.hpp"
#include "mtinsar/dates.hpp"
#include "mtinsar/errors.hpp"
#include "mtinsar/geometry.hpp"
#include "mtinsar/pairs.hpp"
#include "mtinsar/robust.hpp"
#include "mtinsar/stack.hpp"

namespace mtinsar {

/// LOS displacement history of one pixel. The reference epoch is pinned to
/// exactly zero displacement and zero sigma.
struct TimeSeries {
  std::vector<SerialDay> epochs;
  std::vector<double> displacement_cm;
  std::vector<double> sigma_cm;
  int ref_index = 0;
};

struct VelocityEstimate {
  double rate_mm_yr = 0.0;
  double std_mm_yr = 0.0;
};

struct InvertPixelResult {
  Eigen::VectorXd epoch_phase;  // n-1 entries, reference epoch omitted
  Eigen::MatrixXd covariance;   // of epoch_phase, from the final weights
  Eigen::VectorXd weights;      // final per-pair weights
  int iterations = 0;
};

struct InversionOptions {
  double tukey_c = kTukeyC;
  int max_iter = 30;
  double weight_tol = 1e-6;
  double prior_floor = 1e-3;  // floor on the initial quality weights
};

/// Robust network inversion of one pixel's pair phases.
///
/// Weighted least squares followed by Tukey reweighting on MAD-normalized
/// residuals until the weights move less than weight_tol (or max_iter).
/// Initial weights come from the stack quality values, floored at 1e-3 so
/// the first solve cannot be singular; the reweighting itself may reject
/// outlier pairs completely. The covariance is s^2 (A' W A)^-1 with the
/// unbiased residual variance from the final weights.
inline InvertPixelResult invert_pixel(const Eigen::VectorXd& pair_phase,
                                      const DesignMatrix& dm,
                                      const Eigen::VectorXd& weights,
                                      const InversionOptions& opt = {}) {
  const Eigen::Index m = dm.m.rows(), n = dm.m.cols();
  if (pair_phase.size() != m || weights.size() != m)
    throw Error(ErrorCode::DimensionMismatch,
                "pair phase/weights do not match design matrix rows");
  if (m < n)
    throw Error(ErrorCode::RankDeficient, "fewer pairs than unknown epochs");

  IrlsOptions irls;
  irls.tukey_c = opt.tukey_c;
  irls.max_iter = opt.max_iter;
  irls.tol = opt.weight_tol;
  irls.tol_on_coeffs = false;
  irls.weight_floor = 0.0;
  const IrlsResult fit =
      irls_fit(dm.m, pair_phase, weights.cwiseMax(opt.prior_floor), irls);

  InvertPixelResult res;
  res.epoch_phase = fit.coeffs;
  res.weights = fit.weights;
  res.iterations = fit.iterations;

  const Eigen::MatrixXd ata =
      dm.m.transpose() * fit.weights.asDiagonal() * dm.m;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(ata);
  const double dof = static_cast<double>(m - n);
  double s2 = 0.0;
  if (dof > 0.0) {
    const Eigen::VectorXd r = fit.residuals;
    s2 = (fit.weights.array() * r.array().square()).sum() / dof;
  }
  res.covariance =
      s2 * ldlt.solve(Eigen::MatrixXd::Identity(n, n));
  return res;
}

/// Weighted linear regression of displacement against decimal years.
///
/// Epoch sigmas define the weights (1/sigma^2); epochs with sigma == 0,
/// such as the pinned reference epoch, get the largest finite weight seen.
/// The reported std is the slope's standard error from the covariance
/// scaled by the unbiased residual variance (n-2 dof); it is zero when
/// fewer than 3 epochs leave no dof.
inline VelocityEstimate fit_velocity(const TimeSeries& ts) {
  const std::size_t n = ts.epochs.size();
  if (n < 2)
    throw Error(ErrorCode::InsufficientEpochs, "need at least 2 epochs");
  if (ts.displacement_cm.size() != n || ts.sigma_cm.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "time series arrays disagree");

  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  double wmax = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = ts.sigma_cm[k];
    w(static_cast<Eigen::Index>(k)) = s > 0.0 ? 1.0 / (s * s) : -1.0;
    if (s > 0.0) wmax = std::max(wmax, 1.0 / (s * s));
  }
  if (wmax == 0.0) wmax = 1.0;
  for (Eigen::Index k = 0; k < w.size(); ++k)
    if (w(k) < 0.0) w(k) = wmax;

  const SerialDay ref = ts.epochs[static_cast<std::size_t>(ts.ref_index)];
  Eigen::VectorXd t(static_cast<Eigen::Index>(n)), y(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    t(static_cast<Eigen::Index>(k)) = years_between(ref, ts.epochs[k]);
    y(static_cast<Eigen::Index>(k)) = ts.displacement_cm[k] * 10.0;  // mm
  }

  const double sw = w.sum();
  const double tbar = w.dot(t) / sw;
  const double ybar = w.dot(y) / sw;
  double stt = 0.0, sty = 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    const double dt = t(k) - tbar;
    stt += w(k) * dt * dt;
    sty += w(k) * dt * (y(k) - ybar);
  }
  if (!(stt > 0.0))
    throw Error(ErrorCode::InsufficientEpochs, "all epochs at the same date");

  VelocityEstimate v;
  v.rate_mm_yr = sty / stt;
  if (n > 2) {
    double rss = 0.0;
    const double intercept = ybar - v.rate_mm_yr * tbar;
    for (Eigen::Index k = 0; k < w.size(); ++k) {
      const double r = y(k) - intercept - v.rate_mm_yr * t(k);
      rss += w(k) * r * r;
    }
    const double s2 = rss / static_cast<double>(n - 2);
    v.std_mm_yr = std::sqrt(s2 / stt);
  }
  return v;
}

/// Per-pixel product entry. ok == false marks pixels whose inversion failed;
/// they are excluded from exports but keep their slot here.
struct PixelSolution {
  int pixel_id = 0;
  double lon = 0.0, lat = 0.0;
  double incidence_deg = 0.0;
  double rate_mm_yr = 0.0;
  double std_mm_yr = 0.0;
  bool ok = true;
};

struct DisplacementProduct {
  std::vector<SerialDay> epochs;
  int ref_index = 0;
  std::vector<Pixel> pixels;
  std::vector<PixelSolution> solutions;
  Eigen::MatrixXd displacement_cm;  // pixels x epochs
  Eigen::MatrixXd sigma_cm;         // pixels x epochs

  std::size_t n_ok() const {
    std::size_t c = 0;
    for (const auto& s : solutions) c += s.ok ? 1 : 0;
    return c;
  }

  TimeSeries time_series(std::size_t pixel) const {
    TimeSeries ts;
    ts.epochs = epochs;
    ts.ref_index = ref_index;
    ts.displacement_cm.resize(epochs.size());
    ts.sigma_cm.resize(epochs.size());
    for (std::size_t e = 0; e < epochs.size(); ++e) {
      ts.displacement_cm[e] = displacement_cm(static_cast<Eigen::Index>(pixel),
                                              static_cast<Eigen::Index>(e));
      ts.sigma_cm[e] = sigma_cm(static_cast<Eigen::Index>(pixel),
                                static_cast<Eigen::Index>(e));
    }
    return ts;
  }
};

/// Invert a corrected, unwrapped stack into the displacement product.
/// Per-pixel failures are flagged, never fatal for the stack.
inline DisplacementProduct invert_stack(const InterferogramStack& stack,
                                        const AcquisitionCatalog& catalog,
                                        const DesignMatrix& dm,
                                        const ViewGeometry& geom,
                                        const RadarConstants& radar = {},
                                        const InversionOptions& opt = {}) {
  if (stack.wrapped)
    throw Error(ErrorCode::InvalidArgument,
                "stack must be unwrapped before inversion");
  stack.check_consistent();
  const Eigen::Index nx = stack.n_pixels();
  const std::size_t n_epochs = catalog.size();

  DisplacementProduct prod;
  prod.ref_index = dm.ref_index;
  prod.epochs.reserve(n_epochs);
  for (std::size_t e = 0; e < n_epochs; ++e) prod.epochs.push_back(catalog.date(e));
  prod.pixels = stack.pixels;
  prod.solutions.resize(static_cast<std::size_t>(nx));
  prod.displacement_cm = Eigen::MatrixXd::Zero(nx, static_cast<Eigen::Index>(n_epochs));
  prod.sigma_cm = Eigen::MatrixXd::Zero(nx, static_cast<Eigen::Index>(n_epochs));

  const double phase_to_cm = std::abs(phase_to_displacement_cm(1.0, radar));
  for (Eigen::Index p = 0; p < nx; ++p) {
    PixelSolution& sol = prod.solutions[static_cast<std::size_t>(p)];
    sol.pixel_id = static_cast<int>(p);
    sol.lon = stack.pixels[static_cast<std::size_t>(p)].lon;
    sol.lat = stack.pixels[static_cast<std::size_t>(p)].lat;
    sol.incidence_deg = geom.incidence_deg;
    try {
      const InvertPixelResult inv =
          invert_pixel(stack.phase.col(p), dm, stack.weights.col(p), opt);
      TimeSeries ts;
      ts.epochs = prod.epochs;
      ts.ref_index = dm.ref_index;
      ts.displacement_cm.assign(n_epochs, 0.0);
      ts.sigma_cm.assign(n_epochs, 0.0);
      for (std::size_t e = 0; e < n_epochs; ++e) {
        const int col = dm.col_of_acq[e];
        if (col < 0) continue;  // reference epoch stays exactly zero
        const double phi = inv.epoch_phase(col);
        ts.displacement_cm[e] = phase_to_displacement_cm(phi, radar);
        const double var = inv.covariance(col, col);
        ts.sigma_cm[e] = var > 0.0 ? std::sqrt(var) * phase_to_cm : 0.0;
      }
      const VelocityEstimate v = fit_velocity(ts);
      sol.rate_mm_yr = v.rate_mm_yr;
      sol.std_mm_yr = v.std_mm_yr;
      for (std::size_t e = 0; e < n_epochs; ++e) {
        prod.displacement_cm(p, static_cast<Eigen::Index>(e)) = ts.displacement_cm[e];
        prod.sigma_cm(p, static_cast<Eigen::Index>(e)) = ts.sigma_cm[e];
      }
    } catch (const Error&) {
      sol.ok = false;
    }
  }
  return prod;
}

}  // namespace mtinsar
