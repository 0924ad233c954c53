#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <vector>

#include "mtinsar/errors.hpp"
#include "mtinsar/multires.hpp"
#include "mtinsar/robust.hpp"
#include "mtinsar/triangulation.hpp"

namespace mtinsar {

/// Topography-correlated atmospheric delay model: one transfer coefficient
/// per multiresolution band. delay(p) = sum_b K_b * elevation_band_b(p).
struct AtmoModel {
  std::vector<double> band_coeffs;       // K_b, rad per meter of elevation
  std::vector<double> reconstructed_delay;  // per pixel, radians
  bool identifiable = true;              // false when elevation is constant
  double residual_rms = 0.0;

  /// Variance-weighted mean coefficient across bands; equals the plain
  /// phase-vs-elevation slope when the relation is exactly linear.
  double aggregate_coeff = 0.0;
};

struct AtmoOptions {
  int levels = 4;
  bool robust = true;
  IrlsOptions irls{.tukey_c = kTukeyC,
                   .max_iter = 50,
                   .tol = 1e-8,
                   .tol_on_coeffs = true,
                   .weight_floor = 0.0};
};

/// Estimates topography-correlated delays for interferograms sharing one
/// pixel network. The decomposition operator and the elevation bands are
/// computed once and reused across pairs.
///
/// Phase and elevation are decomposed into the same multiresolution bands;
/// each band's phase is regressed on its elevation (robustly, with an
/// intercept that is discarded: constants belong to the orbital model).
/// Bands whose elevation content is negligible are skipped, contributing
/// zero delay. Constant elevation makes the delay unidentifiable: the model
/// is returned with identifiable=false and zero correction.
class AtmoEstimator {
 public:
  AtmoEstimator(const TriNetwork& net, std::span<const double> elevation,
                const AtmoOptions& opt = {})
      : n_(net.nodes.size()), opt_(opt), dec_(net, opt.levels) {
    if (elevation.size() != n_)
      throw Error(ErrorCode::DimensionMismatch,
                  "elevation length does not match network nodes");
    Eigen::Map<const Eigen::VectorXd> elev(elevation.data(),
                                           static_cast<Eigen::Index>(n_));
    elev_var_ =
        (elev.array() - elev.mean()).square().sum() / static_cast<double>(n_);
    identifiable_ = elev_var_ >= 1e-12;
    if (!identifiable_) return;
    elev_bands_ = dec_.decompose(elevation);
    band_var_.resize(elev_bands_.size());
    for (std::size_t b = 0; b < elev_bands_.size(); ++b) {
      Eigen::Map<const Eigen::VectorXd> eb(elev_bands_[b].data(),
                                           static_cast<Eigen::Index>(n_));
      band_var_[b] =
          (eb.array() - eb.mean()).square().sum() / static_cast<double>(n_);
    }
  }

  AtmoModel estimate(std::span<const double> phase) const {
    if (phase.size() != n_)
      throw Error(ErrorCode::DimensionMismatch,
                  "phase length does not match network nodes");
    AtmoModel model;
    model.reconstructed_delay.assign(n_, 0.0);
    if (!identifiable_) {
      model.identifiable = false;
      model.band_coeffs.assign(static_cast<std::size_t>(opt_.levels) + 1, 0.0);
      return model;
    }

    const auto phase_bands = dec_.decompose(phase);
    double coeff_wsum = 0.0, var_sum = 0.0;
    for (std::size_t b = 0; b < phase_bands.size(); ++b) {
      if (band_var_[b] < 1e-9 * elev_var_) {
        model.band_coeffs.push_back(0.0);
        continue;  // no topographic content at this scale
      }
      Eigen::Map<const Eigen::VectorXd> pb(phase_bands[b].data(),
                                           static_cast<Eigen::Index>(n_));
      Eigen::Map<const Eigen::VectorXd> eb(elev_bands_[b].data(),
                                           static_cast<Eigen::Index>(n_));
      Eigen::MatrixXd X(n_, 2);
      X.col(0) = eb;
      X.col(1).setOnes();
      double k_b;
      if (opt_.robust) {
        k_b = irls_fit(X, pb,
                       Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n_)),
                       opt_.irls)
                  .coeffs(0);
      } else {
        const Eigen::VectorXd beta = Eigen::LDLT<Eigen::MatrixXd>(
                                         X.transpose() * X)
                                         .solve(X.transpose() * pb);
        k_b = beta(0);
      }
      model.band_coeffs.push_back(k_b);
      for (std::size_t i = 0; i < n_; ++i)
        model.reconstructed_delay[i] += k_b * elev_bands_[b][i];
      coeff_wsum += k_b * band_var_[b];
      var_sum += band_var_[b];
    }
    if (var_sum > 0.0) model.aggregate_coeff = coeff_wsum / var_sum;

    double rss = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double r = phase[i] - model.reconstructed_delay[i];
      rss += r * r;
    }
    model.residual_rms = std::sqrt(rss / static_cast<double>(n_));
    return model;
  }

 private:
  std::size_t n_;
  AtmoOptions opt_;
  MultiresDecomposer dec_;
  std::vector<std::vector<double>> elev_bands_;
  std::vector<double> band_var_;
  double elev_var_ = 0.0;
  bool identifiable_ = true;
};

inline AtmoModel estimate_topo_delay(const TriNetwork& net,
                                     std::span<const double> phase,
                                     std::span<const double> elevation,
                                     const AtmoOptions& opt = {}) {
  return AtmoEstimator(net, elevation, opt).estimate(phase);
}

/// Apply an atmospheric model: corrected = phase - reconstructed delay.
/// The pixel set is never altered.
inline std::vector<double> apply_atmo_correction(const AtmoModel& model,
                                                 std::span<const double> phase) {
  std::vector<double> out(phase.begin(), phase.end());
  if (!model.identifiable) return out;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] -= model.reconstructed_delay[i];
  return out;
}

/// Bilinear orbital ramp: phase ~ a0 + a1*x + a2*y (+ a3*x*y optionally).
struct RampModel {
  double a0 = 0.0;  // rad
  double a1 = 0.0;  // rad / px
  double a2 = 0.0;  // rad / px
  double a3 = 0.0;  // rad / px^2, only when cross term enabled
  bool has_cross_term = false;
  double residual_rms = 0.0;

  double evaluate(double x, double y) const {
    return a0 + a1 * x + a2 * y + (has_cross_term ? a3 * x * y : 0.0);
  }
};

struct RampOptions {
  bool robust = true;
  bool cross_term = false;
  IrlsOptions irls{.tukey_c = kTukeyC,
                   .max_iter = 50,
                   .tol = 1e-8,
                   .tol_on_coeffs = true,
                   .weight_floor = 0.0};
};

/// Fit an orbital ramp over the pixel coordinates. Robust mode uses Tukey
/// IRLS so that localized deformation does not leak into the ramp estimate.
/// Coordinates are centered internally for conditioning; reported
/// coefficients refer to the original frame.
inline RampModel estimate_ramp(std::span<const double> phase,
                               std::span<const TriPoint> coords,
                               const RampOptions& opt = {}) {
  const std::size_t n = phase.size();
  if (coords.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "phase/coords length mismatch");
  const int n_params = opt.cross_term ? 4 : 3;
  if (static_cast<int>(n) < std::max(4, n_params))
    throw Error(ErrorCode::DegenerateGeometry, "need at least 4 pixels");

  double mx = 0.0, my = 0.0;
  for (const auto& p : coords) {
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  Eigen::MatrixXd X(n, n_params);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double cx = coords[i].x - mx, cy = coords[i].y - my;
    X(static_cast<Eigen::Index>(i), 0) = 1.0;
    X(static_cast<Eigen::Index>(i), 1) = cx;
    X(static_cast<Eigen::Index>(i), 2) = cy;
    if (opt.cross_term) X(static_cast<Eigen::Index>(i), 3) = cx * cy;
    y(static_cast<Eigen::Index>(i)) = phase[i];
  }
  // collinear pixels leave the plane underdetermined
  {
    const Eigen::MatrixXd xtx = X.transpose() * X;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
    lu.setThreshold(1e-10);
    if (lu.rank() < n_params)
      throw Error(ErrorCode::DegenerateGeometry,
                  "pixel coordinates are collinear");
  }

  Eigen::VectorXd beta;
  double rss = 0.0;
  if (opt.robust) {
    const auto res = irls_fit(
        X, y, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)), opt.irls);
    beta = res.coeffs;
    rss = res.residuals.squaredNorm();
  } else {
    beta = Eigen::LDLT<Eigen::MatrixXd>(X.transpose() * X).solve(X.transpose() * y);
    rss = (y - X * beta).squaredNorm();
  }

  RampModel ramp;
  ramp.has_cross_term = opt.cross_term;
  ramp.a1 = beta(1);
  ramp.a2 = beta(2);
  if (opt.cross_term) {
    ramp.a3 = beta(3);
    ramp.a1 -= ramp.a3 * my;  // un-center the cross term
    ramp.a2 -= ramp.a3 * mx;
    ramp.a0 = beta(0) - beta(1) * mx - beta(2) * my + ramp.a3 * mx * my;
  } else {
    ramp.a0 = beta(0) - beta(1) * mx - beta(2) * my;
  }
  ramp.residual_rms = std::sqrt(rss / static_cast<double>(n));
  return ramp;
}

inline std::vector<double> apply_ramp_correction(const RampModel& ramp,
                                                 std::span<const double> phase,
                                                 std::span<const TriPoint> coords) {
  std::vector<double> out(phase.begin(), phase.end());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] -= ramp.evaluate(coords[i].x, coords[i].y);
  return out;
}

}  // namespace mtinsar
