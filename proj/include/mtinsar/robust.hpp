#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "mtinsar/errors.hpp"

namespace mtinsar {

inline constexpr double kTukeyC = 4.685;
inline constexpr double kMadToSigma = 1.4826022185056018;  // 1/Phi^-1(3/4)

/// Lower median: for even counts the smaller of the two central elements.
/// Matches the convention used for the velocity-field statistics.
inline double median(std::vector<double> v) {
  if (v.empty()) throw Error(ErrorCode::InvalidArgument, "median of empty set");
  const std::size_t mid = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid),
                   v.end());
  return v[mid];
}

inline double median(const Eigen::VectorXd& v) {
  return median(std::vector<double>(v.data(), v.data() + v.size()));
}

/// MAD-based robust sigma estimate.
inline double mad_scale(const Eigen::VectorXd& r) {
  const double med = median(r);
  Eigen::VectorXd dev = (r.array() - med).abs();
  return kMadToSigma * median(dev);
}

/// Tukey biweight on a normalized residual u = r / (c * scale).
inline double tukey_weight(double u) {
  const double a = std::abs(u);
  if (a >= 1.0) return 0.0;
  const double t = 1.0 - u * u;
  return t * t;
}

struct IrlsOptions {
  double tukey_c = kTukeyC;
  int max_iter = 30;
  double tol = 1e-6;             // threshold for the convergence metric
  bool tol_on_coeffs = false;    // metric: max |dcoeff| instead of max |dweight|
  double weight_floor = 1e-3;    // 0 allows hard rejection of outliers
};

struct IrlsResult {
  Eigen::VectorXd coeffs;
  Eigen::VectorXd weights;   // final combined weights actually used
  Eigen::VectorXd residuals;
  int iterations = 0;
  bool converged = false;
};

/// Iteratively reweighted least squares with Tukey biweight.
///
/// Solves y ~ X * beta. Residuals are normalized by a MAD scale before the
/// biweight is applied; prior_weights multiply the robust weights. When the
/// residual scale collapses (all residuals equal, e.g. an exact fit), the
/// weights are left unchanged and iteration stops: that state is already a
/// fixed point.
inline IrlsResult irls_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& prior_weights,
                           const IrlsOptions& opt = {}) {
  const Eigen::Index m = X.rows(), n = X.cols();
  if (y.size() != m || prior_weights.size() != m)
    throw Error(ErrorCode::DimensionMismatch, "irls_fit dimensions disagree");
  if (m < n) throw Error(ErrorCode::RankDeficient, "fewer rows than unknowns");

  auto solve_weighted = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    const Eigen::MatrixXd Xw = w.asDiagonal() * X;
    const Eigen::MatrixXd ata = X.transpose() * Xw;
    const Eigen::VectorXd atb = Xw.transpose() * y;
    return Eigen::LDLT<Eigen::MatrixXd>(ata).solve(atb);
  };

  IrlsResult res;
  res.weights = prior_weights.cwiseMax(opt.weight_floor);
  res.coeffs = solve_weighted(res.weights);
  for (res.iterations = 1; res.iterations <= opt.max_iter; ++res.iterations) {
    res.residuals = y - X * res.coeffs;
    const double scale = mad_scale(res.residuals);
    const double data_scale = std::max(y.cwiseAbs().maxCoeff(), 1.0);
    if (scale < 1e-12 * data_scale) {
      // residuals (essentially) all equal: reweighting is a no-op
      res.converged = true;
      break;
    }
    Eigen::VectorXd w(m);
    for (Eigen::Index i = 0; i < m; ++i)
      w(i) = std::max(prior_weights(i) *
                          tukey_weight(res.residuals(i) / (opt.tukey_c * scale)),
                      opt.weight_floor);
    Eigen::VectorXd new_coeffs = solve_weighted(w);
    if (!new_coeffs.allFinite()) {
      // hard rejection left a singular system; retry with a small floor
      w = w.cwiseMax(1e-3);
      new_coeffs = solve_weighted(w);
    }
    const double dw = (w - res.weights).cwiseAbs().maxCoeff();
    const double dc = (new_coeffs - res.coeffs).cwiseAbs().maxCoeff();
    res.weights = w;
    res.coeffs = new_coeffs;
    if ((opt.tol_on_coeffs ? dc : dw) < opt.tol) {
      res.converged = true;
      break;
    }
  }
  res.residuals = y - X * res.coeffs;
  return res;
}

}  // namespace mtinsar
