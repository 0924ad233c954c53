#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "mtinsar/catalog.hpp"
#include "mtinsar/dates.hpp"
#include "mtinsar/errors.hpp"
#include "mtinsar/geometry.hpp"
#include "mtinsar/stack.hpp"

namespace mtinsar {

struct PixelQuality {
  int pixel_id = 0;
  double temporal_coherence = 0.0;
  bool selected = false;
};

/// Temporal coherence of every pixel against a model phase:
/// gamma = |mean_k exp(i (phi_obs - phi_model))|, clamped to [0, 1].
inline std::vector<double> temporal_coherence(const InterferogramStack& stack,
                                              const Eigen::MatrixXd& model_phase) {
  if (model_phase.rows() != stack.phase.rows() ||
      model_phase.cols() != stack.phase.cols())
    throw Error(ErrorCode::DimensionMismatch,
                "model phase shape does not match stack");
  const Eigen::Index np = stack.n_pairs(), nx = stack.n_pixels();
  std::vector<double> coh(static_cast<std::size_t>(nx), 1.0);
  if (np == 0) return coh;
  for (Eigen::Index p = 0; p < nx; ++p) {
    double re = 0.0, im = 0.0;
    for (Eigen::Index k = 0; k < np; ++k) {
      const double d = stack.phase(k, p) - model_phase(k, p);
      re += std::cos(d);
      im += std::sin(d);
    }
    const double g = std::hypot(re, im) / static_cast<double>(np);
    coh[static_cast<std::size_t>(p)] = std::min(g, 1.0);
  }
  return coh;
}

struct CoherenceOptions {
  double rate_scan_mm_yr = 40.0;   // scan [-v, +v]
  double coarse_step_mm_yr = 1.0;
  int fine_refine = 20;            // fine step = coarse/fine_refine, +-1 coarse
  RadarConstants radar{};
};

/// Per-pixel temporal coherence against a wrapped-phase-safe linear-rate
/// model, found with a two-pass scan: a coarse sweep over candidate rates
/// followed by a fine sweep around the coarse optimum. Fitting in the
/// complex domain avoids unwrapping before pixel selection.
inline std::vector<double> bootstrap_coherence(const InterferogramStack& stack,
                                               const AcquisitionCatalog& catalog,
                                               const CoherenceOptions& opt = {}) {
  const Eigen::Index np = stack.n_pairs(), nx = stack.n_pixels();
  std::vector<double> coh(static_cast<std::size_t>(nx), 1.0);
  if (np == 0) return coh;

  std::vector<double> dt_years(static_cast<std::size_t>(np));
  for (std::size_t k = 0; k < stack.pairs.size(); ++k) {
    const auto& [i, j] = stack.pairs.pairs[k];
    dt_years[k] = years_between(catalog.date(i), catalog.date(j));
  }

  // candidate model phasors; rate v (mm/yr) maps to pair phase
  // -4*pi/lambda * v * dt (toward-sensor displacement lowers phase)
  auto model_phasors = [&](double v_mm_yr) {
    std::vector<std::complex<double>> m(static_cast<std::size_t>(np));
    const double rate_phase =
        displacement_cm_to_phase(v_mm_yr * 0.1, opt.radar);  // rad per year
    for (std::size_t k = 0; k < m.size(); ++k)
      m[k] = std::polar(1.0, rate_phase * dt_years[k]);
    return m;
  };

  std::vector<double> coarse_rates;
  for (double v = -opt.rate_scan_mm_yr; v <= opt.rate_scan_mm_yr + 1e-9;
       v += opt.coarse_step_mm_yr)
    coarse_rates.push_back(v);
  std::vector<std::vector<std::complex<double>>> coarse_models;
  coarse_models.reserve(coarse_rates.size());
  for (double v : coarse_rates) coarse_models.push_back(model_phasors(v));

  const double fine_step = opt.coarse_step_mm_yr / opt.fine_refine;
  std::vector<std::complex<double>> z(static_cast<std::size_t>(np));
  for (Eigen::Index p = 0; p < nx; ++p) {
    for (Eigen::Index k = 0; k < np; ++k)
      z[static_cast<std::size_t>(k)] = std::polar(1.0, stack.phase(k, p));
    auto gamma_against = [&](const std::vector<std::complex<double>>& m) {
      std::complex<double> s{0.0, 0.0};
      for (std::size_t k = 0; k < z.size(); ++k) s += z[k] * std::conj(m[k]);
      return std::abs(s) / static_cast<double>(np);
    };
    // pass 1: coarse
    double best_rate = 0.0, best_gamma = -1.0;
    for (std::size_t c = 0; c < coarse_rates.size(); ++c) {
      const double g = gamma_against(coarse_models[c]);
      if (g > best_gamma) {
        best_gamma = g;
        best_rate = coarse_rates[c];
      }
    }
    // pass 2: fine, +- one coarse step around the winner
    for (int f = -opt.fine_refine; f <= opt.fine_refine; ++f) {
      const double v = best_rate + f * fine_step;
      const double g = gamma_against(model_phasors(v));
      if (g > best_gamma) best_gamma = g;
    }
    coh[static_cast<std::size_t>(p)] = std::min(best_gamma, 1.0);
  }
  return coh;
}

/// Pixels whose coherence meets the threshold, in input order.
inline std::vector<int> select_elite(const std::vector<PixelQuality>& quality,
                                     double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "threshold must be in [0, 1]");
  std::vector<int> selected;
  for (const auto& q : quality)
    if (q.temporal_coherence >= threshold) selected.push_back(q.pixel_id);
  return selected;
}

inline std::vector<PixelQuality> make_quality(const std::vector<double>& coh,
                                              double threshold) {
  std::vector<PixelQuality> q(coh.size());
  for (std::size_t p = 0; p < coh.size(); ++p) {
    q[p].pixel_id = static_cast<int>(p);
    q[p].temporal_coherence = coh[p];
    q[p].selected = coh[p] >= threshold;
  }
  return q;
}

}  // namespace mtinsar
