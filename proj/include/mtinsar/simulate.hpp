#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "mtinsar/catalog.hpp"
#include "mtinsar/dates.hpp"
#include "mtinsar/errors.hpp"
#include "mtinsar/geometry.hpp"
#include "mtinsar/jsonutil.hpp"
#include "mtinsar/pairs.hpp"
#include "mtinsar/phase.hpp"
#include "mtinsar/rng.hpp"
#include "mtinsar/stack.hpp"

namespace mtinsar {

/// Full ground truth for a synthetic scene. Every downstream estimate can be
/// checked against these fields.
struct SceneTruth {
  std::vector<Pixel> pixels;
  std::vector<double> velocity_mm_yr;       // per pixel, + toward sensor
  double seasonal_amp_mm = 0.0;             // optional sinusoidal term
  double seasonal_period_yr = 1.0;
  double seasonal_phase_rad = 0.0;
  std::vector<double> atmo_coeff_per_epoch;  // rad per meter of elevation
  std::vector<std::array<double, 3>> ramp_per_epoch;  // a0, a1, a2
  std::vector<double> dem_error_m;           // per pixel
  double dem_gain = 0.0;                     // rad per (m baseline * m error)
  std::vector<double> noise_sigma_rad;       // per pixel
  double decorrelate_fraction = 0.0;
  std::uint64_t seed = 0;

  void check_consistent(std::size_t n_epochs) const {
    const std::size_t n = pixels.size();
    if (velocity_mm_yr.size() != n || dem_error_m.size() != n ||
        noise_sigma_rad.size() != n)
      throw Error(ErrorCode::DimensionMismatch,
                  "scene per-pixel arrays disagree with pixel count");
    if (atmo_coeff_per_epoch.size() != n_epochs ||
        ramp_per_epoch.size() != n_epochs)
      throw Error(ErrorCode::DimensionMismatch,
                  "scene per-epoch arrays disagree with catalog size");
    for (double s : noise_sigma_rad)
      if (!(s >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "noise sigma must be >= 0");
  }

  /// LOS displacement (mm, toward sensor positive) of pixel p at dt years
  /// past the reference epoch.
  double displacement_mm(std::size_t p, double dt_years) const {
    double d = velocity_mm_yr[p] * dt_years;
    if (seasonal_amp_mm != 0.0)
      d += seasonal_amp_mm *
           std::sin(kTwoPi * dt_years / seasonal_period_yr + seasonal_phase_rad);
    return d;
  }
};

/// Stack generation output: the wrapped (or raw) stack plus the noise-free
/// per-epoch phase record used by oracle tests.
struct SimulatedStack {
  InterferogramStack stack;
  Eigen::MatrixXd epoch_phase;  // epochs x pixels, noise-free, ref epoch 0
  std::vector<double> true_velocity_mm_yr;
};

/// Synthesize an interferogram stack from ground truth.
///
/// Per-epoch phase = deformation + atmo_coeff*elevation + ramp +
/// dem_gain*baseline*dem_error, all relative to the first epoch; a pair's
/// phase is the epoch difference plus per-pair-pixel Gaussian noise, wrapped
/// on request. Noise streams are partitioned per pixel, so results do not
/// depend on evaluation order.
inline SimulatedStack generate_stack(const SceneTruth& truth,
                                     const AcquisitionCatalog& catalog,
                                     const PairSet& pairs,
                                     const RadarConstants& radar = {},
                                     bool wrapped = true) {
  const std::size_t n_epochs = catalog.size();
  const std::size_t n_pix = truth.pixels.size();
  truth.check_consistent(n_epochs);

  SimulatedStack out;
  out.true_velocity_mm_yr = truth.velocity_mm_yr;
  out.epoch_phase.resize(static_cast<Eigen::Index>(n_epochs),
                         static_cast<Eigen::Index>(n_pix));
  const SerialDay ref_date = catalog.date(0);
  const double ref_baseline = catalog.baseline(0);
  for (std::size_t e = 0; e < n_epochs; ++e) {
    const double dt = years_between(ref_date, catalog.date(e));
    const double db = catalog.baseline(e) - ref_baseline;
    const double atmo_k =
        truth.atmo_coeff_per_epoch[e] - truth.atmo_coeff_per_epoch[0];
    const auto& ramp0 = truth.ramp_per_epoch[0];
    const auto& ramp = truth.ramp_per_epoch[e];
    for (std::size_t p = 0; p < n_pix; ++p) {
      const Pixel& px = truth.pixels[p];
      double phi = displacement_cm_to_phase(
          truth.displacement_mm(p, dt) * 0.1, radar);
      phi += atmo_k * px.elevation_m;
      phi += (ramp[0] - ramp0[0]) + (ramp[1] - ramp0[1]) * px.x +
             (ramp[2] - ramp0[2]) * px.y;
      phi += truth.dem_gain * db * truth.dem_error_m[p];
      out.epoch_phase(static_cast<Eigen::Index>(e),
                      static_cast<Eigen::Index>(p)) = phi;
    }
  }

  InterferogramStack& s = out.stack;
  s.pairs = pairs;
  s.pixels = truth.pixels;
  s.wrapped = wrapped;
  s.phase.resize(static_cast<Eigen::Index>(pairs.size()),
                 static_cast<Eigen::Index>(n_pix));
  s.weights.resize(static_cast<Eigen::Index>(pairs.size()),
                   static_cast<Eigen::Index>(n_pix));
  for (std::size_t p = 0; p < n_pix; ++p) {
    Rng rng = Rng::stream(truth.seed, p);
    const double sigma = truth.noise_sigma_rad[p];
    const double w = std::min(1.0, std::max(std::exp(-sigma * sigma), 1e-3));
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto& [i, j] = pairs.pairs[k];
      double phi = out.epoch_phase(static_cast<Eigen::Index>(j),
                                   static_cast<Eigen::Index>(p)) -
                   out.epoch_phase(static_cast<Eigen::Index>(i),
                                   static_cast<Eigen::Index>(p));
      double wk = w;
      if (sigma > 0.0) phi += rng.normal(0.0, sigma);
      if (truth.decorrelate_fraction > 0.0 &&
          rng.uniform() < truth.decorrelate_fraction) {
        phi = rng.uniform(-kPi, kPi);  // fully decorrelated sample
        wk = 1e-3;
      }
      s.phase(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(p)) =
          wrapped ? wrap(phi) : phi;
      s.weights(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(p)) = wk;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scene configuration (JSON, documented in docs/formats.md)
// ---------------------------------------------------------------------------

struct SceneConfig {
  std::uint64_t seed = 1;
  // geometry
  double incidence_deg = 38.9;
  double heading_deg = 347.0;
  double wavelength_m = kDefaultWavelengthM;
  // grid
  int nx = 100, ny = 100;
  double spacing_m = 25.0;
  double lon0 = -74.05, lat0 = 40.60;
  // catalog (generated unless a file is given)
  std::string catalog_file;
  int n_epochs = 30;
  std::string start_date = "2015-03-12";
  double cadence_days = 12.0;
  double baseline_sigma_m = 50.0;
  // elevation
  std::string elevation_kind = "hills";  // constant | plane | hills
  double elevation_base_m = 20.0;
  double elevation_relief_m = 120.0;
  int elevation_hills = 8;
  double elevation_slope_m_per_px = 0.0;
  // deformation features
  struct Feature {
    std::string kind;  // bowl | peak
    double cx_px = 0.0, cy_px = 0.0;
    double radius_px = 10.0;  // bowl: support radius, peak: gaussian sigma
    double peak_mm_yr = 0.0;
  };
  std::vector<Feature> features;
  double seasonal_amp_mm = 0.0;
  double seasonal_period_yr = 1.0;
  double seasonal_phase_rad = 0.0;
  // nuisance terms
  double atmo_coeff_sigma = 0.0;   // rad/m, per-epoch coefficients ~ N(0, .)
  double ramp_a0_sigma = 0.0;      // rad
  double ramp_slope_sigma = 0.0;   // rad/px
  double dem_error_sigma_m = 0.0;
  double dem_gain = 0.0;           // rad per (m * m)
  // noise
  double noise_sigma_rad = 0.0;
  double noisy_fraction = 0.0;
  double noisy_sigma_rad = 0.0;
  double decorrelate_fraction = 0.0;
};

inline SceneConfig parse_scene_config(const Json& j) {
  check_keys(j, "scene",
             {"version", "seed", "geometry", "grid", "catalog", "elevation",
              "deformation", "atmosphere", "orbit", "dem_error", "noise",
              "decorrelation"});
  SceneConfig c;
  if (get_or<int>(j, "scene", "version", 1) != 1)
    throw Error(ErrorCode::InvalidConfig, "unsupported scene version");
  c.seed = get_or<std::uint64_t>(j, "scene", "seed", 1);

  if (j.contains("geometry")) {
    const auto& g = j.at("geometry");
    check_keys(g, "geometry", {"incidence_deg", "heading_deg", "wavelength_m"});
    c.incidence_deg = get_or<double>(g, "geometry", "incidence_deg", 38.9);
    c.heading_deg = get_or<double>(g, "geometry", "heading_deg", 347.0);
    c.wavelength_m =
        get_or<double>(g, "geometry", "wavelength_m", kDefaultWavelengthM);
    require_positive(c.wavelength_m, "geometry.wavelength_m");
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    check_keys(g, "grid", {"nx", "ny", "spacing_m", "lon0", "lat0"});
    c.nx = get_or<int>(g, "grid", "nx", 100);
    c.ny = get_or<int>(g, "grid", "ny", 100);
    c.spacing_m = get_or<double>(g, "grid", "spacing_m", 25.0);
    c.lon0 = get_or<double>(g, "grid", "lon0", -74.05);
    c.lat0 = get_or<double>(g, "grid", "lat0", 40.60);
    if (c.nx < 2 || c.ny < 2)
      throw Error(ErrorCode::InvalidConfig, "grid.nx/ny must be >= 2");
    require_positive(c.spacing_m, "grid.spacing_m");
  }
  if (j.contains("catalog")) {
    const auto& g = j.at("catalog");
    check_keys(g, "catalog",
               {"file", "count", "start_date", "cadence_days",
                "baseline_sigma_m"});
    c.catalog_file = get_or<std::string>(g, "catalog", "file", "");
    c.n_epochs = get_or<int>(g, "catalog", "count", 30);
    c.start_date = get_or<std::string>(g, "catalog", "start_date", "2015-03-12");
    c.cadence_days = get_or<double>(g, "catalog", "cadence_days", 12.0);
    c.baseline_sigma_m = get_or<double>(g, "catalog", "baseline_sigma_m", 50.0);
    if (c.catalog_file.empty()) {
      if (c.n_epochs < 2)
        throw Error(ErrorCode::InvalidConfig, "catalog.count must be >= 2");
      require_positive(c.cadence_days, "catalog.cadence_days");
      require_nonnegative(c.baseline_sigma_m, "catalog.baseline_sigma_m");
    }
  }
  if (j.contains("elevation")) {
    const auto& g = j.at("elevation");
    check_keys(g, "elevation",
               {"kind", "base_m", "relief_m", "n_hills", "slope_m_per_px"});
    c.elevation_kind = get_or<std::string>(g, "elevation", "kind", "hills");
    c.elevation_base_m = get_or<double>(g, "elevation", "base_m", 20.0);
    c.elevation_relief_m = get_or<double>(g, "elevation", "relief_m", 120.0);
    c.elevation_hills = get_or<int>(g, "elevation", "n_hills", 8);
    c.elevation_slope_m_per_px =
        get_or<double>(g, "elevation", "slope_m_per_px", 0.0);
    if (c.elevation_kind != "constant" && c.elevation_kind != "plane" &&
        c.elevation_kind != "hills")
      throw Error(ErrorCode::InvalidConfig,
                  "elevation.kind must be constant|plane|hills");
  }
  if (j.contains("deformation")) {
    const auto& g = j.at("deformation");
    check_keys(g, "deformation", {"features", "seasonal"});
    if (g.contains("features")) {
      for (const auto& f : g.at("features")) {
        check_keys(f, "deformation.features[]",
                   {"kind", "cx_px", "cy_px", "radius_px", "sigma_px",
                    "peak_mm_yr"});
        SceneConfig::Feature feat;
        feat.kind = get_req<std::string>(f, "feature", "kind");
        if (feat.kind != "bowl" && feat.kind != "peak")
          throw Error(ErrorCode::InvalidConfig,
                      "feature.kind must be bowl|peak");
        feat.cx_px = get_req<double>(f, "feature", "cx_px");
        feat.cy_px = get_req<double>(f, "feature", "cy_px");
        feat.radius_px = f.contains("radius_px")
                             ? get_req<double>(f, "feature", "radius_px")
                             : get_or<double>(f, "feature", "sigma_px", 10.0);
        require_positive(feat.radius_px, "feature radius/sigma");
        feat.peak_mm_yr = get_req<double>(f, "feature", "peak_mm_yr");
        c.features.push_back(feat);
      }
    }
    if (g.contains("seasonal")) {
      const auto& s = g.at("seasonal");
      check_keys(s, "seasonal", {"amplitude_mm", "period_yr", "phase_rad"});
      c.seasonal_amp_mm = get_or<double>(s, "seasonal", "amplitude_mm", 0.0);
      c.seasonal_period_yr = get_or<double>(s, "seasonal", "period_yr", 1.0);
      c.seasonal_phase_rad = get_or<double>(s, "seasonal", "phase_rad", 0.0);
      require_positive(c.seasonal_period_yr, "seasonal.period_yr");
    }
  }
  if (j.contains("atmosphere")) {
    const auto& g = j.at("atmosphere");
    check_keys(g, "atmosphere", {"coeff_sigma_rad_per_m"});
    c.atmo_coeff_sigma =
        get_or<double>(g, "atmosphere", "coeff_sigma_rad_per_m", 0.0);
    require_nonnegative(c.atmo_coeff_sigma, "atmosphere.coeff_sigma_rad_per_m");
  }
  if (j.contains("orbit")) {
    const auto& g = j.at("orbit");
    check_keys(g, "orbit", {"a0_sigma_rad", "slope_sigma_rad_per_px"});
    c.ramp_a0_sigma = get_or<double>(g, "orbit", "a0_sigma_rad", 0.0);
    c.ramp_slope_sigma = get_or<double>(g, "orbit", "slope_sigma_rad_per_px", 0.0);
    require_nonnegative(c.ramp_a0_sigma, "orbit.a0_sigma_rad");
    require_nonnegative(c.ramp_slope_sigma, "orbit.slope_sigma_rad_per_px");
  }
  if (j.contains("dem_error")) {
    const auto& g = j.at("dem_error");
    check_keys(g, "dem_error", {"sigma_m", "gain_rad_per_m_per_m"});
    c.dem_error_sigma_m = get_or<double>(g, "dem_error", "sigma_m", 0.0);
    c.dem_gain = get_or<double>(g, "dem_error", "gain_rad_per_m_per_m", 0.0);
    require_nonnegative(c.dem_error_sigma_m, "dem_error.sigma_m");
  }
  if (j.contains("noise")) {
    const auto& g = j.at("noise");
    check_keys(g, "noise", {"sigma_rad", "noisy_fraction", "noisy_sigma_rad"});
    c.noise_sigma_rad = get_or<double>(g, "noise", "sigma_rad", 0.0);
    c.noisy_fraction = get_or<double>(g, "noise", "noisy_fraction", 0.0);
    c.noisy_sigma_rad = get_or<double>(g, "noise", "noisy_sigma_rad", 0.0);
    require_nonnegative(c.noise_sigma_rad, "noise.sigma_rad");
    require_nonnegative(c.noisy_sigma_rad, "noise.noisy_sigma_rad");
    if (c.noisy_fraction < 0.0 || c.noisy_fraction > 1.0)
      throw Error(ErrorCode::InvalidConfig, "noise.noisy_fraction in [0,1]");
  }
  if (j.contains("decorrelation")) {
    const auto& g = j.at("decorrelation");
    check_keys(g, "decorrelation", {"fraction"});
    c.decorrelate_fraction = get_or<double>(g, "decorrelation", "fraction", 0.0);
    if (c.decorrelate_fraction < 0.0 || c.decorrelate_fraction > 1.0)
      throw Error(ErrorCode::InvalidConfig, "decorrelation.fraction in [0,1]");
  }
  return c;
}

inline SceneConfig load_scene_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open scene config " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidConfig,
                std::string("scene config parse error: ") + e.what());
  }
  return parse_scene_config(j);
}

/// Everything a pipeline needs from a scene definition.
struct BuiltScene {
  SceneTruth truth;
  AcquisitionCatalog catalog;
  ViewGeometry geometry;
  RadarConstants radar;
};

inline AcquisitionCatalog build_catalog(const SceneConfig& c) {
  if (!c.catalog_file.empty()) return load_catalog(c.catalog_file);
  std::vector<Acquisition> acqs(static_cast<std::size_t>(c.n_epochs));
  Rng rng = Rng::stream(c.seed, 0xCA7A106ULL);
  const SerialDay start = parse_date(c.start_date);
  for (int e = 0; e < c.n_epochs; ++e) {
    acqs[static_cast<std::size_t>(e)].id = e;
    acqs[static_cast<std::size_t>(e)].date =
        start + static_cast<SerialDay>(std::llround(e * c.cadence_days));
    acqs[static_cast<std::size_t>(e)].perp_baseline_m =
        rng.normal(0.0, c.baseline_sigma_m);
  }
  return AcquisitionCatalog(std::move(acqs));
}

inline BuiltScene build_scene(const SceneConfig& c) {
  BuiltScene out;
  out.geometry = ViewGeometry(c.incidence_deg, c.heading_deg);
  out.radar = RadarConstants(c.wavelength_m);
  out.catalog = build_catalog(c);
  const std::size_t n_epochs = out.catalog.size();
  const std::size_t n = static_cast<std::size_t>(c.nx) * c.ny;

  SceneTruth& t = out.truth;
  t.seed = c.seed;
  t.pixels.resize(n);
  t.velocity_mm_yr.assign(n, 0.0);
  t.dem_error_m.assign(n, 0.0);
  t.noise_sigma_rad.assign(n, c.noise_sigma_rad);
  t.seasonal_amp_mm = c.seasonal_amp_mm;
  t.seasonal_period_yr = c.seasonal_period_yr;
  t.seasonal_phase_rad = c.seasonal_phase_rad;
  t.decorrelate_fraction = c.decorrelate_fraction;

  // deterministic sub-streams per scene ingredient
  Rng elev_rng = Rng::stream(c.seed, 0xE1E7ULL);
  Rng epoch_rng = Rng::stream(c.seed, 0x0A73ULL);
  Rng pixel_rng = Rng::stream(c.seed, 0x9D1CULL);

  struct Hill {
    double cx, cy, amp, sigma;
  };
  std::vector<Hill> hills;
  if (c.elevation_kind == "hills") {
    for (int h = 0; h < c.elevation_hills; ++h) {
      Hill hill;
      hill.cx = elev_rng.uniform(0.0, c.nx - 1.0);
      hill.cy = elev_rng.uniform(0.0, c.ny - 1.0);
      hill.amp = elev_rng.uniform(0.25, 1.0) * c.elevation_relief_m;
      hill.sigma = elev_rng.uniform(0.04, 0.22) * std::max(c.nx, c.ny);
      hills.push_back(hill);
    }
  }

  const double lon_step = c.spacing_m / (kMetersPerDegLon *
                                         std::cos(c.lat0 * kDegToRad));
  const double lat_step = c.spacing_m / kMetersPerDegLat;
  for (int yy = 0; yy < c.ny; ++yy) {
    for (int xx = 0; xx < c.nx; ++xx) {
      const std::size_t p = static_cast<std::size_t>(yy) * c.nx + xx;
      Pixel& px = t.pixels[p];
      px.x = xx;
      px.y = yy;
      px.lon = c.lon0 + xx * lon_step;
      px.lat = c.lat0 + yy * lat_step;
      double elev = c.elevation_base_m + c.elevation_slope_m_per_px * (xx + yy);
      if (c.elevation_kind == "hills")
        for (const auto& h : hills) {
          const double dx = xx - h.cx, dy = yy - h.cy;
          elev += h.amp * std::exp(-(dx * dx + dy * dy) / (2 * h.sigma * h.sigma));
        }
      px.elevation_m = elev;

      double v = 0.0;
      for (const auto& f : c.features) {
        const double dx = xx - f.cx_px, dy = yy - f.cy_px;
        const double r = std::hypot(dx, dy);
        if (f.kind == "bowl") {
          if (r < f.radius_px) {
            const double s = std::cos(kPi * r / (2.0 * f.radius_px));
            v += f.peak_mm_yr * s * s;
          }
        } else {  // gaussian peak
          v += f.peak_mm_yr *
               std::exp(-r * r / (2.0 * f.radius_px * f.radius_px));
        }
      }
      t.velocity_mm_yr[p] = v;
      t.dem_error_m[p] =
          c.dem_error_sigma_m > 0.0 ? pixel_rng.normal(0.0, c.dem_error_sigma_m)
                                    : 0.0;
      if (c.noisy_fraction > 0.0 && pixel_rng.uniform() < c.noisy_fraction)
        t.noise_sigma_rad[p] = c.noisy_sigma_rad;
    }
  }
  t.dem_gain = c.dem_gain;

  t.atmo_coeff_per_epoch.assign(n_epochs, 0.0);
  t.ramp_per_epoch.assign(n_epochs, {0.0, 0.0, 0.0});
  for (std::size_t e = 0; e < n_epochs; ++e) {
    if (c.atmo_coeff_sigma > 0.0)
      t.atmo_coeff_per_epoch[e] = epoch_rng.normal(0.0, c.atmo_coeff_sigma);
    if (c.ramp_a0_sigma > 0.0 || c.ramp_slope_sigma > 0.0)
      t.ramp_per_epoch[e] = {epoch_rng.normal(0.0, c.ramp_a0_sigma),
                             epoch_rng.normal(0.0, c.ramp_slope_sigma),
                             epoch_rng.normal(0.0, c.ramp_slope_sigma)};
  }
  return out;
}

}  // namespace mtinsar
