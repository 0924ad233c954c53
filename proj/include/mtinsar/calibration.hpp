#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mtinsar/errors.hpp"
#include "mtinsar/geometry.hpp"
#include "mtinsar/inversion.hpp"
#include "mtinsar/robust.hpp"

namespace mtinsar {

struct GnssTie {
  std::string station_id;
  double lon = 0.0, lat = 0.0;
  double vertical_rate_mm_yr = 0.0;
  double sigma_mm_yr = 1.0;
};

/// One-line record: `station,lon,lat,vertical_rate_mm_yr,sigma_mm_yr`.
inline GnssTie parse_gnss_tie(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    GnssTie t;
    std::string field;
    if (!std::getline(ss, t.station_id, ',')) break;
    try {
      if (!std::getline(ss, field, ',')) break;
      t.lon = std::stod(field);
      if (!std::getline(ss, field, ',')) break;
      t.lat = std::stod(field);
      if (!std::getline(ss, field, ',')) break;
      t.vertical_rate_mm_yr = std::stod(field);
      if (!std::getline(ss, field)) break;
      t.sigma_mm_yr = std::stod(field);
    } catch (const std::exception&) {
      break;
    }
    if (!(t.sigma_mm_yr > 0.0))
      throw Error(ErrorCode::InvalidArgument, "GNSS sigma must be > 0");
    return t;
  }
  throw Error(ErrorCode::InvalidArgument,
              "GNSS tie record must be station,lon,lat,rate,sigma");
}

inline GnssTie load_gnss_tie(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open GNSS tie " + path);
  return parse_gnss_tie(in);
}

/// Regular lon/lat grid of vertical rates (mm/yr), ascending in both axes.
struct GiaGrid {
  int ncols = 0, nrows = 0;
  double lon0 = 0.0, lat0 = 0.0;
  double dlon = 0.0, dlat = 0.0;
  std::vector<double> values;  // row-major, row = latitude index

  double at(int col, int row) const {
    return values[static_cast<std::size_t>(row) * ncols + col];
  }

  /// Bilinear interpolation; exact at grid nodes.
  double interpolate(double lon, double lat) const {
    const double fx = (lon - lon0) / dlon;
    const double fy = (lat - lat0) / dlat;
    if (fx < 0.0 || fy < 0.0 || fx > ncols - 1 || fy > nrows - 1)
      throw Error(ErrorCode::PixelOutsideGrid,
                  "point (" + std::to_string(lon) + ", " + std::to_string(lat) +
                      ") outside GIA grid");
    int c0 = static_cast<int>(std::floor(fx));
    int r0 = static_cast<int>(std::floor(fy));
    c0 = std::min(c0, ncols - 2 >= 0 ? ncols - 2 : 0);
    r0 = std::min(r0, nrows - 2 >= 0 ? nrows - 2 : 0);
    const double ax = fx - c0, ay = fy - r0;
    if (ncols == 1 || nrows == 1) {
      // degenerate single row/column: nearest along the flat axis
      const int c = std::min(static_cast<int>(std::llround(fx)), ncols - 1);
      const int r = std::min(static_cast<int>(std::llround(fy)), nrows - 1);
      return at(c, r);
    }
    return (1 - ax) * (1 - ay) * at(c0, r0) + ax * (1 - ay) * at(c0 + 1, r0) +
           (1 - ax) * ay * at(c0, r0 + 1) + ax * ay * at(c0 + 1, r0 + 1);
  }
};

// GIA grid file: header line `MTGIA 1`, then
// `ncols nrows lon0 lat0 dlon dlat`, then nrows lines of ncols values
// (first line is the lat0 row).
inline GiaGrid parse_gia_grid(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "MTGIA" || version != 1)
    throw Error(ErrorCode::IoFailure, "bad GIA grid header");
  GiaGrid g;
  if (!(in >> g.ncols >> g.nrows >> g.lon0 >> g.lat0 >> g.dlon >> g.dlat))
    throw Error(ErrorCode::IoFailure, "bad GIA grid dimensions");
  if (g.ncols < 1 || g.nrows < 1 || !(g.dlon > 0.0) || !(g.dlat > 0.0))
    throw Error(ErrorCode::IoFailure, "GIA grid must be ascending and non-empty");
  g.values.resize(static_cast<std::size_t>(g.ncols) * g.nrows);
  for (auto& v : g.values)
    if (!(in >> v)) throw Error(ErrorCode::IoFailure, "truncated GIA grid");
  return g;
}

inline GiaGrid load_gia_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open GIA grid " + path);
  return parse_gia_grid(in);
}

inline void write_gia_grid(const GiaGrid& g, std::ostream& out) {
  out << "MTGIA 1\n"
      << g.ncols << " " << g.nrows << " " << g.lon0 << " " << g.lat0 << " "
      << g.dlon << " " << g.dlat << "\n";
  for (int r = 0; r < g.nrows; ++r) {
    for (int c = 0; c < g.ncols; ++c) out << (c ? " " : "") << g.at(c, r);
    out << "\n";
  }
}

/// Planar distance in meters between two lon/lat points (equirectangular,
/// adequate at scene scale).
inline double ground_distance_m(double lon1, double lat1, double lon2,
                                double lat2) {
  const double dx = (lon2 - lon1) * kMetersPerDegLon *
                    std::cos(0.5 * (lat1 + lat2) * kDegToRad);
  const double dy = (lat2 - lat1) * kMetersPerDegLat;
  return std::hypot(dx, dy);
}

struct CalibrationResult {
  double offset_mm_yr = 0.0;   // constant added to every LOS rate
  double target_los_mm_yr = 0.0;
  int n_pixels_used = 0;
};

/// Tie the LOS velocity field to a GNSS vertical rate: shift every pixel by
/// one constant so the mean LOS rate within `radius_m` of the station equals
/// the station's projected rate. Pairwise differences are untouched.
inline CalibrationResult calibrate_to_gnss(DisplacementProduct& product,
                                           const GnssTie& tie,
                                           const ViewGeometry& geom,
                                           double radius_m = 200.0) {
  CalibrationResult res;
  res.target_los_mm_yr = project_vertical_to_los(tie.vertical_rate_mm_yr, geom);
  double sum = 0.0;
  int count = 0;
  for (const auto& sol : product.solutions) {
    if (!sol.ok) continue;
    if (ground_distance_m(sol.lon, sol.lat, tie.lon, tie.lat) <= radius_m) {
      sum += sol.rate_mm_yr;
      ++count;
    }
  }
  if (count == 0)
    throw Error(ErrorCode::NoPixelsNearStation,
                "no product pixels within " + std::to_string(radius_m) +
                    " m of station " + tie.station_id);
  res.n_pixels_used = count;
  res.offset_mm_yr = res.target_los_mm_yr - sum / count;
  for (auto& sol : product.solutions) sol.rate_mm_yr += res.offset_mm_yr;
  return res;
}

/// Subtract the projected GIA rate at every pixel. Standard deviations are
/// untouched: the model is treated as exact.
inline void subtract_gia(DisplacementProduct& product, const GiaGrid& grid,
                         const ViewGeometry& geom) {
  for (auto& sol : product.solutions) {
    const double v_up = grid.interpolate(sol.lon, sol.lat);
    sol.rate_mm_yr -= project_vertical_to_los(v_up, geom);
  }
}

struct FieldStats {
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<std::pair<double, double>> cdf;  // (value, fraction <= value)
};

/// Order statistics of the rate field. Median uses the lower-of-two
/// convention for even counts. The CDF ends at exactly 1.
inline FieldStats field_stats(const DisplacementProduct& product) {
  std::vector<double> rates;
  for (const auto& sol : product.solutions)
    if (sol.ok) rates.push_back(sol.rate_mm_yr);
  if (rates.empty())
    throw Error(ErrorCode::EmptyProduct, "no valid pixels in product");
  std::sort(rates.begin(), rates.end());
  FieldStats st;
  st.min = rates.front();
  st.max = rates.back();
  st.median = rates[(rates.size() - 1) / 2];
  st.cdf.reserve(rates.size());
  const double n = static_cast<double>(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i)
    st.cdf.emplace_back(rates[i], static_cast<double>(i + 1) / n);
  return st;
}

}  // namespace mtinsar
