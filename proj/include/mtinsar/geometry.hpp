#pragma once

#include <array>
#include <cmath>

#include "mtinsar/errors.hpp"
#include "mtinsar/phase.hpp"

namespace mtinsar {

inline constexpr double kDegToRad = kPi / 180.0;

// meters per degree near mid latitudes (spherical approximation); used for
// lon/lat <-> ground-distance conversions at scene scale
inline constexpr double kMetersPerDegLat = 110574.0;
inline constexpr double kMetersPerDegLon = 111320.0;

// Sentinel-1 C-band carrier wavelength in meters. The stacks processed here
// are C-band; other sensors can override it through RadarConstants.
inline constexpr double kDefaultWavelengthM = 0.0554658;

/// Scene viewing geometry. Incidence is measured from vertical, heading is
/// the platform track direction clockwise from north.
struct ViewGeometry {
  double incidence_deg = 38.9;
  double heading_deg = 347.0;

  ViewGeometry() = default;
  ViewGeometry(double incidence, double heading)
      : incidence_deg(incidence), heading_deg(heading) {
    if (!(incidence_deg >= 0.0 && incidence_deg < 90.0))
      throw Error(ErrorCode::InvalidArgument,
                  "incidence_deg must be in [0, 90)");
    if (!(heading_deg >= 0.0 && heading_deg < 360.0))
      throw Error(ErrorCode::InvalidArgument,
                  "heading_deg must be in [0, 360)");
  }
};

struct RadarConstants {
  double wavelength_m = kDefaultWavelengthM;

  RadarConstants() = default;
  explicit RadarConstants(double wavelength) : wavelength_m(wavelength) {
    if (!(wavelength_m > 0.0))
      throw Error(ErrorCode::InvalidArgument, "wavelength_m must be > 0");
  }
};

/// Unit vector from ground toward the sensor, (east, north, up) components.
/// The horizontal part points opposite the radar look direction, which is
/// 90 degrees right of the heading for a right-looking system.
inline std::array<double, 3> los_unit_vector(const ViewGeometry& geom) {
  const double inc = geom.incidence_deg * kDegToRad;
  const double look_az = (geom.heading_deg + 90.0) * kDegToRad;  // clockwise from north
  const double s = std::sin(inc);
  return {-s * std::sin(look_az), -s * std::cos(look_az), std::cos(inc)};
}

/// Project a vertical rate onto the line of sight: v_up * cos(incidence).
inline double project_vertical_to_los(double v_up, const ViewGeometry& geom) {
  return v_up * std::cos(geom.incidence_deg * kDegToRad);
}

/// Convert interferometric phase (radians) to LOS displacement (cm).
/// Positive displacement means motion toward the sensor, so subsidence in a
/// typical scene shows up negative.
inline double phase_to_displacement_cm(double phi, const RadarConstants& c) {
  return -phi * c.wavelength_m / (4.0 * kPi) * 100.0;
}

/// Inverse of phase_to_displacement_cm; used when synthesizing stacks.
inline double displacement_cm_to_phase(double d_cm, const RadarConstants& c) {
  return -d_cm / 100.0 * (4.0 * kPi) / c.wavelength_m;
}

}  // namespace mtinsar
