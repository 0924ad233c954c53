#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "mtinsar/errors.hpp"
#include "mtinsar/pairs.hpp"
#include "mtinsar/phase.hpp"

namespace mtinsar {

/// One measurement point. x/y are planar pixel coordinates (triangulation and
/// ramp fitting run in this frame); lon/lat georeference the point; elevation
/// drives the topography-correlated atmosphere term.
struct Pixel {
  double x = 0.0;
  double y = 0.0;
  double lon = 0.0;
  double lat = 0.0;
  double elevation_m = 0.0;
};

/// Per-pair phase over a sparse pixel set. phase(k, p) is pair k at pixel p.
/// weights are per-pair-per-pixel quality values in (0, 1].
struct InterferogramStack {
  PairSet pairs;
  std::vector<Pixel> pixels;
  Eigen::MatrixXd phase;    // pairs x pixels
  Eigen::MatrixXd weights;  // pairs x pixels
  bool wrapped = true;
  std::vector<std::uint8_t> selection;  // optional elite mask, empty or one per pixel

  Eigen::Index n_pairs() const { return phase.rows(); }
  Eigen::Index n_pixels() const { return phase.cols(); }

  void check_consistent() const {
    const auto np = static_cast<Eigen::Index>(pairs.size());
    const auto nx = static_cast<Eigen::Index>(pixels.size());
    if (phase.rows() != np || phase.cols() != nx || weights.rows() != np ||
        weights.cols() != nx)
      throw Error(ErrorCode::DimensionMismatch,
                  "stack phase/weights shape does not match pairs x pixels");
    if (!selection.empty() && selection.size() != pixels.size())
      throw Error(ErrorCode::DimensionMismatch,
                  "selection mask length does not match pixel count");
  }

  /// New stack restricted to the given pixel columns (order preserved).
  InterferogramStack subset_pixels(const std::vector<int>& keep) const {
    InterferogramStack out;
    out.pairs = pairs;
    out.wrapped = wrapped;
    out.pixels.reserve(keep.size());
    out.phase.resize(phase.rows(), static_cast<Eigen::Index>(keep.size()));
    out.weights.resize(weights.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
      out.pixels.push_back(pixels[static_cast<std::size_t>(keep[c])]);
      out.phase.col(static_cast<Eigen::Index>(c)) = phase.col(keep[c]);
      out.weights.col(static_cast<Eigen::Index>(c)) = weights.col(keep[c]);
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Binary stack file, little-endian, layout "MTSTK001" (see docs/formats.md):
//   magic[8], u32 n_pairs, u32 n_pixels, u8 wrapped, u8 has_selection,
//   f64 perp_max_m, f64 temp_max_days,
//   n_pairs x (i32 i, i32 j),
//   n_pixels x (f64 x, y, lon, lat, elevation_m),
//   phase  f64 row-major (pairs x pixels),
//   weights f64 row-major,
//   [selection u8 per pixel]
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr char kStackMagic[8] = {'M', 'T', 'S', 'T', 'K', '0', '0', '1'};

template <class T>
void put(std::ostream& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& in) {
  char buf[sizeof(T)];
  in.read(buf, sizeof(T));
  if (!in) throw Error(ErrorCode::IoFailure, "truncated stack file");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace detail

inline void save_stack(const InterferogramStack& s, const std::string& path) {
  s.check_consistent();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write stack " + path);
  out.write(detail::kStackMagic, 8);
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(s.pairs.size()));
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(s.pixels.size()));
  detail::put<std::uint8_t>(out, s.wrapped ? 1 : 0);
  detail::put<std::uint8_t>(out, s.selection.empty() ? 0 : 1);
  detail::put<double>(out, s.pairs.perp_max_m);
  detail::put<double>(out, s.pairs.temp_max_days);
  for (const auto& [i, j] : s.pairs.pairs) {
    detail::put<std::int32_t>(out, i);
    detail::put<std::int32_t>(out, j);
  }
  for (const auto& p : s.pixels) {
    detail::put<double>(out, p.x);
    detail::put<double>(out, p.y);
    detail::put<double>(out, p.lon);
    detail::put<double>(out, p.lat);
    detail::put<double>(out, p.elevation_m);
  }
  for (Eigen::Index r = 0; r < s.phase.rows(); ++r)
    for (Eigen::Index c = 0; c < s.phase.cols(); ++c)
      detail::put<double>(out, s.phase(r, c));
  for (Eigen::Index r = 0; r < s.weights.rows(); ++r)
    for (Eigen::Index c = 0; c < s.weights.cols(); ++c)
      detail::put<double>(out, s.weights(r, c));
  for (std::uint8_t b : s.selection) detail::put<std::uint8_t>(out, b);
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path);
}

inline InterferogramStack load_stack(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open stack " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, detail::kStackMagic, 8) != 0)
    throw Error(ErrorCode::IoFailure, "bad stack magic in " + path);
  InterferogramStack s;
  const auto n_pairs = detail::get<std::uint32_t>(in);
  const auto n_pixels = detail::get<std::uint32_t>(in);
  s.wrapped = detail::get<std::uint8_t>(in) != 0;
  const bool has_selection = detail::get<std::uint8_t>(in) != 0;
  s.pairs.perp_max_m = detail::get<double>(in);
  s.pairs.temp_max_days = detail::get<double>(in);
  s.pairs.pairs.reserve(n_pairs);
  for (std::uint32_t k = 0; k < n_pairs; ++k) {
    const int i = detail::get<std::int32_t>(in);
    const int j = detail::get<std::int32_t>(in);
    s.pairs.pairs.emplace_back(i, j);
  }
  s.pixels.resize(n_pixels);
  for (auto& p : s.pixels) {
    p.x = detail::get<double>(in);
    p.y = detail::get<double>(in);
    p.lon = detail::get<double>(in);
    p.lat = detail::get<double>(in);
    p.elevation_m = detail::get<double>(in);
  }
  s.phase.resize(n_pairs, n_pixels);
  for (Eigen::Index r = 0; r < s.phase.rows(); ++r)
    for (Eigen::Index c = 0; c < s.phase.cols(); ++c)
      s.phase(r, c) = detail::get<double>(in);
  s.weights.resize(n_pairs, n_pixels);
  for (Eigen::Index r = 0; r < s.weights.rows(); ++r)
    for (Eigen::Index c = 0; c < s.weights.cols(); ++c)
      s.weights(r, c) = detail::get<double>(in);
  if (has_selection) {
    s.selection.resize(n_pixels);
    for (auto& b : s.selection) b = detail::get<std::uint8_t>(in);
  }
  s.check_consistent();
  return s;
}

}  // namespace mtinsar
