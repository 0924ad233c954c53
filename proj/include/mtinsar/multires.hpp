#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "mtinsar/errors.hpp"
#include "mtinsar/triangulation.hpp"

namespace mtinsar {

/// Additive multiresolution decomposition for signals on scattered pixels.
///
/// A dyadic 2-D wavelet transform needs a regular grid; on a sparse pixel set
/// the same band-splitting effect is obtained by iterated Gaussian-weighted
/// smoothing over the triangulation: band L is the difference between the
/// signal smoothed at scale 2^(L-1) and at scale 2^L. Bands plus the final
/// coarse signal sum to the input exactly (telescoping), which is the
/// contract every user of this decomposition relies on.
class MultiresDecomposer {
 public:
  MultiresDecomposer(const TriNetwork& net, int levels)
      : n_(static_cast<int>(net.nodes.size())), levels_(levels) {
    if (levels_ < 1)
      throw Error(ErrorCode::InvalidArgument, "levels must be >= 1");
    if (n_ < 3)
      throw Error(ErrorCode::InsufficientPixels,
                  "decomposition needs at least 3 pixels");
    // neighbor weights: Gaussian in edge length at the median-edge scale
    std::vector<double> lengths;
    lengths.reserve(net.edges.size());
    for (const auto& e : net.edges) lengths.push_back(e.length);
    std::nth_element(lengths.begin(), lengths.begin() + lengths.size() / 2,
                     lengths.end());
    const double h = std::max(lengths[lengths.size() / 2], 1e-12);

    adj_.resize(n_);
    wgt_.resize(n_);
    for (const auto& e : net.edges) {
      const double w = std::exp(-(e.length * e.length) / (h * h));
      adj_[e.a].push_back(e.b);
      wgt_[e.a].push_back(w);
      adj_[e.b].push_back(e.a);
      wgt_[e.b].push_back(w);
    }
    norm_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      double s = 1.0;  // self weight
      for (double w : wgt_[i]) s += w;
      norm_[i] = 1.0 / s;
    }
  }

  int levels() const { return levels_; }

  /// One smoothing pass (scale ~ median edge length).
  std::vector<double> smooth_once(std::span<const double> x) const {
    std::vector<double> y(n_);
    for (int i = 0; i < n_; ++i) {
      double s = x[static_cast<std::size_t>(i)];
      for (std::size_t k = 0; k < adj_[i].size(); ++k)
        s += wgt_[i][k] * x[static_cast<std::size_t>(adj_[i][k])];
      y[static_cast<std::size_t>(i)] = s * norm_[i];
    }
    return y;
  }

  /// Bands ordered fine to coarse; result.back() is the coarse remainder.
  /// result.size() == levels + 1 and the element-wise sum reproduces x.
  std::vector<std::vector<double>> decompose(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n_)
      throw Error(ErrorCode::DimensionMismatch,
                  "signal length does not match pixel count");
    std::vector<std::vector<double>> bands;
    bands.reserve(static_cast<std::size_t>(levels_) + 1);
    std::vector<double> current(x.begin(), x.end());
    int passes_done = 0;
    for (int level = 1; level <= levels_; ++level) {
      // scale doubles per level: 4^(level-1) cumulative passes
      const int target = 1 << (2 * (level - 1));
      std::vector<double> smoothed = current;
      for (; passes_done < target; ++passes_done)
        smoothed = smooth_once(smoothed);
      std::vector<double> band(n_);
      for (int i = 0; i < n_; ++i)
        band[static_cast<std::size_t>(i)] =
            current[static_cast<std::size_t>(i)] -
            smoothed[static_cast<std::size_t>(i)];
      bands.push_back(std::move(band));
      current = std::move(smoothed);
    }
    bands.push_back(std::move(current));
    return bands;
  }

 private:
  int n_;
  int levels_;
  std::vector<std::vector<int>> adj_;
  std::vector<std::vector<double>> wgt_;
  std::vector<double> norm_;
};

inline std::vector<std::vector<double>> multires_decompose(
    const TriNetwork& net, std::span<const double> signal, int levels) {
  return MultiresDecomposer(net, levels).decompose(signal);
}

}  // namespace mtinsar
