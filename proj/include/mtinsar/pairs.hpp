#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mtinsar/catalog.hpp"
#include "mtinsar/errors.hpp"

namespace mtinsar {

/// Small-baseline interferogram network: ordered index pairs (i < j) plus the
/// selection thresholds they satisfy.
struct PairSet {
  std::vector<std::pair<int, int>> pairs;
  double perp_max_m = 0.0;
  double temp_max_days = 0.0;

  std::size_t size() const { return pairs.size(); }
};

/// All pairs (i, j), i < j, with |Bperp(j)-Bperp(i)| <= perp_max_m and
/// date(j)-date(i) <= temp_max_days (both thresholds inclusive).
/// Output is sorted by (i, j).
inline PairSet select_pairs(const AcquisitionCatalog& catalog,
                            double perp_max_m, double temp_max_days) {
  if (catalog.empty())
    throw Error(ErrorCode::EmptyCatalog, "no acquisitions in catalog");
  if (!(perp_max_m > 0.0) || !(temp_max_days > 0.0))
    throw Error(ErrorCode::InvalidArgument, "thresholds must be > 0");

  PairSet ps;
  ps.perp_max_m = perp_max_m;
  ps.temp_max_days = temp_max_days;
  const int n = static_cast<int>(catalog.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      // dates are strictly increasing, so the temporal window closes for good
      const double dt = static_cast<double>(catalog.date(j) - catalog.date(i));
      if (dt > temp_max_days) break;
      if (std::abs(catalog.baseline(j) - catalog.baseline(i)) <= perp_max_m)
        ps.pairs.emplace_back(i, j);
    }
  }
  return ps;
}

/// Connected components of the acquisition graph induced by the pairs.
/// Components are sorted by their smallest member; members are ascending.
inline std::vector<std::vector<int>> connected_components(const PairSet& ps,
                                                          int n) {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<int> rank(n, 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& [i, j] : ps.pairs) {
    int a = find(i), b = find(j);
    if (a == b) continue;
    if (rank[a] < rank[b]) std::swap(a, b);
    parent[b] = a;
    if (rank[a] == rank[b]) ++rank[a];
  }
  std::vector<std::vector<int>> comps;
  std::vector<int> comp_of(n, -1);
  for (int v = 0; v < n; ++v) {
    const int r = find(v);
    if (comp_of[r] < 0) {
      comp_of[r] = static_cast<int>(comps.size());
      comps.emplace_back();
    }
    comps[comp_of[r]].push_back(v);
  }
  return comps;
}

/// Pair-network design matrix: one row per pair, one column per non-reference
/// acquisition, +1 at j and -1 at i (reference column omitted).
struct DesignMatrix {
  Eigen::MatrixXd m;            // |pairs| x (n-1)
  int ref_index = 0;
  std::vector<int> col_of_acq;  // acquisition -> column, -1 for the reference
};

inline DesignMatrix design_matrix(const PairSet& ps, int n, int ref_index) {
  if (ref_index < 0 || ref_index >= n)
    throw Error(ErrorCode::InvalidArgument, "ref_index out of range");
  const auto comps = connected_components(ps, n);
  if (comps.size() != 1) {
    std::ostringstream msg;
    msg << "pair graph has " << comps.size() << " components:";
    for (const auto& c : comps) {
      msg << " {";
      for (std::size_t k = 0; k < c.size(); ++k)
        msg << (k ? "," : "") << c[k];
      msg << "}";
    }
    throw Error(ErrorCode::DisconnectedNetwork, msg.str());
  }

  DesignMatrix dm;
  dm.ref_index = ref_index;
  dm.col_of_acq.assign(n, -1);
  int col = 0;
  for (int a = 0; a < n; ++a)
    if (a != ref_index) dm.col_of_acq[a] = col++;

  dm.m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ps.size()), n - 1);
  for (Eigen::Index r = 0; r < dm.m.rows(); ++r) {
    const auto& [i, j] = ps.pairs[static_cast<std::size_t>(r)];
    if (dm.col_of_acq[i] >= 0) dm.m(r, dm.col_of_acq[i]) = -1.0;
    if (dm.col_of_acq[j] >= 0) dm.m(r, dm.col_of_acq[j]) = +1.0;
  }
  return dm;
}

}  // namespace mtinsar
