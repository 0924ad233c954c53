#pragma once

#include <algorithm>
#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <utility>
#include <vector>

#include "mtinsar/errors.hpp"

namespace mtinsar {

struct TriPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Undirected triangulation arc. Endpoints satisfy a < b; tri[1] == -1 for
/// hull edges.
struct TriEdge {
  int a = -1;
  int b = -1;
  int tri[2] = {-1, -1};
  double length = 0.0;
};

/// Counterclockwise triangle. edge[k] joins v[k] and v[(k+1)%3]; dir[k] is +1
/// when that traversal runs from the edge's a-endpoint to its b-endpoint.
struct TriFace {
  int v[3] = {-1, -1, -1};
  int edge[3] = {-1, -1, -1};
  int dir[3] = {0, 0, 0};
};

struct TriNetwork {
  std::vector<TriPoint> nodes;
  std::vector<TriEdge> edges;
  std::vector<TriFace> triangles;
};

namespace geom_detail {

using BigRat = boost::multiprecision::cpp_rational;

// Exact sign of orient2d: >0 if (a,b,c) counterclockwise. Double filter with
// a forward-error bound, exact rational arithmetic when inconclusive.
inline int sign_orient2d(const TriPoint& a, const TriPoint& b,
                         const TriPoint& c) {
  const double detleft = (b.x - a.x) * (c.y - a.y);
  const double detright = (b.y - a.y) * (c.x - a.x);
  const double det = detleft - detright;
  const double detsum = std::abs(detleft) + std::abs(detright);
  if (std::abs(det) > 3.3306690738754716e-16 * detsum)
    return det > 0.0 ? 1 : -1;
  if (detsum == 0.0 && det == 0.0) return 0;
  const BigRat ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
  const BigRat d = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  return d.sign();
}

// Exact sign of the incircle determinant: >0 if d lies strictly inside the
// circumcircle of the counterclockwise triangle (a,b,c).
inline int sign_incircle(const TriPoint& a, const TriPoint& b,
                         const TriPoint& c, const TriPoint& d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  const double bxcy = bdx * cdy, bycx = bdy * cdx;
  const double cxay = cdx * ady, cyax = cdy * adx;
  const double axby = adx * bdy, aybx = ady * bdx;
  const double det = alift * (bxcy - bycx) + blift * (cxay - cyax) +
                     clift * (axby - aybx);
  const double permanent = alift * (std::abs(bxcy) + std::abs(bycx)) +
                           blift * (std::abs(cxay) + std::abs(cyax)) +
                           clift * (std::abs(axby) + std::abs(aybx));
  if (std::abs(det) > 1.1102230246251565e-15 * permanent)
    return det > 0.0 ? 1 : -1;
  const BigRat adxr = BigRat(a.x) - BigRat(d.x), adyr = BigRat(a.y) - BigRat(d.y);
  const BigRat bdxr = BigRat(b.x) - BigRat(d.x), bdyr = BigRat(b.y) - BigRat(d.y);
  const BigRat cdxr = BigRat(c.x) - BigRat(d.x), cdyr = BigRat(c.y) - BigRat(d.y);
  const BigRat dr = (adxr * adxr + adyr * adyr) * (bdxr * cdyr - bdyr * cdxr) +
                    (bdxr * bdxr + bdyr * bdyr) * (cdxr * adyr - cdyr * adxr) +
                    (cdxr * cdxr + cdyr * cdyr) * (adxr * bdyr - adyr * bdxr);
  return dr.sign();
}

inline bool lex_less(const TriPoint& p, const TriPoint& q) {
  return p.x < q.x || (p.x == q.x && p.y < q.y);
}

// Incircle with symbolic perturbation: exact cocircular ties are resolved as
// if each point's lifted coordinate were lowered by an infinitesimal that
// grows with its lexicographic (x, then y) rank. The outcome is a unique,
// platform-independent Delaunay triangulation; four concyclic distinct
// points always resolve at the first perturbation order.
inline int sign_incircle_perturbed(const TriPoint& a, const TriPoint& b,
                                   const TriPoint& c, const TriPoint& d) {
  const int s = sign_incircle(a, b, c, d);
  if (s != 0) return s;
  std::array<const TriPoint*, 4> q = {&a, &b, &c, &d};
  int parity = 1;
  for (int i = 0; i < 3; ++i)  // insertion sort, tracking permutation parity
    for (int j = i + 1; j < 4; ++j)
      if (lex_less(*q[j], *q[i])) {
        std::swap(q[i], q[j]);
        parity = -parity;
      }
  // Perturbing row 1 of the lifted determinant dominates; its cofactor is
  // the orientation of the remaining three points, which cannot vanish for
  // distinct concyclic points.
  const int o = sign_orient2d(*q[1], *q[2], *q[3]);
  return -parity * o;
}

}  // namespace geom_detail

namespace delaunay_detail {

// Construction-time triangle: vertices ccw, adj[k] across edge (v[k], v[k+1]).
struct BwTri {
  int v[3];
  int adj[3];
  bool alive = true;
};

class Builder {
 public:
  explicit Builder(const std::vector<TriPoint>& pts) : pts_(pts) {}

  std::vector<std::array<int, 3>> run() {
    const int n = static_cast<int>(pts_.size());
    check_input(n);
    make_super_triangle(n);
    for (int p = 0; p < n; ++p) insert(p);
    std::vector<std::array<int, 3>> tris;
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
      tris.push_back({t.v[0], t.v[1], t.v[2]});
    }
    if (tris.empty())
      throw Error(ErrorCode::DegenerateInput, "no finite triangles produced");
    return tris;
  }

 private:
  void check_input(int n) {
    if (n < 3)
      throw Error(ErrorCode::DegenerateInput, "need at least 3 points");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
      return geom_detail::lex_less(pts_[i], pts_[j]) ||
             (pts_[i].x == pts_[j].x && pts_[i].y == pts_[j].y && i < j);
    });
    for (int k = 1; k < n; ++k)
      if (pts_[order[k]].x == pts_[order[k - 1]].x &&
          pts_[order[k]].y == pts_[order[k - 1]].y)
        throw Error(ErrorCode::DegenerateInput, "duplicate points");
    const TriPoint& p0 = pts_[order.front()];
    const TriPoint& p1 = pts_[order.back()];
    bool non_collinear = false;
    for (int k = 0; k < n && !non_collinear; ++k)
      non_collinear = geom_detail::sign_orient2d(p0, p1, pts_[k]) != 0;
    if (!non_collinear)
      throw Error(ErrorCode::DegenerateInput, "all points collinear");
  }

  void make_super_triangle(int n) {
    double xmin = pts_[0].x, xmax = pts_[0].x;
    double ymin = pts_[0].y, ymax = pts_[0].y;
    for (const auto& p : pts_) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    const double r = std::max({xmax - xmin, ymax - ymin, 1.0});
    // Far enough out that hull-adjacent connectivity is unaffected for any
    // realistic point set; the flip pass afterwards restores exact
    // Delaunay-ness near the hull regardless.
    const double k = 64.0 * r;
    pts_.push_back({cx - 3.0 * k, cy - k});
    pts_.push_back({cx + 3.0 * k, cy - k});
    pts_.push_back({cx, cy + 3.0 * k});
    BwTri t{{n, n + 1, n + 2}, {-1, -1, -1}, true};
    if (geom_detail::sign_orient2d(pts_[n], pts_[n + 1], pts_[n + 2]) < 0)
      std::swap(t.v[1], t.v[2]);
    tris_.push_back(t);
    last_alive_ = 0;
  }

  int locate(int p) const {
    const TriPoint& q = pts_[p];
    int cur = last_alive_;
    const int max_steps = 4 * static_cast<int>(tris_.size()) + 16;
    for (int step = 0; step < max_steps; ++step) {
      const BwTri& t = tris_[cur];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const int u = t.v[k], v = t.v[(k + 1) % 3];
        if (geom_detail::sign_orient2d(pts_[u], pts_[v], q) < 0) {
          next = t.adj[k];
          break;
        }
      }
      if (next < 0) return cur;
      cur = next;
    }
    // walk failed to settle (should not happen); fall back to a full scan
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
      const BwTri& t = tris_[i];
      if (!t.alive) continue;
      bool inside = true;
      for (int k = 0; k < 3 && inside; ++k)
        inside = geom_detail::sign_orient2d(pts_[t.v[k]], pts_[t.v[(k + 1) % 3]],
                                            q) >= 0;
      if (inside) return i;
    }
    throw Error(ErrorCode::Internal, "point location failed");
  }

  void insert(int p) {
    const int seed = locate(p);
    // grow the cavity of triangles whose (perturbed) circumcircle contains p
    std::vector<int> cavity;
    std::vector<char> in_cavity(tris_.size(), 0);
    std::vector<int> stack = {seed};
    in_cavity[seed] = 1;
    while (!stack.empty()) {
      const int ti = stack.back();
      stack.pop_back();
      cavity.push_back(ti);
      for (int k = 0; k < 3; ++k) {
        const int nb = tris_[ti].adj[k];
        if (nb < 0 || in_cavity[nb]) continue;
        const BwTri& t = tris_[nb];
        if (geom_detail::sign_incircle_perturbed(pts_[t.v[0]], pts_[t.v[1]],
                                                 pts_[t.v[2]], pts_[p]) > 0) {
          in_cavity[nb] = 1;
          stack.push_back(nb);
        }
      }
    }
    // boundary of the cavity: directed edges (u,v) whose outside neighbor
    // survives, in ccw order around the cavity triangles
    struct BoundaryEdge {
      int u, v, outside;
    };
    std::vector<BoundaryEdge> boundary;
    for (int ti : cavity) {
      const BwTri& t = tris_[ti];
      for (int k = 0; k < 3; ++k) {
        const int nb = t.adj[k];
        if (nb >= 0 && in_cavity[nb]) continue;
        boundary.push_back({t.v[k], t.v[(k + 1) % 3], nb});
      }
    }
    for (int ti : cavity) tris_[ti].alive = false;

    // star the cavity boundary from p
    std::map<int, int> tri_of_first;  // boundary edge u -> new triangle id
    std::vector<int> created;
    for (const auto& be : boundary) {
      BwTri nt{{be.u, be.v, p}, {be.outside, -1, -1}, true};
      const int id = static_cast<int>(tris_.size());
      tris_.push_back(nt);
      created.push_back(id);
      tri_of_first[be.u] = id;
      if (be.outside >= 0) {
        BwTri& o = tris_[be.outside];
        for (int k = 0; k < 3; ++k)
          if ((o.v[k] == be.v && o.v[(k + 1) % 3] == be.u)) o.adj[k] = id;
      }
    }
    // link consecutive fan triangles: edge (v,p) of (u,v,p) meets edge (p,u')
    // of the next triangle starting at u' == v
    for (int id : created) {
      BwTri& t = tris_[id];
      const auto it = tri_of_first.find(t.v[1]);
      if (it == tri_of_first.end())
        throw Error(ErrorCode::Internal, "open cavity boundary");
      t.adj[1] = it->second;          // edge (v, p)
      tris_[it->second].adj[2] = id;  // edge (p, u') of the successor
    }
    last_alive_ = created.front();
  }

  std::vector<TriPoint> pts_;
  std::vector<BwTri> tris_;
  int last_alive_ = 0;
};

// One Lawson pass over all interior edges; flips every edge whose opposite
// vertex violates the (perturbed) empty-circumcircle test. Returns the number
// of flips performed.
inline int lawson_pass(const std::vector<TriPoint>& pts,
                       std::vector<std::array<int, 3>>& tris) {
  struct Side {
    int tri, corner;  // corner k: edge is (v[k+1], v[k+2]), opposite v[k]
  };
  std::map<std::pair<int, int>, std::vector<Side>> edge_map;
  for (int ti = 0; ti < static_cast<int>(tris.size()); ++ti)
    for (int k = 0; k < 3; ++k) {
      int u = tris[ti][(k + 1) % 3], v = tris[ti][(k + 2) % 3];
      if (u > v) std::swap(u, v);
      edge_map[{u, v}].push_back({ti, k});
    }
  int flips = 0;
  std::vector<char> dirty(tris.size(), 0);
  for (auto& [key, sides] : edge_map) {
    if (sides.size() != 2) continue;
    const auto [t1, k1] = sides[0];
    const auto [t2, k2] = sides[1];
    if (dirty[t1] || dirty[t2]) continue;  // stale adjacency; next pass
    const int c = tris[t1][k1];
    const int d = tris[t2][k2];
    const int a = tris[t1][(k1 + 1) % 3];
    const int b = tris[t1][(k1 + 2) % 3];
    if (geom_detail::sign_incircle_perturbed(pts[a], pts[b], pts[c], pts[d]) <=
        0)
      continue;
    // flip only when the quad (a,c,b,d) is strictly convex
    if (geom_detail::sign_orient2d(pts[d], pts[c], pts[a]) <= 0 ||
        geom_detail::sign_orient2d(pts[c], pts[d], pts[b]) <= 0)
      continue;
    tris[t1] = {c, a, d};
    tris[t2] = {d, b, c};
    dirty[t1] = dirty[t2] = 1;
    ++flips;
  }
  return flips;
}

}  // namespace delaunay_detail

/// Delaunay triangulation of scattered planar points.
///
/// Exact predicates keep the result deterministic for any input, including
/// regular grids where cocircular quads are everywhere; ties are broken by a
/// symbolic perturbation ordered by lexicographic (x, then y) coordinates.
/// Throws DegenerateInput for fewer than 3 points, duplicates, or fully
/// collinear input.
inline TriNetwork triangulate(const std::vector<TriPoint>& points) {
  delaunay_detail::Builder builder(points);
  auto tris = builder.run();

  // restore strict Delaunay-ness among the finite points
  for (int pass = 0; pass < 256; ++pass)
    if (delaunay_detail::lawson_pass(points, tris) == 0) break;

  // canonical form: each triangle rotated to start at its smallest vertex,
  // triangle list sorted, edge list sorted by endpoints
  for (auto& t : tris) {
    int m = 0;
    if (t[1] < t[m]) m = 1;
    if (t[2] < t[m]) m = 2;
    std::rotate(t.begin(), t.begin() + m, t.end());
  }
  std::sort(tris.begin(), tris.end());

  TriNetwork net;
  net.nodes = points;
  net.triangles.resize(tris.size());
  std::map<std::pair<int, int>, int> edge_ids;
  for (std::size_t ti = 0; ti < tris.size(); ++ti) {
    TriFace& f = net.triangles[ti];
    f.v[0] = tris[ti][0];
    f.v[1] = tris[ti][1];
    f.v[2] = tris[ti][2];
    if (geom_detail::sign_orient2d(points[f.v[0]], points[f.v[1]],
                                   points[f.v[2]]) <= 0)
      throw Error(ErrorCode::Internal, "non-ccw triangle after flips");
    for (int k = 0; k < 3; ++k) {
      const int u = f.v[k], v = f.v[(k + 1) % 3];
      const auto key = std::minmax(u, v);
      auto it = edge_ids.find(key);
      if (it == edge_ids.end()) {
        TriEdge e;
        e.a = key.first;
        e.b = key.second;
        e.length = std::hypot(points[e.a].x - points[e.b].x,
                              points[e.a].y - points[e.b].y);
        it = edge_ids.emplace(key, static_cast<int>(net.edges.size())).first;
        net.edges.push_back(e);
      }
      TriEdge& e = net.edges[it->second];
      if (e.tri[0] < 0)
        e.tri[0] = static_cast<int>(ti);
      else if (e.tri[1] < 0)
        e.tri[1] = static_cast<int>(ti);
      else
        throw Error(ErrorCode::Internal, "edge shared by >2 triangles");
      f.edge[k] = it->second;
      f.dir[k] = (u == key.first) ? +1 : -1;
    }
  }

  std::vector<char> seen(points.size(), 0);
  for (const auto& e : net.edges) seen[e.a] = seen[e.b] = 1;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (!seen[i])
      throw Error(ErrorCode::Internal,
                  "node " + std::to_string(i) + " not in any triangle");
  return net;
}

/// Plain-text dump of a triangulation (and optional per-triangle residues)
/// for external visualization.
inline void dump_network(const TriNetwork& net, std::ostream& out,
                         const std::vector<int>* residues = nullptr) {
  out << "MTTRI 1\n";
  out << "nodes " << net.nodes.size() << "\n";
  for (const auto& p : net.nodes) out << p.x << " " << p.y << "\n";
  out << "edges " << net.edges.size() << "\n";
  for (const auto& e : net.edges)
    out << e.a << " " << e.b << " " << e.length << "\n";
  out << "triangles " << net.triangles.size() << "\n";
  for (std::size_t t = 0; t < net.triangles.size(); ++t) {
    const auto& f = net.triangles[t];
    out << f.v[0] << " " << f.v[1] << " " << f.v[2];
    if (residues) out << " " << (*residues)[t];
    out << "\n";
  }
}

}  // namespace mtinsar
