#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "mtinsar/multires.hpp"
#include "mtinsar/phase.hpp"
#include "mtinsar/rng.hpp"
#include "mtinsar/triangulation.hpp"
#include "mtinsar/unwrap.hpp"

using namespace mtinsar;
using Catch::Approx;

namespace {

// Brute-force empty-circumcircle check: no input point may lie strictly
// inside any triangle's circumcircle (exact unperturbed predicate).
bool delaunay_property_holds(const TriNetwork& net) {
  for (const auto& f : net.triangles) {
    const TriPoint& a = net.nodes[static_cast<std::size_t>(f.v[0])];
    const TriPoint& b = net.nodes[static_cast<std::size_t>(f.v[1])];
    const TriPoint& c = net.nodes[static_cast<std::size_t>(f.v[2])];
    for (std::size_t p = 0; p < net.nodes.size(); ++p) {
      if (static_cast<int>(p) == f.v[0] || static_cast<int>(p) == f.v[1] ||
          static_cast<int>(p) == f.v[2])
        continue;
      if (geom_detail::sign_incircle(a, b, c, net.nodes[p]) > 0) return false;
    }
  }
  return true;
}

std::vector<TriPoint> random_points(Rng& rng, int n, double extent = 100.0) {
  std::set<std::pair<double, double>> seen;
  std::vector<TriPoint> pts;
  while (static_cast<int>(pts.size()) < n) {
    const double x = rng.uniform(0.0, extent);
    const double y = rng.uniform(0.0, extent);
    if (seen.insert({x, y}).second) pts.push_back({x, y});
  }
  return pts;
}

// Exhaustive minimum-cost oracle: assign integer corrections edge by edge,
// forcing the last unassigned edge of each triangle from its conservation
// constraint, pruning on partial cost. Enumerates every feasible flow with
// |k_e| <= bound.
struct FlowOracle {
  const TriNetwork& net;
  const std::vector<int>& residues;
  const std::vector<double>& costs;
  int bound;
  std::vector<int> k;
  std::vector<char> assigned;
  double best = std::numeric_limits<double>::infinity();

  FlowOracle(const TriNetwork& n, const std::vector<int>& r,
             const std::vector<double>& c, int b)
      : net(n), residues(r), costs(c), bound(b) {
    k.assign(net.edges.size(), 0);
    assigned.assign(net.edges.size(), 0);
  }

  /// Returns the cheaper of `ceiling` and the true bounded minimum; seeding
  /// the bound keeps the exhaustive search fast without weakening it.
  double solve(double ceiling = std::numeric_limits<double>::infinity()) {
    best = ceiling;
    recurse(0, 0.0);
    return best;
  }

  void recurse(std::size_t tri, double cost) {
    if (cost >= best) return;
    if (tri == net.triangles.size()) {
      best = cost;
      return;
    }
    const TriFace& f = net.triangles[tri];
    std::vector<int> open;
    int balance = residues[tri];
    for (int e = 0; e < 3; ++e) {
      if (assigned[static_cast<std::size_t>(f.edge[e])])
        balance += f.dir[e] * k[static_cast<std::size_t>(f.edge[e])];
      else
        open.push_back(e);
    }
    enumerate(tri, cost, f, open, 0, balance);
  }

  void enumerate(std::size_t tri, double cost, const TriFace& f,
                 const std::vector<int>& open, std::size_t idx, int balance) {
    if (cost >= best) return;
    if (open.empty()) {  // fully constrained: check conservation
      if (balance == 0) recurse(tri + 1, cost);
      return;
    }
    if (idx + 1 == open.size()) {  // last open edge is forced
      const int corner = open[idx];
      const int e = f.edge[corner];
      const int forced = -balance * f.dir[corner];  // dir*k + balance = 0
      if (std::abs(forced) > bound) return;
      k[static_cast<std::size_t>(e)] = forced;
      assigned[static_cast<std::size_t>(e)] = 1;
      recurse(tri + 1,
              cost + costs[static_cast<std::size_t>(e)] * std::abs(forced));
      assigned[static_cast<std::size_t>(e)] = 0;
      return;
    }
    const int corner = open[idx];
    const int e = f.edge[corner];
    for (int mag = 0; mag <= bound; ++mag) {  // cheap values first
      for (int sign = 0; sign < (mag == 0 ? 1 : 2); ++sign) {
        const int val = sign == 0 ? mag : -mag;
        k[static_cast<std::size_t>(e)] = val;
        assigned[static_cast<std::size_t>(e)] = 1;
        enumerate(tri, cost + costs[static_cast<std::size_t>(e)] * std::abs(val),
                  f, open, idx + 1, balance + f.dir[corner] * val);
        assigned[static_cast<std::size_t>(e)] = 0;
      }
    }
  }
};

bool flow_is_feasible(const TriNetwork& net, const std::vector<int>& residues,
                      const std::vector<int>& k) {
  for (std::size_t t = 0; t < net.triangles.size(); ++t) {
    const TriFace& f = net.triangles[t];
    int sum = residues[t];
    for (int e = 0; e < 3; ++e)
      sum += f.dir[e] * k[static_cast<std::size_t>(f.edge[e])];
    if (sum != 0) return false;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// triangulation
// ---------------------------------------------------------------------------

TEST_CASE("triangulate minimal configurations", "[network][triangulation]") {
  SECTION("three points give one triangle") {
    const auto net = triangulate({{0, 0}, {4, 0}, {1, 3}});
    CHECK(net.triangles.size() == 1);
    CHECK(net.edges.size() == 3);
  }
  SECTION("four points in convex position give 2 triangles, 5 edges") {
    const auto net = triangulate({{0, 0}, {10, 1}, {11, 9}, {-1, 8}});
    CHECK(net.triangles.size() == 2);
    CHECK(net.edges.size() == 5);
  }
  SECTION("degenerate inputs are rejected") {
    CHECK_THROWS_AS(triangulate({{0, 0}, {1, 1}}), Error);
    CHECK_THROWS_AS(triangulate({{0, 0}, {1, 1}, {2, 2}, {5, 5}}), Error);
    CHECK_THROWS_AS(triangulate({{0, 0}, {1, 1}, {1, 1}, {3, 0}}), Error);
  }
}

TEST_CASE("triangulation satisfies the empty-circumcircle property",
          "[network][triangulation]") {
  Rng rng(555);
  SECTION("random scattered points") {
    const auto pts = random_points(rng, 50);
    const auto net = triangulate(pts);
    REQUIRE(delaunay_property_holds(net));
  }
  SECTION("regular grid (every quad cocircular)") {
    std::vector<TriPoint> pts;
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) pts.push_back({double(x), double(y)});
    const auto net = triangulate(pts);
    REQUIRE(delaunay_property_holds(net));
    // Euler for a triangulated point set: T = 2n - 2 - h, E = 3n - 3 - h
    const int n = 64, hull = 28;
    CHECK(static_cast<int>(net.triangles.size()) == 2 * n - 2 - hull);
    CHECK(static_cast<int>(net.edges.size()) == 3 * n - 3 - hull);
  }
  SECTION("grid plus jitter") {
    std::vector<TriPoint> pts;
    for (int y = 0; y < 7; ++y)
      for (int x = 0; x < 7; ++x)
        pts.push_back({x + 0.01 * rng.uniform(), y + 0.01 * rng.uniform()});
    REQUIRE(delaunay_property_holds(triangulate(pts)));
  }
}

TEST_CASE("triangulation structure is consistent and deterministic",
          "[network][triangulation]") {
  Rng rng(556);
  const auto pts = random_points(rng, 120);
  const auto net = triangulate(pts);
  const auto net2 = triangulate(pts);

  REQUIRE(net.triangles.size() == net2.triangles.size());
  for (std::size_t t = 0; t < net.triangles.size(); ++t)
    for (int i = 0; i < 3; ++i)
      REQUIRE(net.triangles[t].v[i] == net2.triangles[t].v[i]);

  // every node participates; per-triangle edge directions match vertex order
  std::vector<int> degree(pts.size(), 0);
  for (const auto& e : net.edges) {
    ++degree[static_cast<std::size_t>(e.a)];
    ++degree[static_cast<std::size_t>(e.b)];
    CHECK(e.tri[0] >= 0);
  }
  for (int d : degree) CHECK(d >= 1);
  for (const auto& f : net.triangles)
    for (int k = 0; k < 3; ++k) {
      const TriEdge& e = net.edges[static_cast<std::size_t>(f.edge[k])];
      const int u = f.v[k], v = f.v[(k + 1) % 3];
      if (f.dir[k] > 0) {
        CHECK(e.a == u);
        CHECK(e.b == v);
      } else {
        CHECK(e.a == v);
        CHECK(e.b == u);
      }
    }
}

// ---------------------------------------------------------------------------
// residues
// ---------------------------------------------------------------------------

TEST_CASE("residues of smooth fields vanish", "[network][unwrap]") {
  Rng rng(557);
  const auto pts = random_points(rng, 80, 50.0);
  const auto net = triangulate(pts);

  SECTION("constant phase") {
    std::vector<double> phase(pts.size(), 0.7);
    for (int r : compute_residues(net, phase)) CHECK(r == 0);
  }
  SECTION("gentle plane, all wrapped gradients below pi") {
    std::vector<double> phase(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
      phase[i] = wrap(0.02 * pts[i].x - 0.015 * pts[i].y + 1.0);
    for (int r : compute_residues(net, phase)) CHECK(r == 0);
  }
}

TEST_CASE("hand-built triangle carries a +1 residue", "[network][unwrap]") {
  const auto net = triangulate({{0, 0}, {4, 0}, {2, 3}});
  REQUIRE(net.triangles.size() == 1);
  const TriFace& f = net.triangles[0];
  // phases 0, 2pi/3, 4pi/3 along the ccw vertex order force one full cycle:
  // each wrapped gradient is +2pi/3
  std::vector<double> phase(3);
  phase[static_cast<std::size_t>(f.v[0])] = 0.0;
  phase[static_cast<std::size_t>(f.v[1])] = wrap(2.0 * kPi / 3.0);
  phase[static_cast<std::size_t>(f.v[2])] = wrap(4.0 * kPi / 3.0);
  const auto residues = compute_residues(net, phase);
  CHECK(residues[0] == 1);
}

// ---------------------------------------------------------------------------
// minimum cost flow
// ---------------------------------------------------------------------------

TEST_CASE("solve_mcf trivial cases", "[network][unwrap]") {
  const auto net = triangulate({{0, 0}, {4, 0}, {2, 3}, {6, 3}});
  REQUIRE(net.triangles.size() == 2);
  const std::vector<double> unit(net.edges.size(), 1.0);

  SECTION("zero residues give zero flow") {
    const auto sol = solve_mcf(net, {0, 0}, unit);
    CHECK(sol.objective == 0.0);
    for (int k : sol.k) CHECK(k == 0);
  }
  SECTION("adjacent dipole routes through the shared edge") {
    const auto sol = solve_mcf(net, {1, -1}, unit);
    CHECK(sol.objective == Approx(1.0));
    int nonzero = 0;
    for (int k : sol.k) nonzero += (k != 0);
    CHECK(nonzero == 1);
    REQUIRE(flow_is_feasible(net, {1, -1}, sol.k));
  }
  SECTION("costs must be positive") {
    std::vector<double> bad(net.edges.size(), 1.0);
    bad[0] = 0.0;
    CHECK_THROWS_AS(solve_mcf(net, {0, 0}, bad), Error);
  }
}

TEST_CASE("solve_mcf equals exhaustive enumeration on small networks",
          "[network][unwrap][mcf-oracle]") {
  Rng rng(558);
  int instances = 0;
  while (instances < 150) {
    const int n = 5 + rng.uniform_int(0, 3);
    const auto pts = random_points(rng, n, 10.0);
    TriNetwork net;
    try {
      net = triangulate(pts);
    } catch (const Error&) {
      continue;
    }
    if (net.triangles.size() > 8) continue;

    // random wrapped field produces a consistent residue configuration
    std::vector<double> phase(pts.size());
    for (auto& p : phase) p = rng.uniform(-kPi, kPi);
    const auto residues = compute_residues(net, phase);

    std::vector<double> costs(net.edges.size());
    const bool unit_costs = rng.uniform() < 0.5;
    for (auto& c : costs) c = unit_costs ? 1.0 : rng.uniform(0.2, 3.0);

    const auto sol = solve_mcf(net, residues, costs);
    REQUIRE(flow_is_feasible(net, residues, sol.k));
    int kmax = 2;
    for (int k : sol.k) kmax = std::max(kmax, std::abs(k));
    // the solver's flow is feasible, so its objective is an upper bound on
    // the bounded minimum; the exhaustive search must fail to beat it
    FlowOracle oracle(net, residues, costs, kmax);
    const double best = oracle.solve(sol.objective + 1e-7);
    REQUIRE(best >= sol.objective - 1e-9);
    ++instances;
  }
}

TEST_CASE("scaling all costs leaves the argmin flow unchanged",
          "[network][unwrap]") {
  Rng rng(559);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = random_points(rng, 12, 20.0);
    const auto net = triangulate(pts);
    std::vector<double> phase(pts.size());
    for (auto& p : phase) p = rng.uniform(-kPi, kPi);
    const auto residues = compute_residues(net, phase);
    std::vector<double> costs(net.edges.size());
    for (auto& c : costs) c = rng.uniform(0.25, 4.0);
    std::vector<double> scaled = costs;
    for (auto& c : scaled) c *= 8.0;  // exact scaling in floating point
    const auto a = solve_mcf(net, residues, costs);
    const auto b = solve_mcf(net, residues, scaled);
    REQUIRE(a.k == b.k);
  }
}

// ---------------------------------------------------------------------------
// integration / full unwrap
// ---------------------------------------------------------------------------

TEST_CASE("integrate_unwrapped recovers residue-free fields exactly",
          "[network][unwrap]") {
  Rng rng(560);
  const auto pts = random_points(rng, 150, 80.0);
  const auto net = triangulate(pts);

  SECTION("zero phase stays zero") {
    std::vector<double> zero(pts.size(), 0.0);
    const auto unw = unwrap_interferogram(net, zero);
    for (double v : unw) CHECK(v == 0.0);
  }
  SECTION("plane with several fringes, gradients below pi") {
    // ~3 fringes over 80 units; adjacent wrapped steps stay below pi
    std::vector<double> truth(pts.size()), wrapped(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      truth[i] = 0.24 * pts[i].x + 0.05 * pts[i].y;
      wrapped[i] = wrap(truth[i]);
    }
    const auto unw = unwrap_interferogram(net, wrapped);
    const double shift = unw[0] - truth[0];
    CHECK(std::remainder(shift, kTwoPi) == Approx(0.0).margin(1e-9));
    for (std::size_t i = 0; i < pts.size(); ++i)
      REQUIRE(unw[i] - truth[i] == Approx(shift).margin(1e-9));
  }
}

TEST_CASE("unwrap invariants on noisy wrapped fields", "[network][unwrap]") {
  Rng rng(561);
  const auto pts = random_points(rng, 100, 40.0);
  const auto net = triangulate(pts);
  std::vector<double> wrapped(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    wrapped[i] = wrap(0.15 * pts[i].x - 0.1 * pts[i].y + rng.normal(0.0, 0.8));

  const auto residues = compute_residues(net, wrapped);
  const auto costs = edge_costs(net, EdgeCostModel::inverse_length);
  const auto flow = solve_mcf(net, residues, costs);
  const auto unw = integrate_unwrapped(net, wrapped, flow, 0);

  SECTION("re-wrapping reproduces the input field") {
    for (std::size_t i = 0; i < pts.size(); ++i)
      REQUIRE(wrap(unw[i] - wrapped[i]) == Approx(0.0).margin(1e-9));
  }
  SECTION("corrected gradients close around every triangle") {
    const auto grad = wrapped_gradients(net, wrapped);
    for (const auto& f : net.triangles) {
      double sum = 0.0;
      for (int e = 0; e < 3; ++e)
        sum += f.dir[e] * (grad[static_cast<std::size_t>(f.edge[e])] +
                           kTwoPi * flow.k[static_cast<std::size_t>(f.edge[e])]);
      REQUIRE(sum == Approx(0.0).margin(1e-9));
    }
  }
  SECTION("reference node keeps its wrapped value") {
    CHECK(unw[0] == wrapped[0]);
  }
}

// ---------------------------------------------------------------------------
// multiresolution decomposition
// ---------------------------------------------------------------------------

TEST_CASE("multires bands of a constant are zero", "[network][multires]") {
  Rng rng(562);
  const auto pts = random_points(rng, 60, 30.0);
  const auto net = triangulate(pts);
  std::vector<double> sig(pts.size(), 3.25);
  const auto bands = multires_decompose(net, sig, 3);
  REQUIRE(bands.size() == 4);
  for (std::size_t b = 0; b + 1 < bands.size(); ++b)
    for (double v : bands[b]) CHECK(v == Approx(0.0).margin(1e-12));
  for (double v : bands.back()) CHECK(v == Approx(3.25).margin(1e-12));
}

TEST_CASE("multires reconstruction is exact", "[network][multires]") {
  Rng rng(563);
  const auto pts = random_points(rng, 120, 60.0);
  const auto net = triangulate(pts);
  std::vector<double> sig(pts.size());
  for (auto& v : sig) v = rng.uniform(-5.0, 5.0);
  const auto bands = multires_decompose(net, sig, 4);
  for (std::size_t i = 0; i < sig.size(); ++i) {
    double sum = 0.0;
    for (const auto& band : bands) sum += band[i];
    REQUIRE(sum == Approx(sig[i]).margin(1e-10));
  }
}

TEST_CASE("long-wavelength plane stays in the coarsest band",
          "[network][multires]") {
  Rng rng(564);
  std::vector<TriPoint> pts;
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 40; ++x)
      pts.push_back({x + 0.2 * rng.uniform(), y + 0.2 * rng.uniform()});
  const auto net = triangulate(pts);
  std::vector<double> sig(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    sig[i] = 2.0 + 0.2 * pts[i].x + 0.1 * pts[i].y;
  const auto bands = multires_decompose(net, sig, 4);
  double total = 0.0, coarse = 0.0;
  for (double v : sig) total += v * v;
  for (double v : bands.back()) coarse += v * v;
  CHECK(coarse / total > 0.95);
}

TEST_CASE("multires argument validation", "[network][multires]") {
  const auto net = triangulate({{0, 0}, {4, 0}, {2, 3}});
  std::vector<double> sig(3, 1.0);
  CHECK_THROWS_AS(multires_decompose(net, sig, 0), Error);
  std::vector<double> bad(5, 1.0);
  CHECK_THROWS_AS(multires_decompose(net, bad, 2), Error);
}
