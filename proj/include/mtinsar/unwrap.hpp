#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "mtinsar/errors.hpp"
#include "mtinsar/phase.hpp"
#include "mtinsar/triangulation.hpp"

namespace mtinsar {

enum class EdgeCostModel { inverse_length, unit };

inline std::vector<double> edge_costs(const TriNetwork& net,
                                      EdgeCostModel model) {
  std::vector<double> c(net.edges.size(), 1.0);
  if (model == EdgeCostModel::inverse_length)
    for (std::size_t e = 0; e < net.edges.size(); ++e)
      c[e] = 1.0 / net.edges[e].length;
  return c;
}

/// Wrapped phase gradient of every edge in its canonical a->b direction.
/// Residues and integration must share these values so that the corrected
/// gradients close exactly around every triangle.
inline std::vector<double> wrapped_gradients(const TriNetwork& net,
                                             std::span<const double> phase) {
  std::vector<double> g(net.edges.size());
  for (std::size_t e = 0; e < net.edges.size(); ++e)
    g[e] = wrap(phase[static_cast<std::size_t>(net.edges[e].b)] -
                phase[static_cast<std::size_t>(net.edges[e].a)]);
  return g;
}

/// Integer residue of each triangle: the number of 2*pi cycles the wrapped
/// gradients accumulate around it (counterclockwise).
inline std::vector<int> compute_residues(const TriNetwork& net,
                                         std::span<const double> phase) {
  const auto grad = wrapped_gradients(net, phase);
  std::vector<int> residues(net.triangles.size());
  for (std::size_t t = 0; t < net.triangles.size(); ++t) {
    const TriFace& f = net.triangles[t];
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) sum += f.dir[k] * grad[f.edge[k]];
    residues[t] = static_cast<int>(std::llround(sum / kTwoPi));
  }
  return residues;
}

/// Integer cycle corrections per edge (in the canonical a->b direction) and
/// the total cost they incur.
struct FlowSolution {
  std::vector<int> k;  // one per edge
  double objective = 0.0;
};

namespace mcf_detail {

struct Arc {
  int to;
  std::int64_t cap;
  double cost;
  int rev;  // index of the paired reverse arc in graph[to]
};

class Graph {
 public:
  explicit Graph(int n) : adj_(n) {}

  int add_arc(int u, int v, std::int64_t cap, double cost) {
    adj_[u].push_back({v, cap, cost, static_cast<int>(adj_[v].size())});
    adj_[v].push_back({u, 0, -cost, static_cast<int>(adj_[u].size()) - 1});
    return static_cast<int>(adj_[u].size()) - 1;
  }

  std::vector<Arc>& at(int u) { return adj_[u]; }
  const std::vector<Arc>& at(int u) const { return adj_[u]; }
  int size() const { return static_cast<int>(adj_.size()); }

 private:
  std::vector<std::vector<Arc>> adj_;
};

}  // namespace mcf_detail

/// Minimum-cost integer flow resolving the residue field.
///
/// The problem is solved on the dual graph: one node per triangle plus a
/// ground node for the outer face, one bidirectional arc per triangulation
/// edge. Conservation at every triangle forces the corrected wrapped
/// gradients to close; successive shortest paths with Johnson potentials
/// give an optimal integer flow. Deterministic: arc order and tie-breaking
/// are fixed by construction.
inline FlowSolution solve_mcf(const TriNetwork& net,
                              const std::vector<int>& residues,
                              const std::vector<double>& costs) {
  if (residues.size() != net.triangles.size() ||
      costs.size() != net.edges.size())
    throw Error(ErrorCode::DimensionMismatch,
                "residues/costs size does not match network");
  for (double c : costs)
    if (!(c > 0.0))
      throw Error(ErrorCode::InvalidArgument, "edge costs must be > 0");

  const int n_tri = static_cast<int>(net.triangles.size());
  const int ground = n_tri;
  mcf_detail::Graph g(n_tri + 1);
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

  // arc bookkeeping: for edge e, k_e = flow(left->right) - flow(right->left)
  struct EdgeArcs {
    int fwd_node, fwd_idx, bwd_node, bwd_idx;
  };
  std::vector<EdgeArcs> arcs(net.edges.size());
  std::vector<int> left_of(net.edges.size(), ground),
      right_of(net.edges.size(), ground);
  for (int t = 0; t < n_tri; ++t) {
    const TriFace& f = net.triangles[t];
    for (int k = 0; k < 3; ++k)
      (f.dir[k] > 0 ? left_of[f.edge[k]] : right_of[f.edge[k]]) = t;
  }
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const int u = left_of[e], v = right_of[e];
    arcs[e].fwd_node = u;
    arcs[e].fwd_idx = g.add_arc(u, v, kInf, costs[e]);
    arcs[e].bwd_node = v;
    arcs[e].bwd_idx = g.add_arc(v, u, kInf, costs[e]);
  }

  std::vector<std::int64_t> imbalance(n_tri + 1, 0);
  std::int64_t total = 0;
  for (int t = 0; t < n_tri; ++t) {
    imbalance[t] = -residues[t];
    total += residues[t];
  }
  imbalance[ground] = total;

  const int n = g.size();
  std::vector<double> potential(n, 0.0);
  std::vector<double> dist(n);
  std::vector<int> prev_node(n), prev_arc(n);

  for (int source = 0; source < n; ++source) {
    while (imbalance[source] > 0) {
      // Dijkstra over residual arcs with reduced costs
      std::fill(dist.begin(), dist.end(),
                std::numeric_limits<double>::infinity());
      std::fill(prev_node.begin(), prev_node.end(), -1);
      using Item = std::pair<double, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      dist[source] = 0.0;
      pq.push({0.0, source});
      std::vector<char> done(n, 0);
      while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        if (done[u]) continue;
        done[u] = 1;
        for (int i = 0; i < static_cast<int>(g.at(u).size()); ++i) {
          const auto& a = g.at(u)[i];
          if (a.cap <= 0 || done[a.to]) continue;
          // reduced costs are nonnegative up to rounding; clamp the jitter
          // so settled labels stay final and prev pointers stay acyclic
          const double rc =
              std::max(0.0, a.cost + potential[u] - potential[a.to]);
          const double nd = d + rc;
          if (nd < dist[a.to]) {
            dist[a.to] = nd;
            prev_node[a.to] = u;
            prev_arc[a.to] = i;
            pq.push({nd, a.to});
          }
        }
      }
      int sink = -1;
      for (int v = 0; v < n; ++v)
        if (imbalance[v] < 0 && done[v] &&
            (sink < 0 || dist[v] < dist[sink]))
          sink = v;
      if (sink < 0)
        throw Error(ErrorCode::InfeasibleNetwork,
                    "no path from excess to deficit node");
      for (int v = 0; v < n; ++v)
        if (done[v]) potential[v] += std::min(dist[v], dist[sink]);

      std::int64_t delta = std::min(imbalance[source], -imbalance[sink]);
      for (int v = sink; v != source; v = prev_node[v])
        delta = std::min(delta, g.at(prev_node[v])[prev_arc[v]].cap);
      for (int v = sink; v != source; v = prev_node[v]) {
        auto& a = g.at(prev_node[v])[prev_arc[v]];
        a.cap -= delta;
        g.at(a.to)[a.rev].cap += delta;
      }
      imbalance[source] -= delta;
      imbalance[sink] += delta;
    }
  }

  FlowSolution sol;
  sol.k.resize(net.edges.size());
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const auto& ea = arcs[e];
    const auto& fwd = g.at(ea.fwd_node)[ea.fwd_idx];
    const auto& bwd = g.at(ea.bwd_node)[ea.bwd_idx];
    const std::int64_t f_fwd = g.at(fwd.to)[fwd.rev].cap;  // pushed forward
    const std::int64_t f_bwd = g.at(bwd.to)[bwd.rev].cap;
    sol.k[e] = static_cast<int>(f_fwd - f_bwd);
    sol.objective += costs[e] * std::abs(sol.k[e]);
  }
  return sol;
}

/// Unwrap node phases given the flow corrections. unwrapped(ref) equals
/// wrapped(ref) exactly; every edge difference equals the corrected wrapped
/// gradient, so the result is path independent for feasible flows.
inline std::vector<double> integrate_unwrapped(const TriNetwork& net,
                                               std::span<const double> phase,
                                               const FlowSolution& flow,
                                               int ref_node) {
  const int n = static_cast<int>(net.nodes.size());
  if (ref_node < 0 || ref_node >= n)
    throw Error(ErrorCode::InvalidArgument, "ref_node out of range");
  const auto grad = wrapped_gradients(net, phase);

  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, edge)
  for (int e = 0; e < static_cast<int>(net.edges.size()); ++e) {
    adj[net.edges[e].a].emplace_back(net.edges[e].b, e);
    adj[net.edges[e].b].emplace_back(net.edges[e].a, e);
  }

  std::vector<double> unwrapped(n, 0.0);
  std::vector<char> visited(n, 0);
  std::queue<int> bfs;
  unwrapped[ref_node] = phase[static_cast<std::size_t>(ref_node)];
  visited[ref_node] = 1;
  bfs.push(ref_node);
  while (!bfs.empty()) {
    const int u = bfs.front();
    bfs.pop();
    for (const auto& [v, e] : adj[u]) {
      if (visited[v]) continue;
      const double step = grad[e] + kTwoPi * flow.k[e];
      unwrapped[v] = unwrapped[u] + (net.edges[e].a == u ? step : -step);
      visited[v] = 1;
      bfs.push(v);
    }
  }
  for (int v = 0; v < n; ++v)
    if (!visited[v])
      throw Error(ErrorCode::Internal, "triangulation is not connected");
  return unwrapped;
}

struct UnwrapOptions {
  EdgeCostModel cost_model = EdgeCostModel::inverse_length;
  int ref_node = 0;
};

struct UnwrapReportEntry {
  int pair_index = 0;
  int n_residues = 0;  // count of nonzero triangle residues
  double objective = 0.0;
};

/// Unwrap one interferogram (phase given per triangulation node).
inline std::vector<double> unwrap_interferogram(const TriNetwork& net,
                                                std::span<const double> phase,
                                                const UnwrapOptions& opt = {}) {
  const auto residues = compute_residues(net, phase);
  const auto costs = edge_costs(net, opt.cost_model);
  const auto flow = solve_mcf(net, residues, costs);
  return integrate_unwrapped(net, phase, flow, opt.ref_node);
}

}  // namespace mtinsar
