#include "lpl/min_cost_flow.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace lpl {

namespace {
constexpr std::int64_t kInf64 = std::numeric_limits<std::int64_t>::max() / 4;
}

std::vector<int> solve_assignment(const std::vector<std::int64_t>& cost, int n,
                                  __int128* total_cost) {
  require(n >= 1 && static_cast<int>(cost.size()) == n * n, "solve_assignment: bad cost matrix");
  std::vector<std::int64_t> v(n, kInf64);
  std::vector<int> row_of(n, -1);  // column -> row
  std::vector<int> col_of(n, -1);  // row -> column

  // column reduction: price each column at its cheapest row, assign when free
  for (int j = n - 1; j >= 0; --j) {
    int imin = 0;
    for (int i = 1; i < n; ++i)
      if (cost[i * n + j] < cost[imin * n + j]) imin = i;
    v[j] = cost[imin * n + j];
    if (col_of[imin] == -1) {
      col_of[imin] = j;
      row_of[j] = imin;
    }
  }

  std::vector<std::int64_t> d(n);
  std::vector<int> pred(n);
  std::vector<char> scanned(n);
  std::vector<int> scan_order;
  scan_order.reserve(n);

  for (int f = 0; f < n; ++f) {
    if (col_of[f] != -1) continue;
    // shortest augmenting path from free row f over reduced costs c - v
    for (int j = 0; j < n; ++j) {
      d[j] = cost[f * n + j] - v[j];
      pred[j] = f;
      scanned[j] = 0;
    }
    scan_order.clear();
    int endpoint = -1;
    std::int64_t mu = 0;
    for (;;) {
      int jmin = -1;
      std::int64_t dmin = kInf64;
      for (int j = 0; j < n; ++j)
        if (!scanned[j] && d[j] < dmin) {
          dmin = d[j];
          jmin = j;
        }
      if (jmin == -1) throw std::logic_error("solve_assignment: no augmenting path");
      scanned[jmin] = 1;
      scan_order.push_back(jmin);
      if (row_of[jmin] == -1) {
        endpoint = jmin;
        mu = dmin;
        break;
      }
      const int i = row_of[jmin];
      const std::int64_t h = cost[i * n + jmin] - v[jmin];
      for (int j = 0; j < n; ++j) {
        if (scanned[j]) continue;
        const std::int64_t nd = dmin + (cost[i * n + j] - v[j]) - h;
        if (nd < d[j]) {
          d[j] = nd;
          pred[j] = i;
        }
      }
    }
    for (int j : scan_order)
      if (j != endpoint) v[j] += d[j] - mu;
    // walk predecessors back to the free row, flipping the matching
    int j = endpoint;
    for (;;) {
      const int i = pred[j];
      row_of[j] = i;
      std::swap(col_of[i], j);
      if (i == f) break;
    }
  }

  __int128 total = 0;
  for (int i = 0; i < n; ++i) total += cost[i * n + col_of[i]];
  if (total_cost) *total_cost = total;

  // optimality certificate: u_i + v_j <= c_ij everywhere, tight on matches
  std::vector<std::int64_t> u(n);
  for (int i = 0; i < n; ++i) u[i] = cost[i * n + col_of[i]] - v[col_of[i]];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (cost[i * n + j] - u[i] - v[j] < 0)
        throw std::logic_error("solve_assignment: optimality certificate failed");
  return col_of;
}

__int128 solve_transport(const std::vector<std::int64_t>& cost,
                         const std::vector<std::int64_t>& supplies,
                         const std::vector<std::int64_t>& demands,
                         std::vector<std::vector<std::int64_t>>* flow_out) {
  const int na = static_cast<int>(supplies.size());
  const int nb = static_cast<int>(demands.size());
  require(static_cast<int>(cost.size()) == na * nb, "solve_transport: bad cost matrix");
  std::int64_t total_supply = 0, total_demand = 0;
  for (auto s : supplies) {
    require(s >= 0, "solve_transport: negative supply");
    total_supply += s;
  }
  for (auto t : demands) {
    require(t >= 0, "solve_transport: negative demand");
    total_demand += t;
  }
  require(total_supply == total_demand, "solve_transport: supply/demand imbalance");

  std::vector<std::int64_t> rem_s = supplies, rem_d = demands;
  std::vector<std::vector<std::int64_t>> flow(na, std::vector<std::int64_t>(nb, 0));
  std::vector<std::int64_t> pot(na + nb, 0);  // node potentials

  const int nn = na + nb;
  std::vector<std::int64_t> dist(nn);
  std::vector<int> pred(nn);
  std::vector<char> done(nn);

  std::int64_t remaining = total_supply;
  while (remaining > 0) {
    // multi-source Dijkstra on the residual network (dense arcs)
    for (int v = 0; v < nn; ++v) {
      dist[v] = kInf64;
      pred[v] = -1;
      done[v] = 0;
    }
    for (int i = 0; i < na; ++i)
      if (rem_s[i] > 0) dist[i] = 0;
    int sink = -1;
    for (;;) {
      int u = -1;
      std::int64_t du = kInf64;
      for (int v = 0; v < nn; ++v)
        if (!done[v] && dist[v] < du) {
          du = dist[v];
          u = v;
        }
      if (u == -1) break;
      done[u] = 1;
      if (u >= na && rem_d[u - na] > 0) {
        sink = u;
        break;
      }
      if (u < na) {
        const int i = u;
        for (int j = 0; j < nb; ++j) {
          const std::int64_t rc = cost[i * nb + j] + pot[i] - pot[na + j];
          if (rc < 0) throw std::logic_error("solve_transport: negative reduced cost");
          if (du + rc < dist[na + j]) {
            dist[na + j] = du + rc;
            pred[na + j] = i;
          }
        }
      } else {
        const int j = u - na;
        for (int i = 0; i < na; ++i) {
          if (flow[i][j] <= 0) continue;
          const std::int64_t rc = -cost[i * nb + j] + pot[na + j] - pot[i];
          if (rc < 0) throw std::logic_error("solve_transport: negative reduced cost");
          if (du + rc < dist[i]) {
            dist[i] = du + rc;
            pred[i] = u;
          }
        }
      }
    }
    if (sink == -1) throw std::logic_error("solve_transport: disconnected instance");

    // bottleneck along the path
    std::int64_t push = rem_d[sink - na];
    for (int v = sink; pred[v] != -1; v = pred[v]) {
      const int p = pred[v];
      if (p < na && v >= na) {
        // forward arc, infinite capacity
      } else {
        push = std::min(push, flow[v][p - na]);
      }
    }
    int origin = sink;
    while (pred[origin] != -1) origin = pred[origin];
    push = std::min(push, rem_s[origin]);

    for (int v = sink; pred[v] != -1; v = pred[v]) {
      const int p = pred[v];
      if (p < na && v >= na)
        flow[p][v - na] += push;
      else
        flow[v][p - na] -= push;
    }
    rem_s[origin] -= push;
    rem_d[sink - na] -= push;
    remaining -= push;

    const std::int64_t dsink = dist[sink];
    for (int v = 0; v < nn; ++v) pot[v] += std::min(dist[v], dsink);
  }

  __int128 total = 0;
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) total += static_cast<__int128>(flow[i][j]) * cost[i * nb + j];

  // complementary slackness on the final potentials
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      const std::int64_t rc = cost[i * nb + j] + pot[i] - pot[na + j];
      if (rc < 0 || (flow[i][j] > 0 && rc != 0))
        throw std::logic_error("solve_transport: optimality certificate failed");
    }
  if (flow_out) *flow_out = std::move(flow);
  return total;
}

}  // namespace lpl
