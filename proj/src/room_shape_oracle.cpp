// Brute-force reference for the room shape search. Deliberately shares
// nothing with room_shape.cpp except edge_cost.

#include "floorplan/error.hpp"
#include "floorplan/room_shape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace floorplan {

namespace {

bool inside(const DensityGrid& m, int u, int v) { return m.contains({u, v}) && m.at({u, v}) >= 0.5; }

bool is_edge_cell(const DensityGrid& m, int u, int v) {
  const bool here = inside(m, u, v);
  const int du[4] = {1, -1, 0, 0};
  const int dv[4] = {0, 0, 1, -1};
  for (int k = 0; k < 4; ++k) {
    const int nu = u + du[k];
    const int nv = v + dv[k];
    if (m.contains({nu, nv}) && inside(m, nu, nv) != here) return true;
  }
  return false;
}

Cell brute_anchor(const DensityGrid& m) {
  const int cols = m.cols();
  const int rows = m.rows();
  Cell best{-1, -1};
  long best_d = -1;
  for (int u = 0; u < cols; ++u) {
    for (int v = 0; v < rows; ++v) {
      if (!inside(m, u, v)) continue;
      long d = std::min({u + 1, cols - u, v + 1, rows - v});
      d *= d;
      for (int u2 = 0; u2 < cols; ++u2) {
        for (int v2 = 0; v2 < rows; ++v2) {
          if (inside(m, u2, v2)) continue;
          d = std::min<long>(d, static_cast<long>(u2 - u) * (u2 - u) + static_cast<long>(v2 - v) * (v2 - v));
        }
      }
      if (d > best_d) {
        best_d = d;
        best = {u, v};
      }
    }
  }
  return best;
}

// Sign-exact test: does the closed segment pq meet {(x, a.v) : x >= a.u}?
bool crosses_cut(Cell p, Cell q, Cell a) {
  const long py = p.v - a.v, qy = q.v - a.v;
  const long px = p.u - a.u, qx = q.u - a.u;
  if (py == 0 && qy == 0) return px >= 0 || qx >= 0;
  if (py * qy > 0) return false;
  // x-intercept relative to the anchor: (px*qy - qx*py) / (qy - py)
  const long num = px * qy - qx * py;
  const long den = qy - py;
  return den > 0 ? num >= 0 : num <= 0;
}

struct Dist {
  double cost = std::numeric_limits<double>::infinity();
  int edges = 0;
};

bool less(const Dist& a, const Dist& b) { return a.cost < b.cost || (a.cost == b.cost && a.edges < b.edges); }

}  // namespace

CycleSolution oracle_shortest_cycle(const ShapeMaps& maps, std::span<const double> orientations,
                                    const SpaWeights& weights) {
  const DensityGrid& m = maps.mask;
  if (m.cols() > 24 || m.rows() > 24) throw InputError("oracle is limited to grids of at most 24 x 24");
  const Cell a = brute_anchor(m);
  if (a.u < 0) throw NoRoomError("room mask is empty");

  std::vector<Cell> seam, free;
  for (int v = 0; v < m.rows(); ++v) {
    for (int u = 0; u < m.cols(); ++u) {
      bool near = false;
      for (int dv = -2; dv <= 2 && !near; ++dv) {
        for (int du = -2; du <= 2 && !near; ++du) {
          near = m.contains({u + du, v + dv}) && is_edge_cell(m, u + du, v + dv);
        }
      }
      if (!near) continue;
      if (v == a.v && u > a.u) {
        seam.push_back({u, v});
      } else if (!(v == a.v && u == a.u)) {
        free.push_back({u, v});
      }
    }
  }

  const std::size_t n = free.size();
  std::vector<Dist> d(n * n);
  std::vector<int> next(n * n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    d[i * n + i] = {0.0, 0};
    next[i * n + i] = static_cast<int>(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || crosses_cut(free[i], free[j], a)) continue;
      d[i * n + j] = {edge_cost(free[i], free[j], maps, orientations, weights), 1};
      next[i * n + j] = static_cast<int>(j);
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const Dist& ik = d[i * n + k];
      if (!std::isfinite(ik.cost)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const Dist& kj = d[k * n + j];
        const Dist via{ik.cost + kj.cost, ik.edges + kj.edges};
        if (less(via, d[i * n + j])) {
          d[i * n + j] = via;
          next[i * n + j] = next[i * n + k];
        }
      }
    }
  }

  CycleSolution best;
  Dist best_d;
  for (const Cell& x : seam) {
    std::vector<Dist> out(n), in(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (free[i].v > a.v) out[i] = {edge_cost(x, free[i], maps, orientations, weights), 1};
      if (free[i].v < a.v) in[i] = {edge_cost(free[i], x, maps, orientations, weights), 1};
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(out[i].cost)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(in[j].cost) || !std::isfinite(d[i * n + j].cost)) continue;
        const Dist total{out[i].cost + d[i * n + j].cost + in[j].cost, out[i].edges + d[i * n + j].edges + in[j].edges};
        if (!best.found || less(total, best_d)) {
          best_d = total;
          best.found = true;
          best.cost = total.cost;
          best.edges = total.edges;
          best.corners = {x};
          for (std::size_t k = i; k != j; k = static_cast<std::size_t>(next[k * n + j])) best.corners.push_back(free[k]);
          best.corners.push_back(free[j]);
        }
      }
    }
  }
  return best;
}

}  // namespace floorplan
