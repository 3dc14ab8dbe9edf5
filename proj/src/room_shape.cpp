#include "floorplan/room_shape.hpp"

#include "floorplan/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <tuple>

namespace floorplan {

void SpaWeights::validate() const {
  if (orientation < 0 || plane < 0 || mask < 0) throw InputError("spa.lambdas must be nonnegative");
  if (!(complexity > 0)) throw InputError("spa.lambdas.complex must be positive");
}

IspaSchedule IspaSchedule::standard(std::vector<int> grid_sizes, int max_edge_length, int neighborhood_radius) {
  IspaSchedule s;
  for (std::size_t i = 0; i < grid_sizes.size(); ++i) {
    IspaRound r;
    r.grid_size = grid_sizes[i];
    if (i == 0) r.max_edge_length = max_edge_length;
    r.neighborhood_radius = neighborhood_radius;
    s.rounds.push_back(r);
  }
  return s;
}

void IspaSchedule::validate() const {
  if (rounds.empty()) throw InputError("spa.rounds must not be empty");
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    if (rounds[i].grid_size < 8) throw InputError("spa grid sizes must be at least 8");
    if (rounds[i].max_edge_length && *rounds[i].max_edge_length < 1) throw InputError("spa.max_edge_len must be >= 1");
    if (i > 0 && rounds[i].max_edge_length) throw InputError("only the first iSPA round may limit edge length");
    if (rounds[i].neighborhood_radius < 1) throw InputError("spa.neighborhood_radius must be >= 1");
  }
}

// -----------------------------------------------------------------------------
// Evidence maps
// -----------------------------------------------------------------------------

namespace {

GridSpec window_spec(const MapWindow& window, int grid_size) {
  GridSpec spec;
  spec.origin = window.origin;
  spec.cell_size = window.side / grid_size;
  spec.cols = grid_size;
  spec.rows = grid_size;
  return spec;
}

DensityGrid threshold_mask(const RoomEvidence& evidence) {
  DensityGrid m(evidence.density.spec());
  auto src = evidence.density.values();
  auto dst = m.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] >= evidence.threshold ? 1.0 : 0.0;
  return m;
}

}  // namespace

DensityGrid largest_component(const DensityGrid& binary) {
  DensityGrid out(binary.spec());
  const int cols = binary.cols();
  const int rows = binary.rows();
  std::vector<int> label(static_cast<std::size_t>(cols) * rows, -1);
  int best_label = -1;
  std::size_t best_size = 0;
  int next = 0;
  std::vector<Cell> stack;
  for (int v = 0; v < rows; ++v) {
    for (int u = 0; u < cols; ++u) {
      const std::size_t idx = static_cast<std::size_t>(v) * cols + u;
      if (binary.at({u, v}) < 0.5 || label[idx] >= 0) continue;
      std::size_t size = 0;
      label[idx] = next;
      stack.push_back({u, v});
      while (!stack.empty()) {
        const Cell c = stack.back();
        stack.pop_back();
        ++size;
        const Cell nbrs[4] = {{c.u + 1, c.v}, {c.u - 1, c.v}, {c.u, c.v + 1}, {c.u, c.v - 1}};
        for (const Cell& n : nbrs) {
          if (!binary.contains(n) || binary.at(n) < 0.5) continue;
          const std::size_t ni = static_cast<std::size_t>(n.v) * cols + n.u;
          if (label[ni] >= 0) continue;
          label[ni] = next;
          stack.push_back(n);
        }
      }
      if (size > best_size) {
        best_size = size;
        best_label = next;
      }
      ++next;
    }
  }
  if (best_label < 0) return out;
  for (int v = 0; v < rows; ++v) {
    for (int u = 0; u < cols; ++u) {
      if (label[static_cast<std::size_t>(v) * cols + u] == best_label) out.at({u, v}) = 1.0;
    }
  }
  return out;
}

MapWindow evidence_window(const RoomEvidence& evidence, double margin_fraction) {
  if (evidence.density.empty()) throw NoRoomError("room has no density map");
  const DensityGrid mask = largest_component(threshold_mask(evidence));
  bool any = false;
  Bounds2 box;
  for (int v = 0; v < mask.rows(); ++v) {
    for (int u = 0; u < mask.cols(); ++u) {
      if (mask.at({u, v}) < 0.5) continue;
      const Vec2 lo = mask.origin() + mask.cell_size() * Vec2(u, v);
      const Vec2 hi = lo + Vec2::Constant(mask.cell_size());
      if (!any) {
        box = {lo, hi};
        any = true;
      } else {
        box.min = box.min.cwiseMin(lo);
        box.max = box.max.cwiseMax(hi);
      }
    }
  }
  if (!any) throw NoRoomError("room mask is empty");
  const Vec2 extent = box.max - box.min;
  const double side = extent.maxCoeff() * (1.0 + 2.0 * margin_fraction);
  const Vec2 center = 0.5 * (box.min + box.max);
  return {center - Vec2::Constant(0.5 * side), side};
}

ShapeMaps build_maps(const RoomEvidence& evidence, const MapWindow& window, int grid_size) {
  const GridSpec spec = window_spec(window, grid_size);
  ShapeMaps maps{DensityGrid(spec), DensityGrid(spec)};
  DensityGrid raw(spec);
  for (int v = 0; v < grid_size; ++v) {
    for (int u = 0; u < grid_size; ++u) {
      const Vec2 c = raw.cell_center({u, v});
      const double h = evidence.density.value_or(evidence.density.cell_of(c), 0.0);
      raw.at({u, v}) = h >= evidence.threshold ? 1.0 : 0.0;
    }
  }
  // Drop the outer ring: a wall lies in the last row of cells whose centers
  // are inside, and those cells must not be charged as room interior.
  DensityGrid eroded(spec);
  for (int v = 1; v + 1 < grid_size; ++v) {
    for (int u = 1; u + 1 < grid_size; ++u) {
      eroded.at({u, v}) = std::min({raw.at({u, v}), raw.at({u - 1, v}), raw.at({u + 1, v}), raw.at({u, v - 1}),
                                    raw.at({u, v + 1})});
    }
  }
  maps.mask = largest_component(eroded);

  for (const auto& p : evidence.wall_points) {
    const Cell c = maps.plane.cell_of(p);
    if (maps.plane.contains(c)) maps.plane.at(c) += 1.0;
  }
  std::vector<double> nonzero;
  for (double v : maps.plane.values()) {
    if (v > 0) nonzero.push_back(v);
  }
  if (!nonzero.empty()) {
    const std::size_t k = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(nonzero.size()))) - 1;
    std::nth_element(nonzero.begin(), nonzero.begin() + static_cast<long>(k), nonzero.end());
    const double p95 = nonzero[k];
    for (double& v : maps.plane.values()) v = std::min(1.0, v / p95);
  }
  // Widen each wall by one cell along the axes: a digital segment between
  // rounded corners can sit half a cell off a slanted wall.
  DensityGrid widened(spec);
  for (int v = 0; v < grid_size; ++v) {
    for (int u = 0; u < grid_size; ++u) {
      widened.at({u, v}) = std::max({maps.plane.at({u, v}), maps.plane.value_or({u - 1, v}, 0.0),
                                     maps.plane.value_or({u + 1, v}, 0.0), maps.plane.value_or({u, v - 1}, 0.0),
                                     maps.plane.value_or({u, v + 1}, 0.0)});
    }
  }
  maps.plane = std::move(widened);
  return maps;
}

ShapeMaps resample_maps(const ShapeMaps& maps, int grid_size) {
  if (grid_size == maps.size()) return maps;
  GridSpec spec = maps.mask.spec();
  const double side = spec.cell_size * spec.cols;
  spec.cell_size = side / grid_size;
  spec.cols = grid_size;
  spec.rows = grid_size;
  ShapeMaps out{DensityGrid(spec), DensityGrid(spec)};
  DensityGrid raw(spec);
  for (int v = 0; v < grid_size; ++v) {
    for (int u = 0; u < grid_size; ++u) {
      const Vec2 c = raw.cell_center({u, v});
      raw.at({u, v}) = maps.mask.value_or(maps.mask.cell_of(c), 0.0);
      out.plane.at({u, v}) = maps.plane.value_or(maps.plane.cell_of(c), 0.0);
    }
  }
  out.mask = largest_component(raw);
  return out;
}

// -----------------------------------------------------------------------------
// Edge costs
// -----------------------------------------------------------------------------

std::vector<Cell> rasterize_segment(Cell p, Cell q) {
  std::vector<Cell> out;
  const int du = std::abs(q.u - p.u);
  const int dv = std::abs(q.v - p.v);
  const int su = q.u > p.u ? 1 : -1;
  const int sv = q.v > p.v ? 1 : -1;
  out.reserve(static_cast<std::size_t>(std::max(du, dv)));
  int u = p.u;
  int v = p.v;
  int err = du - dv;
  while (u != q.u || v != q.v) {
    const int e2 = 2 * err;
    if (e2 > -dv) {
      err -= dv;
      u += su;
    }
    if (e2 < du) {
      err += du;
      v += sv;
    }
    out.push_back({u, v});
  }
  return out;
}

double orientation_cost(Cell p, Cell q, std::span<const double> orientations) {
  if (orientations.empty()) return 0.0;
  const double dir = std::atan2(static_cast<double>(q.v - p.v), static_cast<double>(q.u - p.u));
  double best = kPi / 2;
  for (double normal : orientations) {
    const double wall = normal + kPi / 2;
    best = std::min(best, std::abs(wrap_half_turn(dir - wall)));
  }
  return best;
}

double edge_cost(Cell p, Cell q, const ShapeMaps& maps, std::span<const double> orientations,
                 const SpaWeights& weights) {
  double plane = 0.0;
  double mask = 0.0;
  // Inline midpoint walk: same cell sequence as rasterize_segment.
  const int du = std::abs(q.u - p.u);
  const int dv = std::abs(q.v - p.v);
  const int su = q.u > p.u ? 1 : -1;
  const int sv = q.v > p.v ? 1 : -1;
  int u = p.u;
  int v = p.v;
  int err = du - dv;
  while (u != q.u || v != q.v) {
    const int e2 = 2 * err;
    if (e2 > -dv) {
      err -= dv;
      u += su;
    }
    if (e2 < du) {
      err += du;
      v += sv;
    }
    plane += 1.0 - maps.plane.at({u, v});
    mask += maps.mask.at({u, v});
  }
  return weights.orientation * orientation_cost(p, q, orientations) + weights.plane * plane + weights.mask * mask +
         weights.complexity;
}

double cycle_cost(std::span<const Cell> corners, const ShapeMaps& maps, std::span<const double> orientations,
                  const SpaWeights& weights) {
  double total = 0.0;
  for (std::size_t i = 0; i < corners.size(); ++i) {
    total += edge_cost(corners[i], corners[(i + 1) % corners.size()], maps, orientations, weights);
  }
  return total;
}

// -----------------------------------------------------------------------------
// Graph construction
// -----------------------------------------------------------------------------

std::vector<Cell> mask_boundary(const DensityGrid& mask) {
  std::vector<Cell> out;
  for (int v = 0; v < mask.rows(); ++v) {
    for (int u = 0; u < mask.cols(); ++u) {
      const bool in = mask.at({u, v}) >= 0.5;
      const Cell nbrs[4] = {{u + 1, v}, {u - 1, v}, {u, v + 1}, {u, v - 1}};
      for (const Cell& n : nbrs) {
        if (mask.contains(n) && (mask.at(n) >= 0.5) != in) {
          out.push_back({u, v});
          break;
        }
      }
    }
  }
  return out;
}

std::vector<Cell> boundary_band(const DensityGrid& mask, int width) {
  std::vector<char> in_band(static_cast<std::size_t>(mask.cols()) * mask.rows(), 0);
  for (const Cell& b : mask_boundary(mask)) {
    for (int dv = -width; dv <= width; ++dv) {
      for (int du = -width; du <= width; ++du) {
        const Cell c{b.u + du, b.v + dv};
        if (mask.contains(c)) in_band[static_cast<std::size_t>(c.v) * mask.cols() + c.u] = 1;
      }
    }
  }
  std::vector<Cell> out;
  for (int v = 0; v < mask.rows(); ++v) {
    for (int u = 0; u < mask.cols(); ++u) {
      if (in_band[static_cast<std::size_t>(v) * mask.cols() + u]) out.push_back({u, v});
    }
  }
  return out;
}

Cell containment_anchor(const DensityGrid& mask) {
  // Exact squared Euclidean distance transform (two-pass, Felzenszwalb-Huttenlocher).
  const int cols = mask.cols();
  const int rows = mask.rows();
  constexpr double kInf = 1e20;
  auto edt_1d = [](const std::vector<double>& f, std::vector<double>& d) {
    const int n = static_cast<int>(f.size());
    std::vector<int> vtx(n);
    std::vector<double> z(n + 1);
    int k = 0;
    vtx[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
      double s;
      while (true) {
        const int p = vtx[k];
        s = ((f[q] + q * static_cast<double>(q)) - (f[p] + p * static_cast<double>(p))) / (2.0 * q - 2.0 * p);
        if (s <= z[k] && k > 0) {
          --k;
          continue;
        }
        break;
      }
      if (s <= z[k]) {
        // k == 0 and the parabola at vtx[0] is dominated everywhere.
        vtx[0] = q;
        z[0] = -kInf;
        z[1] = kInf;
        continue;
      }
      ++k;
      vtx[k] = q;
      z[k] = s;
      z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
      while (z[k + 1] < q) ++k;
      const double diff = q - vtx[k];
      d[q] = diff * diff + f[vtx[k]];
    }
  };
  // Pad by one cell of "outside" so the grid border counts as boundary.
  const int pc = cols + 2;
  const int pr = rows + 2;
  std::vector<double> grid(static_cast<std::size_t>(pc) * pr, 0.0);
  for (int v = 0; v < rows; ++v) {
    for (int u = 0; u < cols; ++u) {
      grid[static_cast<std::size_t>(v + 1) * pc + u + 1] = mask.at({u, v}) >= 0.5 ? kInf : 0.0;
    }
  }
  std::vector<double> f, d;
  f.resize(pr);
  d.resize(pr);
  for (int u = 0; u < pc; ++u) {
    for (int v = 0; v < pr; ++v) f[v] = grid[static_cast<std::size_t>(v) * pc + u];
    edt_1d(f, d);
    for (int v = 0; v < pr; ++v) grid[static_cast<std::size_t>(v) * pc + u] = d[v];
  }
  f.resize(pc);
  d.resize(pc);
  for (int v = 0; v < pr; ++v) {
    for (int u = 0; u < pc; ++u) f[u] = grid[static_cast<std::size_t>(v) * pc + u];
    edt_1d(f, d);
    for (int u = 0; u < pc; ++u) grid[static_cast<std::size_t>(v) * pc + u] = d[u];
  }
  Cell best{-1, -1};
  double best_d = -1.0;
  for (int u = 0; u < cols; ++u) {
    for (int v = 0; v < rows; ++v) {
      if (mask.at({u, v}) < 0.5) continue;
      const double dist = grid[static_cast<std::size_t>(v + 1) * pc + u + 1];
      if (dist > best_d) {
        best_d = dist;
        best = {u, v};
      }
    }
  }
  if (best_d < 0) throw NoRoomError("room mask is empty");
  return best;
}

namespace {

struct EdgeList {
  std::vector<std::vector<std::pair<int, double>>> out;
};

ShapeGraph to_csr(std::vector<Cell> nodes, std::vector<int> group, const EdgeList& edges) {
  ShapeGraph g;
  g.nodes = std::move(nodes);
  g.group = std::move(group);
  g.offsets.assign(g.nodes.size() + 1, 0);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) g.offsets[i + 1] = g.offsets[i] + edges.out[i].size();
  g.targets.reserve(g.offsets.back());
  g.weights.reserve(g.offsets.back());
  for (const auto& list : edges.out) {
    for (const auto& [t, w] : list) {
      g.targets.push_back(t);
      g.weights.push_back(w);
    }
  }
  g.is_seam.assign(g.nodes.size(), 0);
  return g;
}

int chebyshev(Cell a, Cell b) { return std::max(std::abs(a.u - b.u), std::abs(a.v - b.v)); }

// Does segment pq meet the closed ray {(u, a.v) : u >= a.u}? Exact in integers.
bool touches_ray(Cell p, Cell q, Cell a) {
  const long pv = p.v - a.v;
  const long qv = q.v - a.v;
  if (pv == 0 && qv == 0) return std::max(p.u, q.u) >= a.u;
  if ((pv > 0 && qv > 0) || (pv < 0 && qv < 0)) return false;
  // Crossing abscissa u* = p.u + (a.v - p.v)(q.u - p.u)/(q.v - p.v); test u* >= a.u.
  const long dv = q.v - p.v;
  const long lhs = static_cast<long>(p.u - a.u) * dv + (-pv) * static_cast<long>(q.u - p.u);
  return dv > 0 ? lhs >= 0 : lhs <= 0;
}

// Signed crossing of segment pq with the ray {(u, a.v) : u > a.u}, rows at
// a.v counting as above: +1 upward, -1 downward, 0 none. Exact in integers.
int ray_crossing(Cell p, Cell q, Cell a) {
  const bool p_above = p.v >= a.v;
  const bool q_above = q.v >= a.v;
  if (p_above == q_above) return 0;
  const long dv = q.v - p.v;
  const long num = static_cast<long>(p.u - a.u) * (q.v - a.v) - static_cast<long>(q.u - a.u) * (p.v - a.v);
  const bool right = dv > 0 ? num > 0 : num < 0;
  if (!right) return 0;
  return q_above ? 1 : -1;
}

bool passes_through(Cell p, Cell q, Cell a) {
  const long cross = static_cast<long>(q.u - p.u) * (a.v - p.v) - static_cast<long>(q.v - p.v) * (a.u - p.u);
  if (cross != 0) return false;
  return std::min(p.u, q.u) <= a.u && a.u <= std::max(p.u, q.u) && std::min(p.v, q.v) <= a.v &&
         a.v <= std::max(p.v, q.v);
}

}  // namespace

ShapeGraph build_graph(const ShapeMaps& maps, std::span<const double> orientations, const SpaWeights& weights,
                       const IspaRound& round, std::span<const Cell> previous_corners) {
  const DensityGrid& mask = maps.mask;
  bool any = false;
  for (double v : mask.values()) any = any || v >= 0.5;
  if (!any) throw NoRoomError("room mask is empty");

  if (previous_corners.empty()) {
    std::vector<Cell> nodes = boundary_band(mask, 2);
    std::vector<int> index(static_cast<std::size_t>(mask.cols()) * mask.rows(), -1);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      index[static_cast<std::size_t>(nodes[i].v) * mask.cols() + nodes[i].u] = static_cast<int>(i);
    }
    EdgeList edges;
    edges.out.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Cell p = nodes[i];
      if (round.max_edge_length) {
        const int r = *round.max_edge_length;
        for (int dv = -r; dv <= r; ++dv) {
          for (int du = -r; du <= r; ++du) {
            const Cell q{p.u + du, p.v + dv};
            if ((du == 0 && dv == 0) || !mask.contains(q)) continue;
            const int j = index[static_cast<std::size_t>(q.v) * mask.cols() + q.u];
            if (j < 0) continue;
            edges.out[i].emplace_back(j, edge_cost(p, q, maps, orientations, weights));
          }
        }
      } else {
        for (std::size_t j = 0; j < nodes.size(); ++j) {
          if (j == i) continue;
          edges.out[i].emplace_back(static_cast<int>(j), edge_cost(p, nodes[j], maps, orientations, weights));
        }
      }
    }
    std::vector<int> group(nodes.size(), -1);
    return to_csr(std::move(nodes), std::move(group), edges);
  }

  const int k = static_cast<int>(previous_corners.size());
  const int r = round.neighborhood_radius;
  std::vector<Cell> nodes;
  std::vector<int> group;
  std::vector<std::vector<int>> members(k);
  for (int i = 0; i < k; ++i) {
    const Cell c = previous_corners[i];
    for (int dv = -r; dv <= r; ++dv) {
      for (int du = -r; du <= r; ++du) {
        const Cell q{c.u + du, c.v + dv};
        if (!mask.contains(q)) continue;
        members[i].push_back(static_cast<int>(nodes.size()));
        nodes.push_back(q);
        group.push_back(i);
      }
    }
  }
  EdgeList edges;
  edges.out.resize(nodes.size());
  for (int gi = 0; gi < k; ++gi) {
    for (int a : members[gi]) {
      for (int gj = gi + 1; gj < k; ++gj) {
        for (int b : members[gj]) {
          if (nodes[a] == nodes[b]) continue;
          if (round.max_edge_length && chebyshev(nodes[a], nodes[b]) > *round.max_edge_length) continue;
          edges.out[a].emplace_back(b, edge_cost(nodes[a], nodes[b], maps, orientations, weights));
        }
      }
      if (gi == 0) continue;
      for (int b : members[0]) {
        if (nodes[a] == nodes[b]) continue;
        if (round.max_edge_length && chebyshev(nodes[a], nodes[b]) > *round.max_edge_length) continue;
        edges.out[a].emplace_back(b, edge_cost(nodes[a], nodes[b], maps, orientations, weights));
      }
    }
  }
  ShapeGraph g = to_csr(std::move(nodes), std::move(group), edges);
  g.layered = true;
  return g;
}

ShapeGraph apply_containment(ShapeGraph graph, Cell anchor) {
  graph.anchor = anchor;
  const std::size_t n = graph.nodes.size();
  graph.is_seam.assign(n, 0);
  graph.seam.clear();
  graph.crossing.clear();
  std::vector<char> blocked(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Cell c = graph.nodes[i];
    if (graph.layered) {
      if (c == anchor) {
        blocked[i] = 1;
      } else if (graph.group[i] == 0) {
        graph.is_seam[i] = 1;
        graph.seam.push_back(static_cast<int>(i));
      }
    } else if (c.v == anchor.v && c.u >= anchor.u) {
      // Ray nodes right of the anchor are the seam; the anchor is unusable.
      if (c.u > anchor.u) {
        graph.is_seam[i] = 1;
        graph.seam.push_back(static_cast<int>(i));
      } else {
        blocked[i] = 1;
      }
    }
  }

  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<int> targets;
  std::vector<double> weights;
  targets.reserve(graph.targets.size());
  weights.reserve(graph.targets.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Cell p = graph.nodes[i];
    if (!blocked[i]) {
      for (std::size_t e = graph.offsets[i]; e < graph.offsets[i + 1]; ++e) {
        const int j = graph.targets[e];
        const Cell q = graph.nodes[j];
        if (blocked[j]) continue;
        bool keep;
        char cross = 0;
        if (graph.layered) {
          // Cycles start and end in neighborhood 0 and must cross the ray
          // exactly once, upward; see shortest_cycle.
          const int c = ray_crossing(p, q, anchor);
          keep = c >= 0 && !passes_through(p, q, anchor);
          cross = static_cast<char>(c);
        } else if (graph.is_seam[i] && graph.is_seam[j]) {
          keep = false;
        } else if (graph.is_seam[i]) {
          keep = q.v > anchor.v;  // leave the seam upward
        } else if (graph.is_seam[j]) {
          keep = p.v < anchor.v;  // return to the seam from below
        } else {
          keep = !touches_ray(p, q, anchor);
        }
        if (keep) {
          targets.push_back(j);
          weights.push_back(graph.weights[e]);
          if (graph.layered) graph.crossing.push_back(cross);
        }
      }
    }
    offsets[i + 1] = targets.size();
  }
  graph.offsets = std::move(offsets);
  graph.targets = std::move(targets);
  graph.weights = std::move(weights);
  return graph;
}

// -----------------------------------------------------------------------------
// Shortest cycle
// -----------------------------------------------------------------------------

namespace {

struct Label {
  double cost = std::numeric_limits<double>::infinity();
  int edges = 0;
};

bool better(double c1, int e1, double c2, int e2) { return c1 < c2 || (c1 == c2 && e1 < e2); }

}  // namespace

namespace {

// Band graphs: label-setting search from every seam node back to itself.
CycleSolution seam_cycle(const ShapeGraph& g) {
  const std::size_t n = g.nodes.size();
  CycleSolution best;
  best.cost = std::numeric_limits<double>::infinity();
  std::vector<Label> label(n);
  std::vector<int> pred(n, -1);
  std::vector<char> done(n, 0);
  std::vector<int> touched;
  using Entry = std::tuple<double, int, int>;

  for (int x : g.seam) {
    std::fill(label.begin(), label.end(), Label{});
    std::fill(pred.begin(), pred.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    Label close{};
    int close_pred = -1;

    auto relax_from = [&](int p) {
      const Label lp = label[p];
      for (std::size_t e = g.offsets[p]; e < g.offsets[p + 1]; ++e) {
        const int q = g.targets[e];
        const double c = lp.cost + g.weights[e];
        const int ne = lp.edges + 1;
        if (g.is_seam[q]) {
          if (q != x || p == x) continue;
          if (better(c, ne, close.cost, close.edges) ||
              (c == close.cost && ne == close.edges && p < close_pred)) {
            close = {c, ne};
            close_pred = p;
          }
          continue;
        }
        if (done[q]) continue;
        if (better(c, ne, label[q].cost, label[q].edges) ||
            (c == label[q].cost && ne == label[q].edges && p < pred[q])) {
          label[q] = {c, ne};
          pred[q] = p;
          touched.push_back(q);
        }
      }
    };

    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    label[x] = {0.0, 0};
    done[x] = 1;
    touched.clear();
    relax_from(x);
    for (int q : touched) heap.emplace(label[q].cost, label[q].edges, q);
    while (!heap.empty()) {
      const auto [c, ne, p] = heap.top();
      heap.pop();
      if (done[p] || c != label[p].cost || ne != label[p].edges) continue;
      // Weights are >= complexity > 0, so nothing settled later can improve
      // on a closing label that is already this cheap.
      if (c >= best.cost || c >= close.cost) break;
      done[p] = 1;
      touched.clear();
      relax_from(p);
      for (int q : touched) heap.emplace(label[q].cost, label[q].edges, q);
    }

    if (close_pred < 0) continue;
    if (!best.found || better(close.cost, close.edges, best.cost, best.edges)) {
      best.found = true;
      best.cost = close.cost;
      best.edges = close.edges;
      std::vector<Cell> rev;
      for (int v = close_pred; v != x; v = pred[v]) rev.push_back(g.nodes[v]);
      rev.push_back(g.nodes[x]);
      best.corners.assign(rev.rbegin(), rev.rend());
    }
  }
  return best;
}

// Refinement graphs: edges only advance through neighborhoods, so each start
// node needs one sweep in neighborhood order. Labels carry the number of
// upward ray crossings so far (0 or 1); a cycle must close with exactly one.
CycleSolution layered_cycle(const ShapeGraph& g) {
  const std::size_t n = g.nodes.size();
  CycleSolution best;
  best.cost = std::numeric_limits<double>::infinity();
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return g.group[a] < g.group[b]; });

  std::vector<Label> label(2 * n);
  std::vector<int> pred(2 * n, -1);  // predecessor state index (node * 2 + crossed)
  for (int x : g.seam) {
    std::fill(label.begin(), label.end(), Label{});
    std::fill(pred.begin(), pred.end(), -1);
    Label close{};
    int close_pred = -1;

    auto relax_from = [&](int p, int crossed) {
      const int from = 2 * p + crossed;
      const Label lp = label[from];
      for (std::size_t e = g.offsets[p]; e < g.offsets[p + 1]; ++e) {
        const int q = g.targets[e];
        const int now = crossed + g.crossing[e];
        if (now > 1) continue;
        const double c = lp.cost + g.weights[e];
        const int ne = lp.edges + 1;
        if (g.is_seam[q]) {
          if (q != x || now != 1) continue;
          if (better(c, ne, close.cost, close.edges) || (c == close.cost && ne == close.edges && from < close_pred)) {
            close = {c, ne};
            close_pred = from;
          }
          continue;
        }
        const int to = 2 * q + now;
        if (better(c, ne, label[to].cost, label[to].edges) ||
            (c == label[to].cost && ne == label[to].edges && from < pred[to])) {
          label[to] = {c, ne};
          pred[to] = from;
        }
      }
    };

    label[2 * x] = {0.0, 0};
    relax_from(x, 0);
    for (int p : order) {
      if (g.is_seam[p]) continue;
      for (int crossed = 0; crossed < 2; ++crossed) {
        const Label& l = label[2 * p + crossed];
        if (!std::isfinite(l.cost) || l.cost >= best.cost) continue;
        relax_from(p, crossed);
      }
    }

    if (close_pred < 0) continue;
    if (!best.found || better(close.cost, close.edges, best.cost, best.edges)) {
      best.found = true;
      best.cost = close.cost;
      best.edges = close.edges;
      std::vector<Cell> rev;
      for (int st = close_pred; st != 2 * x; st = pred[st]) rev.push_back(g.nodes[st / 2]);
      rev.push_back(g.nodes[x]);
      best.corners.assign(rev.rbegin(), rev.rend());
    }
  }
  return best;
}

}  // namespace

CycleSolution shortest_cycle(const ShapeGraph& g) { return g.layered ? layered_cycle(g) : seam_cycle(g); }

// -----------------------------------------------------------------------------
// iSPA
// -----------------------------------------------------------------------------

std::vector<Vec2> merge_collinear(std::vector<Vec2> corners, double min_turn) {
  bool changed = true;
  while (changed && corners.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < corners.size() && corners.size() > 3; ++i) {
      const std::size_t n = corners.size();
      const Vec2& prev = corners[(i + n - 1) % n];
      const Vec2& cur = corners[i];
      const Vec2& next = corners[(i + 1) % n];
      const Vec2 a = cur - prev;
      const Vec2 b = next - cur;
      bool drop = a.norm() == 0.0 || b.norm() == 0.0;
      if (!drop) {
        const double turn = std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
        drop = std::abs(turn) < min_turn;
      }
      if (drop) {
        corners.erase(corners.begin() + static_cast<long>(i));
        changed = true;
        --i;
      }
    }
  }
  return corners;
}

namespace {

// Index of the corner with the sharpest turn.
std::size_t sharpest_corner(std::span<const Vec2> corners) {
  const std::size_t n = corners.size();
  std::size_t best = 0;
  double best_turn = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = corners[i] - corners[(i + n - 1) % n];
    const Vec2 b = corners[(i + 1) % n] - corners[i];
    if (a.norm() == 0.0 || b.norm() == 0.0) continue;
    const double turn = std::abs(std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b)));
    if (turn > best_turn) {
      best_turn = turn;
      best = i;
    }
  }
  return best;
}

template <typename MapsFor>
RoomShape run_ispa(MapsFor&& maps_for, std::span<const double> orientations, const SpaWeights& weights,
                   const IspaSchedule& schedule) {
  weights.validate();
  schedule.validate();
  RoomShape shape;
  std::vector<Vec2> previous;
  double fine_cell = 0.0;
  for (std::size_t r = 0; r < schedule.rounds.size(); ++r) {
    const IspaRound& round = schedule.rounds[r];
    const auto start = std::chrono::steady_clock::now();
    const ShapeMaps maps = maps_for(round.grid_size);
    fine_cell = maps.mask.cell_size();

    ShapeGraph graph;
    if (r == 0) {
      const Cell anchor = containment_anchor(maps.mask);
      shape.anchor = maps.mask.cell_center(anchor);
      graph = apply_containment(build_graph(maps, orientations, weights, round), anchor);
    } else {
      // Neighborhood 0 surrounds the sharpest previous corner, so cycles
      // start at a real corner rather than at an arbitrary wall point.
      const std::size_t pivot = sharpest_corner(previous);
      std::vector<Cell> cells;
      for (std::size_t i = 0; i < previous.size(); ++i) {
        Cell c = maps.mask.cell_of(previous[(pivot + i) % previous.size()]);
        c.u = std::clamp(c.u, 0, maps.size() - 1);
        c.v = std::clamp(c.v, 0, maps.size() - 1);
        cells.push_back(c);
      }
      const Cell anchor = maps.mask.cell_of(shape.anchor);
      graph = apply_containment(build_graph(maps, orientations, weights, round, cells), anchor);
    }
    CycleSolution sol = shortest_cycle(graph);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!sol.found) {
      if (r == 0) throw DegenerateError("no cycle encloses the room anchor");
      shape.warnings.push_back("round " + std::to_string(r + 1) + " found no cycle; keeping previous corners");
      break;
    }
    std::vector<Vec2> world;
    for (const Cell& c : sol.corners) world.push_back(maps.mask.cell_center(c));
    if (r > 0 && !point_in_polygon(shape.anchor, world)) {
      shape.warnings.push_back("round " + std::to_string(r + 1) + " lost the anchor; keeping previous corners");
      break;
    }
    RoundResult rr;
    rr.round = round;
    rr.corners = std::move(sol.corners);
    rr.world_corners = world;
    rr.cost = sol.cost;
    rr.node_count = graph.nodes.size();
    rr.edge_count = graph.edge_count();
    rr.seconds = seconds;
    shape.rounds.push_back(std::move(rr));
    previous = std::move(world);
  }

  constexpr double kMinTurn = kPi / 180.0;
  shape.polygon.corners = merge_collinear(previous, kMinTurn);
  if (signed_area(shape.polygon.corners) < 0) std::reverse(shape.polygon.corners.begin(), shape.polygon.corners.end());
  if (signed_area(shape.polygon.corners) < 4.0 * fine_cell * fine_cell) {
    shape.warnings.push_back("degenerate room: polygon area below 4 cells");
  }
  return shape;
}

}  // namespace

RoomShape solve_room(const RoomEvidence& evidence, std::span<const double> orientations, const SpaWeights& weights,
                     const IspaSchedule& schedule) {
  const MapWindow window = evidence_window(evidence);
  return run_ispa([&](int size) { return build_maps(evidence, window, size); }, orientations, weights, schedule);
}

RoomShape solve_room(const ShapeMaps& maps, std::span<const double> orientations, const SpaWeights& weights,
                     const IspaSchedule& schedule) {
  return run_ispa([&](int size) { return resample_maps(maps, size); }, orientations, weights, schedule);
}

}  // namespace floorplan
