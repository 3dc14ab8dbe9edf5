#pragma once

#include "floorplan/geometry.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace floorplan {

/// Weights of the per-edge cost
///   L(p, q) = ori * L_ori + plane * L_plane + mask * L_mask + complexity.
struct SpaWeights {
  double orientation = 1.0;
  double plane = 1.0;
  double mask = 2.0;
  double complexity = 5.0;

  void validate() const;
};

struct IspaRound {
  int grid_size = 64;
  std::optional<int> max_edge_length;  // Chebyshev cells; unset means unrestricted
  int neighborhood_radius = 5;
};

struct IspaSchedule {
  std::vector<IspaRound> rounds;

  /// Coarse limited-edge round followed by unrestricted refinement rounds.
  static IspaSchedule standard(std::vector<int> grid_sizes = {64, 96, 96}, int max_edge_length = 8,
                               int neighborhood_radius = 5);
  void validate() const;
};

/// Wall evidence (plane, values in [0, 1]) and binary room mask over one
/// square node grid. Both grids share geometry.
struct ShapeMaps {
  DensityGrid plane;
  DensityGrid mask;

  int size() const { return mask.cols(); }
};

/// World-space evidence of one finalized room.
struct RoomEvidence {
  DensityGrid density;             // room density function, values in [0, 1]
  std::vector<Vec2> wall_points;   // points of validated walls, world (x, z)
  double threshold = 0.5;
};

/// Square world window the node grids of every round are laid over.
struct MapWindow {
  Vec2 origin = Vec2::Zero();
  double side = 1.0;
};

MapWindow evidence_window(const RoomEvidence& evidence, double margin_fraction = 0.15);

/// Rasterizes evidence onto a grid_size x grid_size grid over `window`:
/// mask = density >= threshold at cell centers, eroded by one cell (4-neighbors),
/// largest 4-connected component; plane = wall-point counts over the 95th
/// percentile of nonzero counts, clipped to 1, then max-filtered over the
/// 4-neighborhood.
ShapeMaps build_maps(const RoomEvidence& evidence, const MapWindow& window, int grid_size);

/// Nearest-neighbor resampling of existing maps to another node count.
ShapeMaps resample_maps(const ShapeMaps& maps, int grid_size);

/// Largest 4-connected component of cells with value >= 0.5, as a 0/1 grid.
DensityGrid largest_component(const DensityGrid& binary);

/// Cells of segment pq from a midpoint line walk, excluding p and including q.
std::vector<Cell> rasterize_segment(Cell p, Cell q);

/// Angular deviation of direction pq from the closest wall orientation, in
/// [0, pi/2]. `orientations` are wall-normal directions modulo pi; empty -> 0.
double orientation_cost(Cell p, Cell q, std::span<const double> orientations);

double edge_cost(Cell p, Cell q, const ShapeMaps& maps, std::span<const double> orientations,
                 const SpaWeights& weights);

/// Cells whose 4-neighborhood crosses the mask boundary.
std::vector<Cell> mask_boundary(const DensityGrid& mask);

/// Cells within Chebyshev distance `width` of the mask boundary.
std::vector<Cell> boundary_band(const DensityGrid& mask, int width = 2);

/// Mask cell farthest (Euclidean) from any non-mask cell or the grid border;
/// ties go to the lexicographically smallest (u, v).
Cell containment_anchor(const DensityGrid& mask);

/// Directed graph in CSR form. In band graphs `group` is -1 everywhere; in
/// refinement graphs it is the index of the previous corner a node surrounds
/// and edges only go to higher groups, or back to group 0 to close the loop.
struct ShapeGraph {
  std::vector<Cell> nodes;
  std::vector<int> group;
  std::vector<std::size_t> offsets;  // size nodes + 1
  std::vector<int> targets;
  std::vector<double> weights;
  std::vector<int> seam;             // nodes where the cycle starts and ends
  std::vector<char> is_seam;
  std::vector<char> crossing;        // refinement graphs: +1 if the edge crosses the ray upward
  Cell anchor;
  bool layered = false;

  std::size_t edge_count() const { return targets.size(); }
};

/// Nodes and weighted edges of one round. Without `previous_corners` the
/// nodes are the +-2 band around the mask boundary and edges join node pairs
/// within `max_edge_length` (all pairs when unset). With previous corners the
/// nodes are the neighborhoods of those corners and edges run from
/// neighborhood i to every later neighborhood j > i, plus closing edges into
/// neighborhood 0.
ShapeGraph build_graph(const ShapeMaps& maps, std::span<const double> orientations, const SpaWeights& weights,
                       const IspaRound& round, std::span<const Cell> previous_corners = {});

/// Installs the containment cut. Band graphs: the seam is the set of nodes on
/// the horizontal ray from `anchor` toward +u; a cycle leaves its seam node
/// upward, returns to it from below, and no other edge may touch the ray, so
/// every feasible cycle winds once counterclockwise around the anchor.
/// Refinement graphs: neighborhood 0 holds the start nodes; edges crossing the
/// ray downward or passing through the anchor are removed and upward
/// crossings are flagged, and a cycle must cross exactly once.
ShapeGraph apply_containment(ShapeGraph graph, Cell anchor);

struct CycleSolution {
  std::vector<Cell> corners;
  double cost = 0.0;
  int edges = 0;
  bool found = false;
};

/// Minimum-cost cycle through a seam node: label-setting search from every
/// seam node on band graphs, a sweep in neighborhood order on refinement
/// graphs (ties: fewer edges, then smaller node indices).
CycleSolution shortest_cycle(const ShapeGraph& graph);

struct RoundResult {
  IspaRound round;
  std::vector<Cell> corners;       // raw corners on this round's grid
  std::vector<Vec2> world_corners;
  double cost = 0.0;
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  double seconds = 0.0;
};

struct RoomShape {
  RoomPolygon polygon;             // final corners after collinear merging
  std::vector<RoundResult> rounds;
  Vec2 anchor = Vec2::Zero();
  std::vector<std::string> warnings;
};

/// Iterative coarse-to-fine shortest-path room shape extraction.
RoomShape solve_room(const RoomEvidence& evidence, std::span<const double> orientations, const SpaWeights& weights,
                     const IspaSchedule& schedule);

/// Same on fixed maps; rounds at other grid sizes resample them.
RoomShape solve_room(const ShapeMaps& maps, std::span<const double> orientations, const SpaWeights& weights,
                     const IspaSchedule& schedule);

/// Drops corners whose turn is below `min_turn` radians, and repeated corners.
std::vector<Vec2> merge_collinear(std::vector<Vec2> corners, double min_turn);

/// Total cost of the closed corner loop under `maps`.
double cycle_cost(std::span<const Cell> corners, const ShapeMaps& maps, std::span<const double> orientations,
                  const SpaWeights& weights);

/// Exhaustive reference: all-pairs shortest paths on the unrestricted band
/// graph with the containment cut. Independent of the search used by
/// solve_room. Refuses grids larger than 24.
CycleSolution oracle_shortest_cycle(const ShapeMaps& maps, std::span<const double> orientations,
                                    const SpaWeights& weights);

}  // namespace floorplan
