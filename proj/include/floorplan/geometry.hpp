#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace floorplan {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

// -----------------------------------------------------------------------------
// Angles
// -----------------------------------------------------------------------------

/// Wraps an angle into [-pi, pi).
double wrap_angle(double a);

/// Wraps an angle difference modulo pi into [-pi/2, pi/2).
double wrap_half_turn(double a);

/// Reduces an angle modulo pi into [0, pi).
double reduce_mod_pi(double a);

// -----------------------------------------------------------------------------
// Poses and layout boundaries
// -----------------------------------------------------------------------------

/// World-from-camera rigid pose. Translation is in odometry units and carries
/// the unknown odometry scale; rotation is orthonormal.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  std::int64_t timestamp = 0;

  /// Rotation about the vertical (y) axis by `yaw` radians.
  static Pose from_yaw(double yaw, const Vec3& translation, std::int64_t timestamp = 0);

  /// Camera position on the floor plane, (x, z) of s * t.
  Vec2 position2d(double scale) const { return scale * Vec2(translation.x(), translation.z()); }

  bool is_orthonormal(double tol = 1e-6) const;
};

struct BoundaryPoint {
  Vec3 position = Vec3::Zero();
  int source_column = 0;
};

enum class Frame { kCamera, kWorld };

/// Ordered floor-boundary samples of one keyframe, split into wall subsets at
/// `wall_splits`. The column sequence is cyclic, so the points before the first
/// split and after the last split form a single wall subset.
struct LayoutBoundary {
  std::vector<BoundaryPoint> points;
  std::vector<int> wall_splits;
  Frame frame = Frame::kCamera;

  /// Index lists of the wall subsets S_0..S_k; every point appears exactly once.
  std::vector<std::vector<int>> wall_subsets() const;

  /// Floor-plane (x, z) projection of all points, in order.
  std::vector<Vec2> floor_points() const;
};

// -----------------------------------------------------------------------------
// World-anchored grids
// -----------------------------------------------------------------------------

struct Cell {
  int u = 0;  // column, along world x
  int v = 0;  // row, along world z
  auto operator<=>(const Cell&) const = default;
};

struct GridSpec {
  Vec2 origin = Vec2::Zero();  // world (x, z) of the corner of cell (0, 0)
  double cell_size = 1.0;
  int cols = 0;
  int rows = 0;
};

/// Dense 2D grid of nonnegative scalars over the floor plane. Cell (u, v)
/// covers [origin + (u, v) * cell_size, origin + (u + 1, v + 1) * cell_size).
class DensityGrid {
 public:
  DensityGrid() = default;
  explicit DensityGrid(const GridSpec& spec, double fill = 0.0);

  const GridSpec& spec() const { return spec_; }
  const Vec2& origin() const { return spec_.origin; }
  double cell_size() const { return spec_.cell_size; }
  int cols() const { return spec_.cols; }
  int rows() const { return spec_.rows; }
  bool empty() const { return values_.empty(); }

  bool contains(Cell c) const { return c.u >= 0 && c.v >= 0 && c.u < spec_.cols && c.v < spec_.rows; }
  double& at(Cell c) { return values_[index(c)]; }
  double at(Cell c) const { return values_[index(c)]; }
  /// Value at `c`, or `fallback` outside the grid.
  double value_or(Cell c, double fallback) const { return contains(c) ? at(c) : fallback; }

  /// Cell containing world point `p` (may lie outside the grid).
  Cell cell_of(const Vec2& p) const;
  Vec2 cell_center(Cell c) const;

  double sum() const;
  double max() const;
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

 private:
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.v) * static_cast<std::size_t>(spec_.cols) + static_cast<std::size_t>(c.u);
  }

  GridSpec spec_;
  std::vector<double> values_;
};

enum class ProjectionMode { kCount, kNormalized };

struct GridProjection {
  DensityGrid grid;
  std::size_t outside = 0;   // points that fell outside the grid and were dropped
  bool degenerate = false;   // normalized mode with no in-grid points
};

/// Top-down histogram of `points`. In normalized mode the cells sum to one over
/// the in-grid points; an empty projection yields an all-zero grid flagged degenerate.
GridProjection grid_project(std::span<const Vec2> points, const GridSpec& spec, ProjectionMode mode);

/// Grid whose cell boundaries sit on integer multiples of `cell_size` and which
/// covers every point with `margin_cells` spare cells on each side.
GridSpec anchored_grid_spec(std::span<const Vec2> points, double cell_size, int margin_cells = 1);

// -----------------------------------------------------------------------------
// Polygons
// -----------------------------------------------------------------------------

struct RoomPolygon {
  std::vector<Vec2> corners;  // counterclockwise in (x, z)
  int room_id = 0;
};

double signed_area(std::span<const Vec2> corners);
bool is_simple(std::span<const Vec2> corners);
/// At least 3 corners, simple, counterclockwise.
bool is_valid(const RoomPolygon& poly);

/// Even-odd containment; points on the boundary count as inside.
bool point_in_polygon(const Vec2& p, std::span<const Vec2> corners);
inline bool point_in_polygon(const Vec2& p, const RoomPolygon& poly) { return point_in_polygon(p, poly.corners); }

/// Intersection-over-union by cell-center rasterization on a shared grid of
/// spacing `resolution`.
double polygon_iou(const RoomPolygon& a, const RoomPolygon& b, double resolution);

struct Bounds2 {
  Vec2 min = Vec2::Zero();
  Vec2 max = Vec2::Zero();
};
std::optional<Bounds2> bounding_box(std::span<const Vec2> points);

}  // namespace floorplan
