#include "floorplan/geometry.hpp"

#include "floorplan/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace floorplan {

double wrap_angle(double a) {
  if (a >= -kPi && a < kPi) return a;
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0) a += 2.0 * kPi;
  return a - kPi;
}

double wrap_half_turn(double a) {
  a = std::fmod(a + kPi / 2, kPi);
  if (a < 0) a += kPi;
  return a - kPi / 2;
}

double reduce_mod_pi(double a) {
  a = std::fmod(a, kPi);
  if (a < 0) a += kPi;
  if (a >= kPi) a -= kPi;
  return a;
}

Pose Pose::from_yaw(double yaw, const Vec3& translation, std::int64_t timestamp) {
  Pose pose;
  pose.rotation = Eigen::AngleAxisd(yaw, Vec3::UnitY()).toRotationMatrix();
  pose.translation = translation;
  pose.timestamp = timestamp;
  return pose;
}

bool Pose::is_orthonormal(double tol) const {
  const Mat3 gram = rotation.transpose() * rotation;
  return (gram - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
}

std::vector<std::vector<int>> LayoutBoundary::wall_subsets() const {
  const int n = static_cast<int>(points.size());
  std::vector<std::vector<int>> subsets;
  if (n == 0) return subsets;
  if (wall_splits.empty()) {
    subsets.emplace_back(n);
    for (int i = 0; i < n; ++i) subsets.back()[i] = i;
    return subsets;
  }
  const int k = static_cast<int>(wall_splits.size());
  for (int s = 0; s < k; ++s) {
    const int begin = wall_splits[s];
    const int end = (s + 1 < k) ? wall_splits[s + 1] : wall_splits[0] + n;
    std::vector<int> subset;
    subset.reserve(end - begin);
    for (int i = begin; i < end; ++i) subset.push_back(i % n);
    subsets.push_back(std::move(subset));
  }
  return subsets;
}

std::vector<Vec2> LayoutBoundary::floor_points() const {
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.emplace_back(p.position.x(), p.position.z());
  return out;
}

DensityGrid::DensityGrid(const GridSpec& spec, double fill) : spec_(spec) {
  if (spec.cols <= 0 || spec.rows <= 0 || !(spec.cell_size > 0)) {
    throw InputError("grid dimensions and cell size must be positive");
  }
  values_.assign(static_cast<std::size_t>(spec.cols) * static_cast<std::size_t>(spec.rows), fill);
}

Cell DensityGrid::cell_of(const Vec2& p) const {
  return {static_cast<int>(std::floor((p.x() - spec_.origin.x()) / spec_.cell_size)),
          static_cast<int>(std::floor((p.y() - spec_.origin.y()) / spec_.cell_size))};
}

Vec2 DensityGrid::cell_center(Cell c) const {
  return spec_.origin + spec_.cell_size * Vec2(c.u + 0.5, c.v + 0.5);
}

double DensityGrid::sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

double DensityGrid::max() const {
  return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

GridProjection grid_project(std::span<const Vec2> points, const GridSpec& spec, ProjectionMode mode) {
  GridProjection out{DensityGrid(spec), 0, false};
  std::size_t inside = 0;
  for (const auto& p : points) {
    const Cell c = out.grid.cell_of(p);
    if (!out.grid.contains(c)) {
      ++out.outside;
      continue;
    }
    out.grid.at(c) += 1.0;
    ++inside;
  }
  if (mode == ProjectionMode::kNormalized) {
    if (inside == 0) {
      out.degenerate = true;
      return out;
    }
    const double inv = 1.0 / static_cast<double>(inside);
    for (double& v : out.grid.values()) v *= inv;
  }
  return out;
}

GridSpec anchored_grid_spec(std::span<const Vec2> points, double cell_size, int margin_cells) {
  auto box = bounding_box(points);
  if (!box) throw DegenerateError("cannot size a grid for an empty point set");
  const long u0 = static_cast<long>(std::floor(box->min.x() / cell_size)) - margin_cells;
  const long v0 = static_cast<long>(std::floor(box->min.y() / cell_size)) - margin_cells;
  const long u1 = static_cast<long>(std::floor(box->max.x() / cell_size)) + margin_cells;
  const long v1 = static_cast<long>(std::floor(box->max.y() / cell_size)) + margin_cells;
  GridSpec spec;
  spec.origin = Vec2(static_cast<double>(u0) * cell_size, static_cast<double>(v0) * cell_size);
  spec.cell_size = cell_size;
  spec.cols = static_cast<int>(u1 - u0 + 1);
  spec.rows = static_cast<int>(v1 - v0 + 1);
  return spec;
}

std::optional<Bounds2> bounding_box(std::span<const Vec2> points) {
  if (points.empty()) return std::nullopt;
  Bounds2 b{points.front(), points.front()};
  for (const auto& p : points) {
    b.min = b.min.cwiseMin(p);
    b.max = b.max.cwiseMax(p);
  }
  return b;
}

double signed_area(std::span<const Vec2> corners) {
  const std::size_t n = corners.size();
  double a = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = corners[i];
    const Vec2& q = corners[(i + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b, double eps) {
  const Vec2 ab = b - a;
  const double len = ab.norm();
  if (len == 0.0) return (p - a).norm() <= eps;
  if (std::abs(cross(ab, p - a)) > eps * len) return false;
  const double t = ab.dot(p - a);
  return t >= -eps * len && t <= len * len + eps * len;
}

int orientation_sign(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross(b - a, c - a);
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const int o1 = orientation_sign(p1, p2, q1);
  const int o2 = orientation_sign(p1, p2, q2);
  const int o3 = orientation_sign(q1, q2, p1);
  const int o4 = orientation_sign(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(q1, p1, p2, 0.0)) return true;
  if (o2 == 0 && on_segment(q2, p1, p2, 0.0)) return true;
  if (o3 == 0 && on_segment(p1, q1, q2, 0.0)) return true;
  if (o4 == 0 && on_segment(p2, q1, q2, 0.0)) return true;
  return false;
}

}  // namespace

bool is_simple(std::span<const Vec2> corners) {
  const std::size_t n = corners.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a1 = corners[i];
    const Vec2& a2 = corners[(i + 1) % n];
    if ((a2 - a1).norm() == 0.0) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      // Adjacent edges share exactly one endpoint; skip them.
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      const Vec2& b1 = corners[j];
      const Vec2& b2 = corners[(j + 1) % n];
      if (segments_intersect(a1, a2, b1, b2)) return false;
    }
  }
  return true;
}

bool is_valid(const RoomPolygon& poly) {
  return poly.corners.size() >= 3 && is_simple(poly.corners) && signed_area(poly.corners) > 0.0;
}

bool point_in_polygon(const Vec2& p, std::span<const Vec2> corners) {
  const std::size_t n = corners.size();
  if (n < 3) return false;
  constexpr double kEps = 1e-12;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = corners[i];
    const Vec2& b = corners[j];
    if (on_segment(p, a, b, kEps)) return true;
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

double polygon_iou(const RoomPolygon& a, const RoomPolygon& b, double resolution) {
  if (!(resolution > 0)) throw InputError("IoU resolution must be positive");
  const auto ba = bounding_box(a.corners);
  const auto bb = bounding_box(b.corners);
  if (!ba || !bb) return 0.0;
  if (ba->max.x() < bb->min.x() || bb->max.x() < ba->min.x() || ba->max.y() < bb->min.y() ||
      bb->max.y() < ba->min.y()) {
    return 0.0;
  }
  Bounds2 u{ba->min.cwiseMin(bb->min), ba->max.cwiseMax(bb->max)};
  const int cols = std::max(1, static_cast<int>(std::ceil((u.max.x() - u.min.x()) / resolution)));
  const int rows = std::max(1, static_cast<int>(std::ceil((u.max.y() - u.min.y()) / resolution)));
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const Vec2 p = u.min + resolution * Vec2(c + 0.5, r + 0.5);
      const bool ia = point_in_polygon(p, a.corners);
      const bool ib = point_in_polygon(p, b.corners);
      if (ia && ib) ++inter;
      if (ia || ib) ++uni;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace floorplan
