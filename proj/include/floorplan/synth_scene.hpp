#pragma once

#include "floorplan/geometry.hpp"
#include "floorplan/keyframe.hpp"

#include <cstdint>
#include <vector>

namespace floorplan {

struct NoiseSpec {
  double sigma_phi = 0.0;       // radians, i.i.d. per column
  double sigma_t = 0.0;         // odometry translation noise, odometry units
  double occlusion_prob = 0.0;  // per keyframe
};

/// A camera sample along the trajectory, in scene coordinates.
struct Waypoint {
  Vec2 position = Vec2::Zero();
  int room = -1;
};

struct SceneSpec {
  std::vector<RoomPolygon> rooms;
  std::vector<Waypoint> trajectory;
  std::vector<int> dwell;  // keyframes per room
  double true_scale = 1.0;
  double camera_height = 1.0;
  NoiseSpec noise;
  int width = 512;
  std::uint64_t seed = 0;

  /// Throws InputError on invalid rooms, overlapping rooms, s <= 0 or
  /// trajectory points outside every room.
  void validate() const;
};

struct GroundTruth {
  std::vector<RoomPolygon> rooms;
  std::vector<Vec2> corners;
  double true_scale = 1.0;
  std::vector<Pose> poses;  // scene frame, real scale
  std::vector<int> labels;  // room index per keyframe
};

struct SceneStream {
  std::vector<Keyframe> keyframes;
  GroundTruth truth;
};

/// Ray-casts every trajectory pose against its enclosing room. Odometry is
/// expressed in the first camera's frame with translations divided by the
/// true scale. Deterministic in spec.seed.
SceneStream generate(const SceneSpec& spec);

/// Distance along direction `dir` from `origin` to the first polygon edge, and
/// the index of that edge. Returns false when nothing is hit.
bool cast_ray(const Vec2& origin, const Vec2& dir, std::span<const Vec2> polygon, double& distance, int& edge);

struct SceneParams {
  int room_count = 3;
  double min_side = 2.5;
  double max_side = 5.0;
  double l_shape_prob = 0.3;
  bool revisit = true;
  double spacing = 0.35;       // keyframe spacing along the path
  double true_scale = 1.0;
  NoiseSpec noise;
  int width = 512;
  std::uint64_t seed = 0;
};

/// Random chain of rectangular and L-shaped rooms joined by doorways, with a
/// path that loops inside each room and, optionally, returns to the
/// second-to-last room at the end.
SceneSpec random_scene(const SceneParams& params);

}  // namespace floorplan
