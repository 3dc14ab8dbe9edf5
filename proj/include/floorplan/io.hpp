#pragma once

#include "floorplan/keyframe.hpp"
#include "floorplan/plane_filter.hpp"
#include "floorplan/room_id.hpp"
#include "floorplan/room_shape.hpp"
#include "floorplan/scale_recovery.hpp"
#include "floorplan/synth_scene.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace floorplan {

// -----------------------------------------------------------------------------
// Keyframe streams: one JSON object per line
//   {"index":0,"timestamp":0,"q":[w,x,y,z],"t":[x,y,z],"width":W,"phi":[...],"corners":[...]}
// -----------------------------------------------------------------------------

std::string format_keyframe(const Keyframe& kf);
/// Throws InputError naming `line` and the offending field.
Keyframe parse_keyframe(std::string_view text, int line = 0);

/// Blank lines are skipped. Enforces a constant width and nondecreasing timestamps.
std::vector<Keyframe> read_stream(std::istream& in);
void write_stream(std::ostream& out, std::span<const Keyframe> keyframes);

// -----------------------------------------------------------------------------
// Configuration: flat `key = value` lines, `#` comments, unknown keys rejected
// -----------------------------------------------------------------------------

struct PipelineConfig {
  double camera_height = 1.0;
  ScaleSearchConfig scale;
  ClipConfig room;
  int min_room_frames = 3;
  RansacConfig ransac;
  int min_wall_points = 10;
  OrientationConfig orient;
  SpaWeights spa;
  std::vector<int> spa_rounds = {64, 96, 96};
  int spa_max_edge_length = 8;
  int spa_neighborhood_radius = 5;
  int threads = 1;

  IspaSchedule schedule() const { return IspaSchedule::standard(spa_rounds, spa_max_edge_length, spa_neighborhood_radius); }
  void validate() const;
};

PipelineConfig parse_config(std::istream& in);
PipelineConfig read_config_file(const std::string& path);
/// Every key with its current value, in a fixed order; parse_config reads it back.
std::string format_config(const PipelineConfig& config);

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

// -----------------------------------------------------------------------------
// Pipeline output and ground truth
// -----------------------------------------------------------------------------

struct FloorPlanOutput {
  std::vector<RoomPolygon> rooms;
  std::vector<int> corner_counts;
  std::vector<double> room_seconds;
  std::vector<std::vector<std::string>> room_warnings;
  double scale_used = 1.0;
  bool scale_observable = true;
  std::size_t warmup_frames = 0;
  std::vector<Pose> trajectory;  // odometry poses of every keyframe, translation at scale_used
  std::vector<int> assignments;  // room id per keyframe, -1 if skipped
  std::vector<std::string> log;
  std::string config_hash;
  std::string input_hash;
};

void write_output(std::ostream& out, const FloorPlanOutput& output);
FloorPlanOutput read_output(std::istream& in);

void write_ground_truth(std::ostream& out, const GroundTruth& truth);
GroundTruth read_ground_truth(std::istream& in);

/// Binary grayscale image, values clamped to [0, 1] of `max_value`.
void write_pgm(const std::string& path, const DensityGrid& grid, double max_value = 1.0);

}  // namespace floorplan
