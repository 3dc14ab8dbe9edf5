#pragma once

#include "floorplan/geometry.hpp"

#include <span>
#include <vector>

namespace floorplan {

enum class RoomStatus { kActive, kDormant, kFinalized };

/// Per-room accumulator. `density` is the running mean over the room's
/// keyframes of the indicator "cell center lies inside the clipped boundary".
struct RoomState {
  int room_id = 0;
  DensityGrid density;
  int frame_count = 0;
  std::vector<LayoutBoundary> boundary_archive;
  RoomStatus status = RoomStatus::kActive;
  int frames_away = 0;  // consecutive keyframes assigned to other rooms
};

struct ClipConfig {
  double radius = 4.0;
  double threshold = 0.5;
  int patience = 10;
  double cell_size = 0.1;

  void validate() const;
};

/// Radially clips camera-frame points to `radius`, registers them with
/// (pose, scale) and returns the closed (x, z) loop.
std::vector<Vec2> clip_boundary(const LayoutBoundary& camera_boundary, const Pose& pose, double scale,
                                double radius);

/// Folds the area enclosed by `loop` into the room's running-mean density,
/// growing the grid as needed. Throws InputError for loops with < 3 vertices.
void update_density(RoomState& room, std::span<const Vec2> loop, double cell_size);

struct RoomDecision {
  enum class Kind { kStay, kReenter, kCreateNew };
  Kind kind = Kind::kCreateNew;
  int room_id = -1;  // stay/reenter target
};

/// Decides where the camera at `camera` (world x, z) belongs. The active room
/// wins when its density reaches the threshold; otherwise the inactive room
/// with the highest density at or above the threshold is re-entered (ties to
/// the lowest id); otherwise a new room is created.
RoomDecision identify(const Vec2& camera, std::span<const RoomState> rooms, const ClipConfig& config);

/// Marks dormant rooms whose patience ran out as finalized and returns their
/// ids. With `end_of_stream`, every non-finalized room finalizes.
std::vector<int> finalize_rooms(std::vector<RoomState>& rooms, int patience, bool end_of_stream = false);

/// Sequential room registry driven one keyframe at a time.
class RoomTracker {
 public:
  explicit RoomTracker(ClipConfig config);

  struct Step {
    int room_id = -1;
    RoomDecision decision;
    std::vector<int> finalized;
    int reopened = -1;  // id of a finalized room that was re-entered, or -1
  };

  /// Assigns the keyframe to a room, updates that room's density and archive.
  /// `world_boundary` is archived; `clipped_loop` feeds the density.
  Step process(const Vec2& camera, std::span<const Vec2> clipped_loop, LayoutBoundary world_boundary);

  /// End-of-stream flush; returns ids finalized by it.
  std::vector<int> finish();

  const std::vector<RoomState>& rooms() const { return rooms_; }
  const RoomState& room(int id) const { return rooms_.at(static_cast<std::size_t>(id)); }
  const std::vector<int>& assignments() const { return assignments_; }
  int active_room() const { return active_; }

 private:
  ClipConfig config_;
  std::vector<RoomState> rooms_;
  std::vector<int> assignments_;
  int active_ = -1;
};

}  // namespace floorplan
