#pragma once

#include "floorplan/geometry.hpp"
#include "floorplan/layout.hpp"

namespace floorplan {

/// One timestep of input: odometry pose (translation up to scale) and the
/// 360-layout of that frame.
struct Keyframe {
  int index = 0;
  Pose pose;
  RawLayout layout;
};

}  // namespace floorplan
