#pragma once

#include "floorplan/geometry.hpp"

#include <vector>

namespace floorplan {

/// Floor-boundary samples of one equirectangular layout. `phi[j]` is the
/// elevation of the floor boundary below the horizon at column j, strictly
/// inside (0, pi/2).
struct RawLayout {
  std::vector<double> phi;
  std::vector<int> wall_corner_columns;
  int image_width = 0;

  /// Throws InputError on inconsistent width, out-of-range phi or bad splits.
  void validate() const;
};

/// Azimuth of column j: uniform over [-pi, pi).
double column_azimuth(int column, int width);

/// Camera-frame boundary points for camera height h (all points at y = -h).
LayoutBoundary project_boundary(const RawLayout& raw, double camera_height);

/// World-frame boundary: x -> R x + s t.
LayoutBoundary register_boundary(const LayoutBoundary& boundary, const Pose& pose, double scale);

}  // namespace floorplan
