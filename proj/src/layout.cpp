#include "floorplan/layout.hpp"

#include "floorplan/error.hpp"

#include <cmath>
#include <string>

namespace floorplan {

void RawLayout::validate() const {
  if (image_width <= 0) throw InputError("layout width must be positive");
  if (static_cast<int>(phi.size()) != image_width) {
    throw InputError("layout has " + std::to_string(phi.size()) + " phi samples, expected " +
                     std::to_string(image_width));
  }
  for (std::size_t j = 0; j < phi.size(); ++j) {
    if (!(phi[j] > 0.0 && phi[j] < kPi / 2)) {
      throw InputError("phi[" + std::to_string(j) + "] = " + std::to_string(phi[j]) + " is outside (0, pi/2)");
    }
  }
  for (std::size_t k = 0; k < wall_corner_columns.size(); ++k) {
    const int c = wall_corner_columns[k];
    if (c < 0 || c >= image_width) throw InputError("wall corner column " + std::to_string(c) + " out of range");
    if (k > 0 && c <= wall_corner_columns[k - 1]) throw InputError("wall corner columns must be strictly increasing");
  }
}

double column_azimuth(int column, int width) {
  return 2.0 * kPi * static_cast<double>(column) / static_cast<double>(width) - kPi;
}

LayoutBoundary project_boundary(const RawLayout& raw, double camera_height) {
  if (!(camera_height > 0)) throw InputError("camera height must be positive");
  raw.validate();
  LayoutBoundary out;
  out.frame = Frame::kCamera;
  out.wall_splits = raw.wall_corner_columns;
  out.points.reserve(raw.phi.size());
  for (int j = 0; j < raw.image_width; ++j) {
    const double theta = column_azimuth(j, raw.image_width);
    const double phi = raw.phi[j];
    const double range = camera_height / std::sin(phi) * std::cos(phi);
    out.points.push_back({Vec3(range * std::sin(theta), -camera_height, range * std::cos(theta)), j});
  }
  return out;
}

LayoutBoundary register_boundary(const LayoutBoundary& boundary, const Pose& pose, double scale) {
  if (!(scale > 0)) throw InputError("odometry scale must be positive");
  LayoutBoundary out;
  out.frame = Frame::kWorld;
  out.wall_splits = boundary.wall_splits;
  out.points.reserve(boundary.points.size());
  const Vec3 offset = scale * pose.translation;
  for (const auto& p : boundary.points) out.points.push_back({pose.rotation * p.position + offset, p.source_column});
  return out;
}

}  // namespace floorplan
