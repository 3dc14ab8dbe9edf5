#pragma once

#include "floorplan/geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace floorplan {

struct RansacConfig {
  double max_residual = 0.03;
  double inlier_ratio_min = 0.9;
  int iterations = 100;
  std::uint64_t seed = 0;
};

/// A wall subset S_k fitted as a line n . p = offset in the floor plane.
/// The normal points toward the observing camera, so `distance` >= 0.
struct PlaneWallFeature {
  std::vector<Vec2> points;
  Vec2 normal = Vec2::UnitX();
  double offset = 0.0;
  double distance = 0.0;
  double inlier_ratio = 0.0;
  bool valid = false;

  /// Orientation of the normal, atan2(n_z, n_x).
  double orientation() const;
};

/// RANSAC line fit over 2-point samples with least-squares refit on inliers.
/// Subsets with at most `iterations` distinct pairs are searched exhaustively.
PlaneWallFeature fit_wall(std::span<const Vec2> points, const RansacConfig& config,
                          const Vec2& camera = Vec2::Zero());

struct OrientationPosterior {
  double mean = 0.0;    // wall-normal direction modulo pi, in [0, pi)
  double spread = 0.0;  // variance-like spread parameter
  int observation_count = 0;
};

struct OrientationConfig {
  double sigma0 = 0.05;
  double lambda = 0.02;
  double gate = kPi / 3;
  double accept = kPi / 10;
  double initial_spread = 2 * kPi;
};

/// Fuses a measurement with explicit spread into the closest posterior within
/// the gate (angles compared modulo pi), or starts a new posterior.
void fuse_orientation(std::vector<OrientationPosterior>& posteriors, double theta, double measurement_spread,
                      const OrientationConfig& config);

/// Measurement spread sigma0 + lambda * d, then fuse_orientation.
void update_orientation(std::vector<OrientationPosterior>& posteriors, double theta, double distance,
                        const OrientationConfig& config);

/// Means of posteriors with spread below the acceptance threshold, in [0, pi).
std::vector<double> likely_orientations(std::span<const OrientationPosterior> posteriors,
                                        const OrientationConfig& config);

}  // namespace floorplan
