#pragma once

#include "floorplan/geometry.hpp"

#include <span>
#include <string>
#include <vector>

namespace floorplan {

struct ScaleSearchConfig {
  double s_min = 0.1;
  double s_max = 10.0;
  std::vector<double> steps = {0.5, 0.1, 0.01};
  int window = 10;
  double warmup_fraction = 0.2;
  double cell_size = 0.1;

  void validate() const;
};

struct ScaleCandidate {
  double scale = 0.0;
  double objective = 0.0;
};

struct ScaleResult {
  double scale = 0.0;
  double objective = 0.0;
  bool observable = true;
  std::vector<std::vector<ScaleCandidate>> levels;  // every evaluated candidate, per search level
  std::vector<std::string> warnings;
};

/// Shannon entropy (natural log) of the normalized top-down histogram of all
/// boundaries registered at scale `s`. The histogram grid is anchored to world
/// multiples of `cell_size` and covers every registered point.
double window_entropy(std::span<const LayoutBoundary> boundaries, std::span<const Pose> poses, double scale,
                      double cell_size);

/// Mean of window_entropy over every length-N sliding window (stride 1).
double scale_objective(std::span<const LayoutBoundary> boundaries, std::span<const Pose> poses, double scale,
                       const ScaleSearchConfig& config);

/// Coarse-to-fine linear search for the scale minimizing `scale_objective`.
/// `boundaries` are camera-frame layout boundaries of the warm-up keyframes.
ScaleResult recover_scale(std::span<const LayoutBoundary> boundaries, std::span<const Pose> poses,
                          const ScaleSearchConfig& config);

/// Number of leading keyframes consumed by the warm-up stage.
std::size_t warmup_count(std::size_t keyframes, const ScaleSearchConfig& config);

}  // namespace floorplan
