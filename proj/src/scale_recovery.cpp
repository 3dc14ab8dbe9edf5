#include "floorplan/scale_recovery.hpp"

#include "floorplan/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace floorplan {

void ScaleSearchConfig::validate() const {
  if (!(s_min > 0 && s_min < s_max)) throw InputError("scale.range must satisfy 0 < s_min < s_max");
  if (steps.empty()) throw InputError("scale.steps must not be empty");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!(steps[i] > 0)) throw InputError("scale.steps must be positive");
    if (i > 0 && !(steps[i] < steps[i - 1])) throw InputError("scale.steps must be strictly decreasing");
  }
  if (window < 2) throw InputError("scale.window must be at least 2");
  if (!(warmup_fraction > 0 && warmup_fraction <= 1)) throw InputError("scale.warmup_fraction must be in (0, 1]");
  if (!(cell_size > 0)) throw InputError("scale.cell_size must be positive");
}

namespace {

// Boundary points rotated into the world frame but not yet translated, so that
// registration at any scale is a single multiply-add per point.
struct RotatedFrame {
  std::vector<Vec2> points;
  Vec2 translation;
};

std::vector<RotatedFrame> rotate_frames(std::span<const LayoutBoundary> boundaries, std::span<const Pose> poses) {
  if (boundaries.size() != poses.size()) throw InputError("boundary and pose counts differ");
  std::vector<RotatedFrame> frames(boundaries.size());
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    const Mat3& r = poses[i].rotation;
    auto& f = frames[i];
    f.points.reserve(boundaries[i].points.size());
    for (const auto& p : boundaries[i].points) {
      const Vec3 w = r * p.position;
      f.points.emplace_back(w.x(), w.z());
    }
    f.translation = Vec2(poses[i].translation.x(), poses[i].translation.z());
  }
  return frames;
}

double entropy_of(std::span<const RotatedFrame> frames, double scale, double cell_size) {
  std::vector<Vec2> pts;
  std::size_t total = 0;
  for (const auto& f : frames) total += f.points.size();
  if (total < 2) throw DegenerateError("window has fewer than 2 boundary points");
  pts.reserve(total);
  for (const auto& f : frames) {
    const Vec2 offset = scale * f.translation;
    for (const auto& p : f.points) pts.push_back(p + offset);
  }
  const GridSpec spec = anchored_grid_spec(pts, cell_size, 1);
  if (static_cast<double>(spec.cols) * static_cast<double>(spec.rows) > 6.4e7) {
    throw DegenerateError("registered window spans too many cells at scale " + std::to_string(scale));
  }
  const GridProjection proj = grid_project(pts, spec, ProjectionMode::kNormalized);
  if (proj.degenerate) throw DegenerateError("window histogram is empty");
  double h = 0.0;
  for (double f : proj.grid.values()) {
    if (f > 0) h -= f * std::log(f);
  }
  return h;
}

double mean_window_entropy(std::span<const RotatedFrame> frames, double scale, const ScaleSearchConfig& config) {
  const std::size_t n = static_cast<std::size_t>(config.window);
  if (frames.size() < n) {
    throw InputError("warm-up has " + std::to_string(frames.size()) + " keyframes, window needs " +
                     std::to_string(n));
  }
  const std::size_t windows = frames.size() - n + 1;
  double sum = 0.0;
  for (std::size_t w = 0; w < windows; ++w) sum += entropy_of(frames.subspan(w, n), scale, config.cell_size);
  return sum / static_cast<double>(windows);
}

}  // namespace

double window_entropy(std::span<const LayoutBoundary> boundaries, std::span<const Pose> poses, double scale,
                      double cell_size) {
  if (boundaries.size() < 2) throw InputError("window_entropy needs at least 2 boundaries");
  if (!(scale > 0)) throw InputError("scale must be positive");
  const auto frames = rotate_frames(boundaries, poses);
  return entropy_of(frames, scale, cell_size);
}

double scale_objective(std::span<const LayoutBoundary> boundaries, std::span<const Pose> poses, double scale,
                       const ScaleSearchConfig& config) {
  config.validate();
  const auto frames = rotate_frames(boundaries, poses);
  return mean_window_entropy(frames, scale, config);
}

ScaleResult recover_scale(std::span<const LayoutBoundary> boundaries, std::span<const Pose> poses,
                          const ScaleSearchConfig& config) {
  config.validate();
  if (boundaries.size() < static_cast<std::size_t>(config.window)) {
    throw InputError("warm-up has " + std::to_string(boundaries.size()) + " keyframes, window needs " +
                     std::to_string(config.window));
  }
  const auto frames = rotate_frames(boundaries, poses);

  ScaleResult result;
  const bool any_motion = std::any_of(frames.begin(), frames.end(),
                                      [](const RotatedFrame& f) { return f.translation.norm() > 0.0; });
  if (!any_motion) {
    result.scale = config.s_min;
    result.objective = mean_window_entropy(frames, config.s_min, config);
    result.observable = false;
    result.warnings.push_back("scale is not observable: every warm-up translation is zero");
    return result;
  }

  constexpr double kSlack = 1e-9;
  double lo = config.s_min;
  double hi = config.s_max;
  double best = config.s_min;
  double best_objective = std::numeric_limits<double>::infinity();
  for (std::size_t level = 0; level < config.steps.size(); ++level) {
    const double step = config.steps[level];
    if (level > 0) {
      lo = std::max(config.s_min, best - config.steps[level - 1]);
      hi = std::min(config.s_max, best + config.steps[level - 1]);
    }
    std::vector<ScaleCandidate> evaluated;
    double level_best = best;
    double level_objective = std::numeric_limits<double>::infinity();
    for (int i = 0;; ++i) {
      const double s = lo + step * i;
      if (s > hi + kSlack) break;
      const double f = mean_window_entropy(frames, s, config);
      evaluated.push_back({s, f});
      if (f < level_objective) {
        level_objective = f;
        level_best = s;
      }
    }
    if (level == 0) {
      const auto [mn, mx] = std::minmax_element(evaluated.begin(), evaluated.end(),
                                                [](const auto& a, const auto& b) { return a.objective < b.objective; });
      if (mx->objective - mn->objective <= 1e-12) {
        result.scale = config.s_min;
        result.objective = evaluated.front().objective;
        result.observable = false;
        result.levels.push_back(std::move(evaluated));
        result.warnings.push_back("scale is not observable: objective is constant over the search range");
        return result;
      }
    }
    best = level_best;
    best_objective = level_objective;
    result.levels.push_back(std::move(evaluated));
  }
  result.scale = best;
  result.objective = best_objective;
  return result;
}

std::size_t warmup_count(std::size_t keyframes, const ScaleSearchConfig& config) {
  const auto fraction = static_cast<std::size_t>(std::ceil(config.warmup_fraction * static_cast<double>(keyframes)));
  return std::min(keyframes, std::max(fraction, static_cast<std::size_t>(config.window)));
}

}  // namespace floorplan
