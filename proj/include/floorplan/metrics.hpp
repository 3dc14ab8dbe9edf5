#pragma once

#include "floorplan/geometry.hpp"

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

namespace floorplan {

/// x -> scale * R x + t on the floor plane.
struct Similarity2 {
  Mat2 rotation = Mat2::Identity();
  Vec2 translation = Vec2::Zero();
  double scale = 1.0;

  Vec2 apply(const Vec2& p) const { return scale * (rotation * p) + translation; }
  RoomPolygon apply(const RoomPolygon& poly) const;
  double angle() const;
};

/// Least-squares similarity taking `pred` onto `gt` (point i matches point i).
/// Throws DegenerateError with fewer than 3 pairs or coincident points.
Similarity2 align_points(std::span<const Vec2> pred, std::span<const Vec2> gt);

/// Pairs poses by timestamp and aligns their floor positions. Predicted
/// positions are taken at `pred_scale`.
Similarity2 align_to_ground_truth(std::span<const Pose> pred_poses, std::span<const Pose> gt_poses,
                                  double pred_scale = 1.0);

struct MatchCounts {
  int tp = 0;
  int fp = 0;
  int fn = 0;

  double recall() const { return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / (tp + fn); }
  double precision() const { return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp); }
};

/// Union bounding box of both sets, squared up and padded by 5% per side.
Bounds2 scene_bounds(std::span<const Vec2> a, std::span<const Vec2> b);

/// Corners rasterized on a 256 x 256 pixel grid over `bounds`; pairs are
/// claimed closest-first, one-to-one, up to 10 pixels apart.
MatchCounts corner_metric(std::span<const Vec2> pred, std::span<const Vec2> gt, const Bounds2& bounds);

struct RoomMatch {
  int pred = -1;
  int gt = -1;
  double iou = 0.0;
};

/// Greedy one-to-one room matching in descending IoU order; only pairs with
/// IoU >= threshold are matched.
MatchCounts room_metric(std::span<const RoomPolygon> pred, std::span<const RoomPolygon> gt, double iou_threshold,
                        std::vector<RoomMatch>* matches = nullptr, double resolution = 0.02);

struct EvalReport {
  MatchCounts corners;
  static constexpr std::array<double, 3> kThresholds = {0.3, 0.5, 0.7};
  std::array<MatchCounts, 3> rooms;
  std::vector<RoomMatch> room_table;  // best gt IoU for every prediction
  std::vector<double> room_seconds;   // solve time per predicted room
  Similarity2 alignment;
};

EvalReport evaluate(std::span<const RoomPolygon> pred, std::span<const RoomPolygon> gt,
                    std::vector<double> room_seconds = {}, double resolution = 0.02);

/// key=value lines, then one `room` line per table row.
void write_report(std::ostream& out, const EvalReport& report);

}  // namespace floorplan
