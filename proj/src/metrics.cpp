#include "floorplan/metrics.hpp"

#include "floorplan/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <tuple>

namespace floorplan {

RoomPolygon Similarity2::apply(const RoomPolygon& poly) const {
  RoomPolygon out = poly;
  for (auto& c : out.corners) c = apply(c);
  return out;
}

double Similarity2::angle() const { return std::atan2(rotation(1, 0), rotation(0, 0)); }

Similarity2 align_points(std::span<const Vec2> pred, std::span<const Vec2> gt) {
  if (pred.size() != gt.size()) throw InputError("alignment needs matched point lists");
  if (pred.size() < 3) throw DegenerateError("alignment needs at least 3 pose pairs");
  const auto n = static_cast<Eigen::Index>(pred.size());
  Eigen::Matrix2Xd src(2, n), dst(2, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    src.col(i) = pred[static_cast<std::size_t>(i)];
    dst.col(i) = gt[static_cast<std::size_t>(i)];
  }
  const auto spread = [](const Eigen::Matrix2Xd& m) {
    return (m.colwise() - m.rowwise().mean()).squaredNorm();
  };
  if (spread(src) <= 1e-18 || spread(dst) <= 1e-18) throw DegenerateError("alignment points are coincident");
  const Eigen::Matrix3d t = Eigen::umeyama(src, dst, true);
  Similarity2 s;
  const Mat2 sr = t.topLeftCorner<2, 2>();
  s.scale = std::sqrt(std::abs(sr.determinant()));
  s.rotation = sr / s.scale;
  s.translation = t.topRightCorner<2, 1>();
  return s;
}

Similarity2 align_to_ground_truth(std::span<const Pose> pred_poses, std::span<const Pose> gt_poses,
                                  double pred_scale) {
  std::map<std::int64_t, Vec2> by_time;
  for (const auto& g : gt_poses) by_time[g.timestamp] = g.position2d(1.0);
  std::vector<Vec2> src, dst;
  for (const auto& p : pred_poses) {
    const auto it = by_time.find(p.timestamp);
    if (it == by_time.end()) continue;
    src.push_back(p.position2d(pred_scale));
    dst.push_back(it->second);
  }
  return align_points(src, dst);
}

Bounds2 scene_bounds(std::span<const Vec2> a, std::span<const Vec2> b) {
  std::vector<Vec2> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  const auto box = bounding_box(all);
  if (!box) return {Vec2::Zero(), Vec2::Ones()};
  const Vec2 center = 0.5 * (box->min + box->max);
  double side = (box->max - box->min).maxCoeff();
  if (side <= 0) side = 1.0;
  side *= 1.1;
  return {center - Vec2::Constant(0.5 * side), center + Vec2::Constant(0.5 * side)};
}

namespace {

constexpr int kCornerGrid = 256;
constexpr double kCornerGate = 10.0;

std::pair<int, int> to_pixel(const Vec2& p, const Bounds2& b) {
  const Vec2 ext = b.max - b.min;
  const auto px = [](double t) { return std::clamp(static_cast<int>(std::floor(t * kCornerGrid)), 0, kCornerGrid - 1); };
  return {px((p.x() - b.min.x()) / ext.x()), px((p.y() - b.min.y()) / ext.y())};
}

}  // namespace

MatchCounts corner_metric(std::span<const Vec2> pred, std::span<const Vec2> gt, const Bounds2& bounds) {
  std::vector<std::pair<int, int>> pp, gp;
  for (const auto& p : pred) pp.push_back(to_pixel(p, bounds));
  for (const auto& g : gt) gp.push_back(to_pixel(g, bounds));

  // Candidate pairs ordered by distance; ties broken on pixel positions only,
  // so the outcome does not depend on which set is called the prediction.
  using Key = std::tuple<long, std::pair<int, int>, std::pair<int, int>, std::size_t, std::size_t>;
  std::vector<Key> pairs;
  for (std::size_t i = 0; i < pp.size(); ++i) {
    for (std::size_t j = 0; j < gp.size(); ++j) {
      const long du = pp[i].first - gp[j].first;
      const long dv = pp[i].second - gp[j].second;
      const long d2 = du * du + dv * dv;
      if (static_cast<double>(d2) > kCornerGate * kCornerGate) continue;
      pairs.emplace_back(d2, std::min(pp[i], gp[j]), std::max(pp[i], gp[j]), i, j);
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Key& a, const Key& b) {
    return std::tie(std::get<0>(a), std::get<1>(a), std::get<2>(a)) <
           std::tie(std::get<0>(b), std::get<1>(b), std::get<2>(b));
  });
  std::vector<char> used_p(pp.size(), 0), used_g(gp.size(), 0);
  MatchCounts m;
  for (const auto& k : pairs) {
    const std::size_t i = std::get<3>(k);
    const std::size_t j = std::get<4>(k);
    if (used_p[i] || used_g[j]) continue;
    used_p[i] = used_g[j] = 1;
    ++m.tp;
  }
  m.fp = static_cast<int>(pp.size()) - m.tp;
  m.fn = static_cast<int>(gp.size()) - m.tp;
  return m;
}

MatchCounts room_metric(std::span<const RoomPolygon> pred, std::span<const RoomPolygon> gt, double iou_threshold,
                        std::vector<RoomMatch>* matches, double resolution) {
  if (!(iou_threshold > 0 && iou_threshold < 1)) throw InputError("IoU threshold must be in (0, 1)");
  std::vector<RoomMatch> cand;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = 0; j < gt.size(); ++j) {
      const double iou = polygon_iou(pred[i], gt[j], resolution);
      if (iou >= iou_threshold) cand.push_back({static_cast<int>(i), static_cast<int>(j), iou});
    }
  }
  std::sort(cand.begin(), cand.end(), [](const RoomMatch& a, const RoomMatch& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    return std::tie(a.gt, a.pred) < std::tie(b.gt, b.pred);
  });
  std::vector<char> used_p(pred.size(), 0), used_g(gt.size(), 0);
  MatchCounts m;
  for (const auto& c : cand) {
    if (used_p[c.pred] || used_g[c.gt]) continue;
    used_p[c.pred] = used_g[c.gt] = 1;
    ++m.tp;
    if (matches) matches->push_back(c);
  }
  m.fp = static_cast<int>(pred.size()) - m.tp;
  m.fn = static_cast<int>(gt.size()) - m.tp;
  return m;
}

EvalReport evaluate(std::span<const RoomPolygon> pred, std::span<const RoomPolygon> gt,
                    std::vector<double> room_seconds, double resolution) {
  EvalReport r;
  std::vector<Vec2> pc, gc;
  for (const auto& p : pred) pc.insert(pc.end(), p.corners.begin(), p.corners.end());
  for (const auto& g : gt) gc.insert(gc.end(), g.corners.begin(), g.corners.end());
  r.corners = corner_metric(pc, gc, scene_bounds(pc, gc));
  for (std::size_t k = 0; k < EvalReport::kThresholds.size(); ++k) {
    r.rooms[k] = room_metric(pred, gt, EvalReport::kThresholds[k], nullptr, resolution);
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    RoomMatch best{static_cast<int>(i), -1, 0.0};
    for (std::size_t j = 0; j < gt.size(); ++j) {
      const double iou = polygon_iou(pred[i], gt[j], resolution);
      if (iou > best.iou) best = {static_cast<int>(i), static_cast<int>(j), iou};
    }
    r.room_table.push_back(best);
  }
  r.room_seconds = std::move(room_seconds);
  return r;
}

void write_report(std::ostream& out, const EvalReport& r) {
  const auto counts = [&](const std::string& prefix, const MatchCounts& m) {
    out << prefix << "_recall=" << m.recall() << '\n'
        << prefix << "_precision=" << m.precision() << '\n'
        << prefix << "_tp=" << m.tp << '\n'
        << prefix << "_fp=" << m.fp << '\n'
        << prefix << "_fn=" << m.fn << '\n';
  };
  counts("corner", r.corners);
  for (std::size_t k = 0; k < EvalReport::kThresholds.size(); ++k) {
    counts("room_iou" + std::to_string(static_cast<int>(std::lround(EvalReport::kThresholds[k] * 10))), r.rooms[k]);
  }
  out << "align_scale=" << r.alignment.scale << '\n'
      << "align_angle=" << r.alignment.angle() << '\n'
      << "align_tx=" << r.alignment.translation.x() << '\n'
      << "align_tz=" << r.alignment.translation.y() << '\n';
  for (std::size_t i = 0; i < r.room_table.size(); ++i) {
    const auto& row = r.room_table[i];
    out << "room pred=" << row.pred << " gt=" << row.gt << " iou=" << row.iou;
    if (i < r.room_seconds.size()) out << " seconds=" << r.room_seconds[i];
    out << '\n';
  }
}

}  // namespace floorplan
