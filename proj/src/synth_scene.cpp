#include "floorplan/synth_scene.hpp"

#include "floorplan/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace floorplan {

namespace {

int room_at(const Vec2& p, std::span<const RoomPolygon> rooms) {
  for (std::size_t r = 0; r < rooms.size(); ++r) {
    if (point_in_polygon(p, rooms[r])) return static_cast<int>(r);
  }
  return -1;
}

}  // namespace

void SceneSpec::validate() const {
  if (rooms.empty()) throw InputError("scene has no rooms");
  if (!(true_scale > 0)) throw InputError("true scale must be positive");
  if (!(camera_height > 0)) throw InputError("camera height must be positive");
  if (width < 8) throw InputError("image width must be at least 8");
  if (noise.sigma_phi < 0 || noise.sigma_t < 0) throw InputError("noise levels must be nonnegative");
  if (noise.occlusion_prob < 0 || noise.occlusion_prob > 1) throw InputError("occlusion probability must be in [0, 1]");
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    if (!is_valid(rooms[i])) throw InputError("room " + std::to_string(i) + " is not a simple CCW polygon");
    for (std::size_t j = 0; j < i; ++j) {
      if (polygon_iou(rooms[i], rooms[j], 0.05) > 0) {
        throw InputError("rooms " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
      }
    }
  }
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    if (room_at(trajectory[k].position, rooms) < 0) {
      throw InputError("trajectory point " + std::to_string(k) + " is outside all rooms");
    }
  }
}

bool cast_ray(const Vec2& origin, const Vec2& dir, std::span<const Vec2> polygon, double& distance, int& edge) {
  distance = std::numeric_limits<double>::infinity();
  edge = -1;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = polygon[i];
    const Vec2 e = polygon[(i + 1) % n] - a;
    const double denom = dir.x() * e.y() - dir.y() * e.x();
    if (denom == 0.0) continue;
    const Vec2 w = a - origin;
    const double t = (w.x() * e.y() - w.y() * e.x()) / denom;
    const double u = (w.x() * dir.y() - w.y() * dir.x()) / denom;
    if (t > 1e-12 && u >= 0.0 && u <= 1.0 && t < distance) {
      distance = t;
      edge = static_cast<int>(i);
    }
  }
  return edge >= 0;
}

SceneStream generate(const SceneSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> yaw_dist(-kPi, kPi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int w = spec.width;
  const double h = spec.camera_height;

  SceneStream out;
  out.truth.rooms = spec.rooms;
  for (std::size_t r = 0; r < spec.rooms.size(); ++r) {
    out.truth.rooms[r].room_id = static_cast<int>(r);
    out.truth.corners.insert(out.truth.corners.end(), spec.rooms[r].corners.begin(), spec.rooms[r].corners.end());
  }
  out.truth.true_scale = spec.true_scale;

  Mat3 r0t = Mat3::Identity();
  Vec3 c0 = Vec3::Zero();
  std::vector<double> rho(w);
  std::vector<int> hit(w);
  for (std::size_t k = 0; k < spec.trajectory.size(); ++k) {
    const Vec2 c = spec.trajectory[k].position;
    const int room = room_at(c, spec.rooms);
    const double yaw = yaw_dist(rng);
    const Pose truth = Pose::from_yaw(yaw, Vec3(c.x(), 0.0, c.y()), static_cast<std::int64_t>(k));
    if (k == 0) {
      r0t = truth.rotation.transpose();
      c0 = truth.translation;
    }

    const auto& poly = spec.rooms[static_cast<std::size_t>(room)].corners;
    for (int j = 0; j < w; ++j) {
      const double alpha = column_azimuth(j, w) + yaw;
      if (!cast_ray(c, Vec2(std::sin(alpha), std::cos(alpha)), poly, rho[j], hit[j])) {
        throw DegenerateError("ray from trajectory point " + std::to_string(k) + " escaped its room");
      }
    }
    if (spec.noise.occlusion_prob > 0 && unit(rng) < spec.noise.occlusion_prob) {
      std::uniform_int_distribution<int> len_dist(std::max(1, w / 16), std::max(1, w / 6));
      std::uniform_int_distribution<int> start_dist(0, w - 1);
      std::uniform_real_distribution<double> shrink(0.5, 0.8);
      const int len = len_dist(rng);
      const int start = start_dist(rng);
      const double f = shrink(rng);
      for (int i = 0; i < len; ++i) rho[(start + i) % w] *= f;
    }

    Keyframe kf;
    kf.index = static_cast<int>(k);
    kf.layout.image_width = w;
    kf.layout.phi.resize(w);
    for (int j = 0; j < w; ++j) {
      double phi = std::atan2(h, rho[j]);
      if (spec.noise.sigma_phi > 0) phi += spec.noise.sigma_phi * gauss(rng);
      kf.layout.phi[j] = std::clamp(phi, 1e-4, kPi / 2 - 1e-4);
      if (hit[j] != hit[(j + w - 1) % w]) kf.layout.wall_corner_columns.push_back(j);
    }

    kf.pose.rotation = r0t * truth.rotation;
    kf.pose.translation = r0t * (truth.translation - c0) / spec.true_scale;
    if (spec.noise.sigma_t > 0) {
      kf.pose.translation.x() += spec.noise.sigma_t * gauss(rng);
      kf.pose.translation.z() += spec.noise.sigma_t * gauss(rng);
    }
    kf.pose.timestamp = static_cast<std::int64_t>(k);

    out.keyframes.push_back(std::move(kf));
    out.truth.poses.push_back(truth);
    out.truth.labels.push_back(room);
  }
  return out;
}

// -----------------------------------------------------------------------------
// Random scenes
// -----------------------------------------------------------------------------

namespace {

constexpr double kMinDoor = 1.5;
constexpr double kDoorInset = 0.3;

RoomPolygon make_room(const Vec2& lo, double w, double d, bool l_shape, double notch_w, double notch_d) {
  RoomPolygon r;
  const double x0 = lo.x(), z0 = lo.y(), x1 = lo.x() + w, z1 = lo.y() + d;
  if (!l_shape) {
    r.corners = {{x0, z0}, {x1, z0}, {x1, z1}, {x0, z1}};
  } else {
    const double xn = x1 - notch_w, zn = z1 - notch_d;
    r.corners = {{x0, z0}, {x1, z0}, {x1, zn}, {xn, zn}, {xn, z1}, {x0, z1}};
  }
  return r;
}

Vec2 outward(const Vec2& a, const Vec2& b) {
  const Vec2 d = (b - a).normalized();
  return {d.y(), -d.x()};
}

// Interior point farthest from the walls, on a 0.1 lattice.
Vec2 room_center(const RoomPolygon& room, double& clearance) {
  const auto box = *bounding_box(room.corners);
  Vec2 best = 0.5 * (box.min + box.max);
  clearance = -1;
  for (double x = box.min.x() + 0.05; x < box.max.x(); x += 0.1) {
    for (double z = box.min.y() + 0.05; z < box.max.y(); z += 0.1) {
      const Vec2 p(x, z);
      if (!point_in_polygon(p, room)) continue;
      double dmin = std::numeric_limits<double>::infinity();
      const std::size_t n = room.corners.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = room.corners[i];
        const Vec2 e = room.corners[(i + 1) % n] - a;
        const double t = std::clamp((p - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
        dmin = std::min(dmin, (a + t * e - p).norm());
      }
      if (dmin > clearance) {
        clearance = dmin;
        best = p;
      }
    }
  }
  return best;
}

bool segment_inside(const Vec2& a, const Vec2& b, const RoomPolygon& room, double margin) {
  const int steps = std::max(2, static_cast<int>(std::ceil((b - a).norm() / 0.05)));
  for (int i = 0; i <= steps; ++i) {
    const Vec2 p = a + (b - a) * (static_cast<double>(i) / steps);
    if (!point_in_polygon(p, room)) return false;
    const std::size_t n = room.corners.size();
    for (std::size_t k = 0; k < n; ++k) {
      const Vec2 c = room.corners[k];
      const Vec2 e = room.corners[(k + 1) % n] - c;
      const double t = std::clamp((p - c).dot(e) / e.squaredNorm(), 0.0, 1.0);
      if ((c + t * e - p).norm() < margin) return false;
    }
  }
  return true;
}

struct Door {
  Vec2 from_side;  // inset point in the older room
  Vec2 to_side;    // inset point in the newer room
};

// Longest overlap between edge (a, b) of one room and an opposite collinear
// edge of `other`; returns the overlap midpoint.
bool shared_door(const Vec2& a, const Vec2& b, const RoomPolygon& other, Vec2& mid) {
  const Vec2 n = outward(a, b);
  const Vec2 dir = (b - a).normalized();
  double best = 0.0;
  const std::size_t m = other.corners.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 c = other.corners[i];
    const Vec2 d = other.corners[(i + 1) % m];
    if (std::abs(n.dot(c - a)) > 1e-9 || std::abs(n.dot(d - a)) > 1e-9) continue;
    if (outward(c, d).dot(n) > -0.5) continue;
    const double s0 = std::max(0.0, std::min(dir.dot(c - a), dir.dot(d - a)));
    const double s1 = std::min((b - a).norm(), std::max(dir.dot(c - a), dir.dot(d - a)));
    if (s1 - s0 > best) {
      best = s1 - s0;
      mid = a + dir * (0.5 * (s0 + s1));
    }
  }
  return best >= kMinDoor;
}

void append_loop(std::vector<Vec2>& path, const Vec2& center, double radius) {
  constexpr int kSteps = 24;
  for (int i = 0; i <= kSteps; ++i) {
    const double a = 2.0 * kPi * i / kSteps;
    path.push_back(center + radius * Vec2(std::cos(a), std::sin(a)));
  }
}

void sample_path(const std::vector<Vec2>& path, int room, double spacing, std::vector<Waypoint>& out) {
  if (path.empty()) return;
  out.push_back({path.front(), room});
  double carry = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Vec2 a = path[i - 1];
    const Vec2 seg = path[i] - a;
    const double len = seg.norm();
    double s = spacing - carry;
    while (s <= len) {
      out.push_back({a + seg * (s / len), room});
      s += spacing;
    }
    carry = len - (s - spacing);
  }
}

}  // namespace

SceneSpec random_scene(const SceneParams& params) {
  if (params.room_count < 1) throw InputError("room count must be at least 1");
  if (!(params.min_side >= 2.0 && params.max_side >= params.min_side)) throw InputError("bad room size range");
  if (!(params.spacing > 0)) throw InputError("keyframe spacing must be positive");
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> side(params.min_side, params.max_side);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> notch_frac(0.3, 0.5);

  auto random_room = [&](const Vec2& lo) {
    const double w = side(rng), d = side(rng);
    const bool l = unit(rng) < params.l_shape_prob;
    return make_room(lo, w, d, l, w * notch_frac(rng), d * notch_frac(rng));
  };

  SceneSpec spec;
  spec.true_scale = params.true_scale;
  spec.noise = params.noise;
  spec.width = params.width;
  spec.seed = params.seed;
  spec.rooms.push_back(random_room(Vec2::Zero()));
  std::vector<Door> doors;  // doors[k] joins room k and room k + 1
  std::vector<Vec2> centers;
  std::vector<double> radii;
  auto add_center = [&](const RoomPolygon& r) {
    double clearance = 0;
    centers.push_back(room_center(r, clearance));
    radii.push_back(std::min(1.0, 0.5 * clearance));
  };
  add_center(spec.rooms[0]);

  for (int k = 1; k < params.room_count; ++k) {
    const RoomPolygon& prev = spec.rooms.back();
    bool placed = false;
    for (int attempt = 0; attempt < 500 && !placed; ++attempt) {
      const std::size_t n = prev.corners.size();
      const std::size_t e = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
      const Vec2 a = prev.corners[e];
      const Vec2 b = prev.corners[(e + 1) % n];
      if ((b - a).norm() < kMinDoor + 0.5) continue;
      const Vec2 nrm = outward(a, b);
      RoomPolygon cand = random_room(Vec2::Zero());
      const auto box = *bounding_box(cand.corners);
      const Vec2 size = box.max - box.min;
      // Slide the candidate along the edge so that it touches the edge line.
      const bool horizontal = std::abs(nrm.y()) > 0.5;
      const int axis = horizontal ? 0 : 1;
      const double e0 = std::min(a[axis], b[axis]);
      const double e1 = std::max(a[axis], b[axis]);
      const double lo_s = e0 - size[axis] + kMinDoor;
      const double hi_s = e1 - kMinDoor;
      if (hi_s <= lo_s) continue;
      const double s = std::uniform_real_distribution<double>(lo_s, hi_s)(rng);
      Vec2 lo;
      lo[axis] = s;
      lo[1 - axis] = nrm[1 - axis] > 0 ? a[1 - axis] : a[1 - axis] - size[1 - axis];
      for (auto& c : cand.corners) c += lo;

      Vec2 mid;
      if (!shared_door(a, b, cand, mid)) continue;
      bool clash = false;
      for (const auto& r : spec.rooms) clash = clash || polygon_iou(cand, r, 0.05) > 0;
      if (clash) continue;

      Door door{mid - kDoorInset * nrm, mid + kDoorInset * nrm};
      double clearance = 0;
      const Vec2 center = room_center(cand, clearance);
      const double radius = std::min(1.0, 0.5 * clearance);
      if (radius < 0.3) continue;
      const Vec2 start_new = center + Vec2(radius, 0.0);
      const Vec2 start_prev = centers.back() + Vec2(radii.back(), 0.0);
      if (!segment_inside(door.to_side, start_new, cand, 0.05)) continue;
      if (!segment_inside(start_prev, door.from_side, prev, 0.05)) continue;
      if (k >= 2 && !segment_inside(doors.back().to_side, start_prev, prev, 0.05)) continue;

      spec.rooms.push_back(std::move(cand));
      doors.push_back(door);
      centers.push_back(center);
      radii.push_back(radius);
      placed = true;
    }
    if (!placed) throw DegenerateError("could not attach room " + std::to_string(k));
  }

  // Path: loop inside every room, walking door to door.
  const int count = static_cast<int>(spec.rooms.size());
  for (int k = 0; k < count; ++k) {
    std::vector<Vec2> path;
    if (k > 0) path.push_back(doors[k - 1].to_side);
    append_loop(path, centers[k], radii[k]);
    if (k + 1 < count) {
      path.push_back(doors[k].from_side);
    } else if (params.revisit && count >= 2) {
      path.push_back(doors[k - 1].to_side);
    }
    sample_path(path, k, params.spacing, spec.trajectory);
  }
  if (params.revisit && count >= 2) {
    std::vector<Vec2> path{doors[count - 2].from_side};
    append_loop(path, centers[count - 2], radii[count - 2]);
    sample_path(path, count - 2, params.spacing, spec.trajectory);
  }
  spec.dwell.assign(spec.rooms.size(), 0);
  for (const auto& wp : spec.trajectory) ++spec.dwell[static_cast<std::size_t>(wp.room)];
  return spec;
}

}  // namespace floorplan
