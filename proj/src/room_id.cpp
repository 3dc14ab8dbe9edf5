#include "floorplan/room_id.hpp"

#include "floorplan/error.hpp"

#include <algorithm>
#include <cmath>

namespace floorplan {

void ClipConfig::validate() const {
  if (!(radius > 0)) throw InputError("room.clip_radius must be positive");
  if (!(threshold > 0 && threshold < 1)) throw InputError("room.threshold must be in (0, 1)");
  if (patience < 1) throw InputError("room.patience must be at least 1");
  if (!(cell_size > 0)) throw InputError("room.cell_size must be positive");
}

std::vector<Vec2> clip_boundary(const LayoutBoundary& camera_boundary, const Pose& pose, double scale,
                                double radius) {
  if (!(radius > 0)) throw InputError("clip radius must be positive");
  if (!(scale > 0)) throw InputError("scale must be positive");
  std::vector<Vec2> loop;
  loop.reserve(camera_boundary.points.size());
  const Vec3 offset = scale * pose.translation;
  for (const auto& p : camera_boundary.points) {
    Vec3 x = p.position;
    const double n = x.norm();
    if (n > radius) x *= radius / n;
    const Vec3 w = pose.rotation * x + offset;
    loop.emplace_back(w.x(), w.z());
  }
  return loop;
}

namespace {

// Integer cell range [u0, u1] x [v0, v1] on the world lattice of `cell_size`.
struct CellRange {
  long u0, v0, u1, v1;
};

CellRange lattice_range(const DensityGrid& g) {
  const long u0 = std::lround(g.origin().x() / g.cell_size());
  const long v0 = std::lround(g.origin().y() / g.cell_size());
  return {u0, v0, u0 + g.cols() - 1, v0 + g.rows() - 1};
}

DensityGrid grow_to(const DensityGrid& g, const CellRange& want, double cell_size) {
  GridSpec spec;
  spec.cell_size = cell_size;
  spec.origin = Vec2(static_cast<double>(want.u0) * cell_size, static_cast<double>(want.v0) * cell_size);
  spec.cols = static_cast<int>(want.u1 - want.u0 + 1);
  spec.rows = static_cast<int>(want.v1 - want.v0 + 1);
  DensityGrid out(spec);
  if (!g.empty()) {
    const CellRange have = lattice_range(g);
    for (int v = 0; v < g.rows(); ++v) {
      for (int u = 0; u < g.cols(); ++u) {
        const Cell dst{static_cast<int>(have.u0 - want.u0) + u, static_cast<int>(have.v0 - want.v0) + v};
        out.at(dst) = g.at({u, v});
      }
    }
  }
  return out;
}

}  // namespace

void update_density(RoomState& room, std::span<const Vec2> loop, double cell_size) {
  if (loop.size() < 3) throw InputError("clipped boundary is not a closed loop");
  const auto box = bounding_box(loop);
  CellRange want{static_cast<long>(std::floor(box->min.x() / cell_size)) - 1,
                 static_cast<long>(std::floor(box->min.y() / cell_size)) - 1,
                 static_cast<long>(std::floor(box->max.x() / cell_size)) + 1,
                 static_cast<long>(std::floor(box->max.y() / cell_size)) + 1};
  if (!room.density.empty()) {
    const CellRange have = lattice_range(room.density);
    if (want.u0 >= have.u0 && want.v0 >= have.v0 && want.u1 <= have.u1 && want.v1 <= have.v1) {
      want = have;
    } else {
      want = {std::min(want.u0, have.u0), std::min(want.v0, have.v0), std::max(want.u1, have.u1),
              std::max(want.v1, have.v1)};
      room.density = grow_to(room.density, want, cell_size);
    }
  } else {
    room.density = grow_to(room.density, want, cell_size);
  }

  DensityGrid& h = room.density;
  const double n = static_cast<double>(room.frame_count);
  const double keep = n / (n + 1.0);
  const double add = 1.0 / (n + 1.0);
  for (double& v : h.values()) v *= keep;

  // Scanline fill of the loop interior at cell centers (even-odd rule).
  std::vector<double> xs;
  const std::size_t m = loop.size();
  for (int v = 0; v < h.rows(); ++v) {
    const double z = h.origin().y() + (v + 0.5) * cell_size;
    xs.clear();
    for (std::size_t i = 0, j = m - 1; i < m; j = i++) {
      const Vec2& a = loop[i];
      const Vec2& b = loop[j];
      if ((a.y() > z) != (b.y() > z)) xs.push_back(a.x() + (z - a.y()) * (b.x() - a.x()) / (b.y() - a.y()));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int ua = std::max(0, static_cast<int>(std::ceil((xs[k] - h.origin().x()) / cell_size - 0.5)));
      const int ub = std::min(h.cols() - 1, static_cast<int>(std::floor((xs[k + 1] - h.origin().x()) / cell_size - 0.5)));
      for (int u = ua; u <= ub; ++u) h.at({u, v}) += add;
    }
  }
  for (double& v : h.values()) v = std::min(1.0, v);
  ++room.frame_count;
}

RoomDecision identify(const Vec2& camera, std::span<const RoomState> rooms, const ClipConfig& config) {
  const RoomState* active = nullptr;
  for (const auto& r : rooms) {
    if (r.status == RoomStatus::kActive) active = &r;
  }
  if (active && !active->density.empty()) {
    if (active->density.value_or(active->density.cell_of(camera), 0.0) >= config.threshold) {
      return {RoomDecision::Kind::kStay, active->room_id};
    }
  }
  int best_id = -1;
  double best_value = -1.0;
  for (const auto& r : rooms) {
    if (&r == active || r.density.empty()) continue;
    const double h = r.density.value_or(r.density.cell_of(camera), 0.0);
    if (h < config.threshold) continue;
    if (h > best_value || (h == best_value && r.room_id < best_id)) {
      best_value = h;
      best_id = r.room_id;
    }
  }
  if (best_id >= 0) return {RoomDecision::Kind::kReenter, best_id};
  return {RoomDecision::Kind::kCreateNew, -1};
}

std::vector<int> finalize_rooms(std::vector<RoomState>& rooms, int patience, bool end_of_stream) {
  std::vector<int> out;
  for (auto& r : rooms) {
    if (r.status == RoomStatus::kFinalized) continue;
    if (end_of_stream || (r.status == RoomStatus::kDormant && r.frames_away >= patience)) {
      r.status = RoomStatus::kFinalized;
      out.push_back(r.room_id);
    }
  }
  return out;
}

RoomTracker::RoomTracker(ClipConfig config) : config_(config) { config_.validate(); }

RoomTracker::Step RoomTracker::process(const Vec2& camera, std::span<const Vec2> clipped_loop,
                                       LayoutBoundary world_boundary) {
  Step step;
  if (rooms_.empty()) {
    step.decision = {RoomDecision::Kind::kCreateNew, -1};
  } else {
    step.decision = identify(camera, rooms_, config_);
  }

  int target = -1;
  switch (step.decision.kind) {
    case RoomDecision::Kind::kStay:
      target = active_;
      break;
    case RoomDecision::Kind::kReenter:
      target = step.decision.room_id;
      if (rooms_[target].status == RoomStatus::kFinalized) step.reopened = target;
      break;
    case RoomDecision::Kind::kCreateNew: {
      RoomState fresh;
      fresh.room_id = static_cast<int>(rooms_.size());
      rooms_.push_back(std::move(fresh));
      target = rooms_.back().room_id;
      step.decision.room_id = target;
      break;
    }
  }
  if (active_ >= 0 && active_ != target) {
    rooms_[active_].status = RoomStatus::kDormant;
    rooms_[active_].frames_away = 0;
  }
  RoomState& room = rooms_[target];
  room.status = RoomStatus::kActive;
  room.frames_away = 0;
  active_ = target;

  update_density(room, clipped_loop, config_.cell_size);
  room.boundary_archive.push_back(std::move(world_boundary));

  for (auto& r : rooms_) {
    if (r.status == RoomStatus::kDormant) ++r.frames_away;
  }
  step.finalized = finalize_rooms(rooms_, config_.patience, false);
  step.room_id = target;
  assignments_.push_back(target);
  return step;
}

std::vector<int> RoomTracker::finish() {
  active_ = -1;
  return finalize_rooms(rooms_, config_.patience, true);
}

}  // namespace floorplan
