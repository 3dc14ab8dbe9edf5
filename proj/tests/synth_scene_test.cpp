#include "floorplan/error.hpp"
#include "floorplan/io.hpp"
#include "floorplan/layout.hpp"
#include "floorplan/synth_scene.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace floorplan {
namespace {

RoomPolygon square(double half) { return RoomPolygon{{{-half, -half}, {half, -half}, {half, half}, {-half, half}}, 0}; }

double distance_to_boundary(const Vec2& p, const std::vector<Vec2>& poly) {
  double best = 1e18;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % poly.size()];
    const double t = std::clamp((p - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
    best = std::min(best, (a + t * (b - a) - p).norm());
  }
  return best;
}

std::string stream_bytes(const SceneStream& s) {
  std::ostringstream out;
  write_stream(out, s.keyframes);
  write_ground_truth(out, s.truth);
  return out.str();
}

TEST(Generate, CenterOfSquareRoom) {
  SceneSpec spec;
  spec.rooms = {square(2.0)};
  spec.trajectory = {{{0, 0}, 0}};
  const SceneStream s = generate(spec);
  ASSERT_EQ(s.keyframes.size(), 1u);
  const RawLayout& raw = s.keyframes[0].layout;
  const double yaw = std::atan2(s.truth.poses[0].rotation(0, 2), s.truth.poses[0].rotation(0, 0));
  double max_phi = 0.0;
  for (int j = 0; j < raw.image_width; ++j) {
    const double a = column_azimuth(j, raw.image_width) + yaw;
    const double rho = 2.0 / std::max(std::abs(std::sin(a)), std::abs(std::cos(a)));
    EXPECT_NEAR(std::tan(raw.phi[static_cast<std::size_t>(j)]), 1.0 / rho, 1e-9);
    max_phi = std::max(max_phi, raw.phi[static_cast<std::size_t>(j)]);
  }
  // The column facing a wall head on sees it at arctan(1/2).
  EXPECT_NEAR(max_phi, std::atan(0.5), 1e-4);
  EXPECT_EQ(raw.wall_corner_columns.size(), 4u);
}

TEST(Generate, NoiselessRoundTripLandsOnWalls) {
  SceneParams p;
  p.room_count = 3;
  p.true_scale = 1.8;
  p.seed = 11;
  const SceneStream s = generate(random_scene(p));
  ASSERT_EQ(s.keyframes.size(), s.truth.poses.size());
  for (std::size_t i = 0; i < s.keyframes.size(); i += 3) {
    const auto cam = project_boundary(s.keyframes[i].layout, 1.0);
    const auto world = register_boundary(cam, s.truth.poses[i], 1.0);
    const auto& room = s.truth.rooms[static_cast<std::size_t>(s.truth.labels[i])].corners;
    for (const Vec2& x : world.floor_points()) EXPECT_LT(distance_to_boundary(x, room), 1e-6);
  }
}

TEST(Generate, OdometryIsFirstCameraFrameOverScale) {
  SceneParams p;
  p.room_count = 2;
  p.true_scale = 2.5;
  p.seed = 12;
  const SceneStream s = generate(random_scene(p));
  const Pose& g0 = s.truth.poses[0];
  for (std::size_t i = 0; i < s.keyframes.size(); ++i) {
    const Pose& gi = s.truth.poses[i];
    const Pose& od = s.keyframes[i].pose;
    EXPECT_TRUE(od.rotation.isApprox(g0.rotation.transpose() * gi.rotation, 1e-12));
    const Vec3 expect = g0.rotation.transpose() * (gi.translation - g0.translation) / 2.5;
    EXPECT_NEAR((od.translation - expect).norm(), 0.0, 1e-12);
  }
}

TEST(Generate, FixedSeedIsByteIdentical) {
  SceneParams p;
  p.room_count = 4;
  p.noise = {0.01, 0.02, 0.3};
  p.seed = 13;
  const std::string a = stream_bytes(generate(random_scene(p)));
  const std::string b = stream_bytes(generate(random_scene(p)));
  EXPECT_EQ(a, b);
  p.seed = 14;
  EXPECT_NE(a, stream_bytes(generate(random_scene(p))));
}

TEST(Generate, LabelsAgreeWithContainment) {
  for (std::uint64_t seed : {15u, 16u, 17u}) {
    SceneParams p;
    p.room_count = 5;
    p.seed = seed;
    const SceneStream s = generate(random_scene(p));
    ASSERT_EQ(s.truth.labels.size(), s.keyframes.size());
    for (std::size_t i = 0; i < s.truth.labels.size(); ++i) {
      const Vec2 c = s.truth.poses[i].position2d(1.0);
      const int label = s.truth.labels[i];
      EXPECT_TRUE(point_in_polygon(c, s.truth.rooms[static_cast<std::size_t>(label)].corners));
      for (std::size_t r = 0; r < s.truth.rooms.size(); ++r) {
        if (static_cast<int>(r) != label) EXPECT_FALSE(point_in_polygon(c, s.truth.rooms[r].corners));
      }
    }
  }
}

TEST(RandomScene, RoomsAndRevisit) {
  SceneParams p;
  p.room_count = 6;
  p.seed = 18;
  const SceneSpec spec = random_scene(p);
  EXPECT_EQ(spec.rooms.size(), 6u);
  EXPECT_NO_THROW(spec.validate());
  // The walk ends back in the second-to-last room.
  EXPECT_EQ(spec.trajectory.back().room, 4);
  for (const auto& r : spec.rooms) EXPECT_TRUE(is_valid(r));
}

TEST(Generate, OcclusionOnlyShortensRays) {
  SceneParams p;
  p.room_count = 2;
  p.seed = 19;
  SceneSpec spec = random_scene(p);
  spec.noise.occlusion_prob = 1.0;
  const SceneStream s = generate(spec);
  int shortened = 0;
  for (std::size_t i = 0; i < s.keyframes.size(); ++i) {
    const Pose& g = s.truth.poses[i];
    const double yaw = std::atan2(g.rotation(0, 2), g.rotation(0, 0));
    const auto& room = s.truth.rooms[static_cast<std::size_t>(s.truth.labels[i])].corners;
    const RawLayout& raw = s.keyframes[i].layout;
    for (int j = 0; j < raw.image_width; ++j) {
      const double a = column_azimuth(j, raw.image_width) + yaw;
      double rho = 0;
      int edge = -1;
      ASSERT_TRUE(cast_ray(g.position2d(1.0), Vec2(std::sin(a), std::cos(a)), room, rho, edge));
      const double seen = 1.0 / std::tan(raw.phi[static_cast<std::size_t>(j)]);
      EXPECT_LE(seen, rho + 1e-9);
      shortened += seen < rho - 1e-6;
    }
  }
  EXPECT_GT(shortened, 0);
}

TEST(SceneSpecValidate, RejectsBadScenes) {
  SceneSpec spec;
  spec.rooms = {square(2.0)};
  spec.trajectory = {{{5, 5}, 0}};
  EXPECT_THROW(spec.validate(), InputError);
  EXPECT_THROW(generate(spec), InputError);

  spec.trajectory = {{{0, 0}, 0}};
  spec.true_scale = 0.0;
  EXPECT_THROW(spec.validate(), InputError);

  spec.true_scale = 1.0;
  spec.rooms.push_back(RoomPolygon{{{1, 1}, {4, 1}, {4, 4}, {1, 4}}, 1});
  EXPECT_THROW(spec.validate(), InputError);

  SceneSpec cw;
  cw.rooms = {RoomPolygon{{{-1, -1}, {-1, 1}, {1, 1}, {1, -1}}, 0}};
  cw.trajectory = {{{0, 0}, 0}};
  EXPECT_THROW(cw.validate(), InputError);
}

TEST(CastRay, HitsNearestEdge) {
  const RoomPolygon r = square(2.0);
  double d = 0;
  int e = -1;
  ASSERT_TRUE(cast_ray(Vec2(0.5, 0), Vec2(1, 0), r.corners, d, e));
  EXPECT_NEAR(d, 1.5, 1e-12);
  EXPECT_EQ(e, 1);
  EXPECT_FALSE(cast_ray(Vec2(5, 0), Vec2(1, 0), r.corners, d, e));
}

}  // namespace
}  // namespace floorplan
