#include "floorplan/error.hpp"
#include "floorplan/layout.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace floorplan {
namespace {

// Width 4: columns sit at azimuths -pi, -pi/2, 0, pi/2.
RawLayout four_columns(double phi) {
  RawLayout raw;
  raw.image_width = 4;
  raw.phi.assign(4, phi);
  return raw;
}

RawLayout random_layout(std::mt19937_64& rng, int width) {
  std::uniform_real_distribution<double> phi(0.1, 1.4);
  RawLayout raw;
  raw.image_width = width;
  for (int j = 0; j < width; ++j) raw.phi.push_back(phi(rng));
  raw.wall_corner_columns = {width / 5, width / 2, 4 * width / 5};
  return raw;
}

TEST(ColumnAzimuth, UniformFromMinusPi) {
  EXPECT_DOUBLE_EQ(column_azimuth(0, 512), -kPi);
  EXPECT_NEAR(column_azimuth(256, 512), 0.0, 1e-15);
  EXPECT_NEAR(column_azimuth(384, 512), kPi / 2, 1e-15);
}

TEST(ProjectBoundary, Fixtures) {
  const auto b = project_boundary(four_columns(kPi / 4), 1.0);
  ASSERT_EQ(b.points.size(), 4u);
  EXPECT_EQ(b.frame, Frame::kCamera);
  EXPECT_TRUE(b.points[2].position.isApprox(Vec3(0, -1, 1), 1e-12));
  EXPECT_NEAR((b.points[3].position - Vec3(1, -1, 0)).norm(), 0.0, 1e-12);
  EXPECT_EQ(b.points[3].source_column, 3);

  const auto far = project_boundary(four_columns(std::atan(1.0 / 3.0)), 1.0);
  EXPECT_NEAR((far.points[2].position - Vec3(0, -1, 3)).norm(), 0.0, 1e-12);
}

TEST(ProjectBoundary, FloorDistanceIsHeightTimesCot) {
  std::mt19937_64 rng(1);
  const RawLayout raw = random_layout(rng, 64);
  for (double h : {0.5, 1.0, 1.7}) {
    const auto b = project_boundary(raw, h);
    for (std::size_t j = 0; j < raw.phi.size(); ++j) {
      const Vec3& x = b.points[j].position;
      EXPECT_DOUBLE_EQ(x.y(), -h);
      EXPECT_NEAR(std::hypot(x.x(), x.z()), h / std::tan(raw.phi[j]), 1e-9);
    }
    EXPECT_EQ(b.wall_splits, raw.wall_corner_columns);
  }
}

TEST(ProjectBoundary, RejectsBadInput) {
  EXPECT_THROW(project_boundary(four_columns(0.0), 1.0), InputError);
  EXPECT_THROW(project_boundary(four_columns(kPi / 2), 1.0), InputError);
  EXPECT_THROW(project_boundary(four_columns(-0.3), 1.0), InputError);
  EXPECT_THROW(project_boundary(four_columns(0.5), 0.0), InputError);
  RawLayout splits = four_columns(0.5);
  splits.wall_corner_columns = {2, 1};
  EXPECT_THROW(project_boundary(splits, 1.0), InputError);
  RawLayout width = four_columns(0.5);
  width.image_width = 5;
  EXPECT_THROW(project_boundary(width, 1.0), InputError);
}

TEST(RegisterBoundary, IdentityLeavesPointsAlone) {
  std::mt19937_64 rng(2);
  const auto cam = project_boundary(random_layout(rng, 32), 1.0);
  for (double s : {0.3, 1.0, 4.0}) {
    const auto w = register_boundary(cam, Pose{}, s);
    EXPECT_EQ(w.frame, Frame::kWorld);
    for (std::size_t i = 0; i < cam.points.size(); ++i) {
      EXPECT_EQ(w.points[i].position, cam.points[i].position);
    }
  }
}

TEST(RegisterBoundary, TranslationScaledByS) {
  std::mt19937_64 rng(3);
  const auto cam = project_boundary(random_layout(rng, 32), 1.0);
  const Pose pose = Pose::from_yaw(0.0, Vec3(1, 0, 0));
  const auto w = register_boundary(cam, pose, 2.0);
  for (std::size_t i = 0; i < cam.points.size(); ++i) {
    EXPECT_NEAR((w.points[i].position - cam.points[i].position - Vec3(2, 0, 0)).norm(), 0.0, 1e-12);
  }
  EXPECT_EQ(w.wall_splits, cam.wall_splits);
}

TEST(RegisterBoundary, QuarterTurnYaw) {
  const auto cam = project_boundary(four_columns(kPi / 4), 1.0);
  const auto w = register_boundary(cam, Pose::from_yaw(kPi / 2, Vec3::Zero()), 1.0);
  EXPECT_NEAR((w.points[2].position - Vec3(1, -1, 0)).norm(), 0.0, 1e-12);
}

TEST(RegisterBoundary, RigidForFixedScale) {
  std::mt19937_64 rng(4);
  const auto cam = project_boundary(random_layout(rng, 48), 1.0);
  const Pose pose = Pose::from_yaw(1.1, Vec3(0.4, 0.0, -2.0));
  const auto w = register_boundary(cam, pose, 1.3);
  for (std::size_t i = 0; i < cam.points.size(); i += 5) {
    for (std::size_t j = i + 1; j < cam.points.size(); j += 7) {
      const double before = (cam.points[i].position - cam.points[j].position).norm();
      const double after = (w.points[i].position - w.points[j].position).norm();
      EXPECT_NEAR(before, after, 1e-9);
    }
  }
}

TEST(RegisterBoundary, TranslationOffsetLinearInScale) {
  std::mt19937_64 rng(5);
  const auto cam = project_boundary(random_layout(rng, 48), 1.0);
  const Pose pose = Pose::from_yaw(-0.6, Vec3(1.5, 0.0, 0.7));
  const Pose still = Pose::from_yaw(-0.6, Vec3::Zero());
  auto centroid = [](const LayoutBoundary& b) {
    Vec3 c = Vec3::Zero();
    for (const auto& p : b.points) c += p.position;
    return Vec3(c / static_cast<double>(b.points.size()));
  };
  const Vec3 base = centroid(register_boundary(cam, still, 1.0));
  const Vec3 d1 = centroid(register_boundary(cam, pose, 1.1)) - base;
  const Vec3 d2 = centroid(register_boundary(cam, pose, 2.2)) - base;
  EXPECT_NEAR((d2 - 2.0 * d1).norm(), 0.0, 1e-12);
  EXPECT_THROW(register_boundary(cam, pose, 0.0), InputError);
}

TEST(WallSubsets, WrapAroundJoinsEnds) {
  std::mt19937_64 rng(6);
  RawLayout raw = random_layout(rng, 20);
  raw.wall_corner_columns = {3, 9, 15};
  const auto b = project_boundary(raw, 1.0);
  const auto subsets = b.wall_subsets();
  ASSERT_EQ(subsets.size(), 3u);
  std::vector<int> seen(20, 0);
  for (const auto& s : subsets) {
    for (int i : s) ++seen[static_cast<std::size_t>(i)];
  }
  for (int n : seen) EXPECT_EQ(n, 1);
  // Columns 15..19 and 0..2 form one wall.
  EXPECT_EQ(subsets.back(), (std::vector<int>{15, 16, 17, 18, 19, 0, 1, 2}));
}

}  // namespace
}  // namespace floorplan
