#include "floorplan/plane_filter.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace floorplan {

double PlaneWallFeature::orientation() const { return std::atan2(normal.y(), normal.x()); }

namespace {

struct Line {
  Vec2 normal;
  double offset;
};

int count_inliers(std::span<const Vec2> pts, const Line& line, double tol) {
  int n = 0;
  for (const auto& p : pts) {
    if (std::abs(line.normal.dot(p) - line.offset) <= tol) ++n;
  }
  return n;
}

bool line_through(const Vec2& a, const Vec2& b, Line& out) {
  const Vec2 d = b - a;
  const double len = d.norm();
  if (len == 0.0) return false;
  out.normal = Vec2(-d.y(), d.x()) / len;
  out.offset = out.normal.dot(a);
  return true;
}

// Total least squares: normal is the minor principal axis of the inliers.
Line refit(std::span<const Vec2> pts, const Line& model, double tol) {
  Vec2 centroid = Vec2::Zero();
  int n = 0;
  for (const auto& p : pts) {
    if (std::abs(model.normal.dot(p) - model.offset) <= tol) {
      centroid += p;
      ++n;
    }
  }
  if (n < 2) return model;
  centroid /= n;
  Mat2 cov = Mat2::Zero();
  for (const auto& p : pts) {
    if (std::abs(model.normal.dot(p) - model.offset) <= tol) cov += (p - centroid) * (p - centroid).transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat2> eig(cov);
  Line line{eig.eigenvectors().col(0).normalized(), 0.0};
  line.offset = line.normal.dot(centroid);
  return line;
}

}  // namespace

PlaneWallFeature fit_wall(std::span<const Vec2> points, const RansacConfig& config, const Vec2& camera) {
  PlaneWallFeature f;
  f.points.assign(points.begin(), points.end());
  const std::size_t n = points.size();
  if (n < 2) return f;

  Line best{};
  int best_count = -1;
  auto consider = [&](std::size_t i, std::size_t j) {
    Line l;
    if (!line_through(points[i], points[j], l)) return;
    const int c = count_inliers(points, l, config.max_residual);
    if (c > best_count) {
      best_count = c;
      best = l;
    }
  };

  const std::size_t pairs = n * (n - 1) / 2;
  if (pairs <= static_cast<std::size_t>(config.iterations)) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) consider(i, j);
    }
  } else {
    std::mt19937_64 rng(config.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (int it = 0; it < config.iterations; ++it) {
      const std::size_t i = pick(rng);
      std::size_t j = pick(rng);
      while (j == i) j = pick(rng);
      consider(i, j);
    }
  }
  if (best_count < 0) return f;  // all points coincide

  Line line = refit(points, best, config.max_residual);
  int inliers = count_inliers(points, line, config.max_residual);
  if (inliers < best_count) {
    line = best;
    inliers = best_count;
  }
  double side = line.normal.dot(camera) - line.offset;
  if (side < 0) {
    line.normal = -line.normal;
    line.offset = -line.offset;
    side = -side;
  }
  f.normal = line.normal;
  f.offset = line.offset;
  f.distance = side;
  f.inlier_ratio = static_cast<double>(inliers) / static_cast<double>(n);
  f.valid = f.inlier_ratio >= config.inlier_ratio_min;
  return f;
}

void fuse_orientation(std::vector<OrientationPosterior>& posteriors, double theta, double measurement_spread,
                      const OrientationConfig& config) {
  const double measured = reduce_mod_pi(theta);
  OrientationPosterior* match = nullptr;
  double match_diff = 0.0;
  for (auto& p : posteriors) {
    const double diff = wrap_half_turn(measured - p.mean);
    if (std::abs(diff) <= config.gate && (!match || std::abs(diff) < std::abs(match_diff))) {
      match = &p;
      match_diff = diff;
    }
  }
  if (!match) {
    posteriors.push_back({measured, config.initial_spread, 1});
    return;
  }
  const double fused = 1.0 / (1.0 / match->spread + 1.0 / measurement_spread);
  match->mean = reduce_mod_pi(match->mean + fused / measurement_spread * match_diff);
  match->spread = fused;
  ++match->observation_count;
}

void update_orientation(std::vector<OrientationPosterior>& posteriors, double theta, double distance,
                        const OrientationConfig& config) {
  fuse_orientation(posteriors, theta, config.sigma0 + config.lambda * distance, config);
}

std::vector<double> likely_orientations(std::span<const OrientationPosterior> posteriors,
                                        const OrientationConfig& config) {
  std::vector<double> out;
  for (const auto& p : posteriors) {
    if (p.spread < config.accept) out.push_back(reduce_mod_pi(p.mean));
  }
  return out;
}

}  // namespace floorplan
