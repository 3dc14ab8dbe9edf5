// Acceptance checks on synthetic scenes. One line per criterion:
//   [PASS] name: details
// Exit status is the number of failed criteria.

#include "floorplan/error.hpp"
#include "floorplan/layout.hpp"
#include "floorplan/metrics.hpp"
#include "floorplan/pipeline.hpp"
#include "floorplan/plane_filter.hpp"
#include "floorplan/room_shape.hpp"
#include "floorplan/scale_recovery.hpp"
#include "floorplan/synth_scene.hpp"

#include <Eigen/Geometry>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

using namespace floorplan;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("threw: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// Scale recovery

struct ScaleScene {
  double truth = 0.0;
  std::vector<LayoutBoundary> boundaries;
  std::vector<Pose> poses;
};

ScaleScene scale_scene(int k, double sigma_phi) {
  std::mt19937_64 rng(1000 + k);
  SceneParams p;
  p.room_count = 3;
  p.true_scale = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
  p.noise.sigma_phi = sigma_phi;
  p.seed = 1000 + k;
  const SceneStream scene = generate(random_scene(p));
  ScaleScene s;
  s.truth = p.true_scale;
  const std::size_t warm = warmup_count(scene.keyframes.size(), ScaleSearchConfig{});
  for (std::size_t i = 0; i < warm; ++i) {
    s.boundaries.push_back(project_boundary(scene.keyframes[i].layout, 1.0));
    s.poses.push_back(scene.keyframes[i].pose);
  }
  return s;
}

Outcome scale_recovery() {
  int clean_ok = 0, noisy_ok = 0;
  double worst_time = 0.0, worst_clean = 0.0;
  for (int k = 0; k < 20; ++k) {
    for (bool noisy : {false, true}) {
      const ScaleScene s = scale_scene(k, noisy ? 0.5 * kPi / 180 : 0.0);
      const auto t0 = Clock::now();
      const ScaleResult r = recover_scale(s.boundaries, s.poses, ScaleSearchConfig{});
      worst_time = std::max(worst_time, seconds_since(t0));
      const double err = std::abs(r.scale - s.truth);
      if (noisy) {
        noisy_ok += err <= 0.05;
      } else {
        clean_ok += err <= 0.01 + 1e-9;
        worst_clean = std::max(worst_clean, err);
      }
    }
  }
  return {clean_ok == 20 && noisy_ok >= 18 && worst_time <= 10.0,
          fmt("noiseless %d/20 within 0.01 (worst %.4f), 0.5 deg noise %d/20 within 0.05, slowest %.2f s", clean_ok,
              worst_clean, noisy_ok, worst_time)};
}

Outcome entropy_landscape() {
  int scenes_ok = 0;
  int tested = 0;
  std::string first_bad;
  for (int k = 0; k < 20; ++k) {
    const ScaleScene s = scale_scene(k, 0.0);
    const ScaleSearchConfig cfg;
    const std::span<const LayoutBoundary> wb(s.boundaries.data(), static_cast<std::size_t>(cfg.window));
    const std::span<const Pose> wp(s.poses.data(), static_cast<std::size_t>(cfg.window));
    const double at_truth = window_entropy(wb, wp, s.truth, cfg.cell_size);
    const ScaleResult r = recover_scale(s.boundaries, s.poses, cfg);
    bool ok = true;
    for (const auto& level : r.levels) {
      for (const auto& c : level) {
        if (std::abs(c.scale - s.truth) < 0.1) continue;
        ++tested;
        if (!(at_truth < window_entropy(wb, wp, c.scale, cfg.cell_size))) {
          ok = false;
          if (first_bad.empty()) first_bad = fmt("; scene %d s=%.2f truth=%.3f", k, c.scale, s.truth);
        }
      }
    }
    scenes_ok += ok;
  }
  return {scenes_ok == 20, fmt("%d/20 scenes have their first-window entropy minimum at the true scale (%d scales tested)%s",
                               scenes_ok, tested, first_bad.c_str())};
}

// ---------------------------------------------------------------------------
// Room identification

Outcome room_identification() {
  int exact = 0;
  double worst = 1.0;
  std::string counts;
  for (int k = 0; k < 10; ++k) {
    SceneParams p;
    p.room_count = 3 + k % 6;
    p.revisit = true;
    p.true_scale = 0.8 + 0.15 * k;
    p.noise.sigma_phi = 0.5 * kPi / 180;
    p.noise.sigma_t = 0.01;
    p.seed = 2000 + k;
    const SceneStream scene = generate(random_scene(p));
    const FloorPlanOutput out = run_pipeline(scene.keyframes, PipelineConfig{});
    const auto& gt = scene.truth.labels;

    // Each predicted room stands for the ground-truth room most of its keyframes are in.
    std::map<int, std::map<int, int>> votes;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      if (out.assignments[i] >= 0) ++votes[out.assignments[i]][gt[i]];
    }
    std::map<int, int> to_gt;
    for (const auto& [id, v] : votes) {
      int best = -1, n = -1;
      for (const auto& [label, c] : v) {
        if (c > n) best = label, n = c;
      }
      to_gt[id] = best;
    }
    int considered = 0, agree = 0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      bool near_door = false;
      for (std::size_t j = i >= 2 ? i - 2 : 0; j <= i + 2 && j < gt.size(); ++j) near_door = near_door || gt[j] != gt[i];
      if (near_door) continue;
      ++considered;
      agree += out.assignments[i] >= 0 && to_gt[out.assignments[i]] == gt[i];
    }
    const double rate = considered ? static_cast<double>(agree) / considered : 1.0;
    worst = std::min(worst, rate);
    exact += out.rooms.size() == scene.truth.rooms.size();
    counts += fmt(" %zu/%zu", out.rooms.size(), scene.truth.rooms.size());
  }
  return {worst >= 0.95 && exact >= 9,
          fmt("worst per-scene agreement %.3f outside doorway bands, exact room count %d/10 (found/true:%s)", worst, exact,
              counts.c_str())};
}

// ---------------------------------------------------------------------------
// Room shape

ShapeMaps random_mask_maps(std::mt19937_64& rng, int n) {
  GridSpec spec;
  spec.cols = spec.rows = n;
  ShapeMaps maps{DensityGrid(spec), DensityGrid(spec)};
  std::uniform_int_distribution<int> lo(2, n / 2 - 1), hi(n / 2 + 1, n - 3), any(2, n - 3);
  std::vector<std::array<int, 4>> rects = {{lo(rng), lo(rng), hi(rng), hi(rng)}};
  if (rng() % 2) {
    int u0 = any(rng), u1 = any(rng), v0 = any(rng), v1 = any(rng);
    if (u0 > u1) std::swap(u0, u1);
    if (v0 > v1) std::swap(v0, v1);
    rects.push_back({std::min(u0, rects[0][2] - 2), std::min(v0, rects[0][3] - 2), std::max(u1, rects[0][0] + 2),
                     std::max(v1, rects[0][1] + 2)});
  }
  for (int v = 0; v < n; ++v) {
    for (int u = 0; u < n; ++u) {
      for (const auto& r : rects) {
        if (u >= r[0] && u < r[2] && v >= r[1] && v < r[3]) maps.mask.at({u, v}) = 1.0;
      }
    }
  }
  // Wall evidence on the outside ring, with some dropout and clutter.
  std::uniform_real_distribution<double> unit(0, 1);
  for (int v = 0; v < n; ++v) {
    for (int u = 0; u < n; ++u) {
      bool ring = false;
      if (maps.mask.at({u, v}) < 0.5) {
        for (Cell c : {Cell{u + 1, v}, Cell{u - 1, v}, Cell{u, v + 1}, Cell{u, v - 1}}) {
          ring = ring || maps.mask.value_or(c, 0.0) >= 0.5;
        }
      }
      const double x = unit(rng);
      maps.plane.at({u, v}) = ring ? (x < 0.15 ? 0.3 : 1.0) : (x < 0.05 ? 0.5 : 0.0);
    }
  }
  return maps;
}

Outcome ispa_vs_oracle() {
  std::mt19937_64 rng(3000);
  const std::vector<double> axes = {0.0, kPi / 2};
  const SpaWeights w;
  int equal = 0, close = 0;
  double worst_gap = 0.0, worst_ratio = 0.0;
  for (int k = 0; k < 30; ++k) {
    const int n = 16 + k % 9;
    const ShapeMaps maps = random_mask_maps(rng, n);
    const CycleSolution oracle = oracle_shortest_cycle(maps, axes, w);
    if (!oracle.found) continue;
    IspaSchedule full;
    full.rounds = {{n, std::nullopt, 5}};
    IspaSchedule limited;
    limited.rounds = {{n, 8, 5}};
    const double c_full = solve_room(maps, axes, w, full).rounds[0].cost;
    const double c_lim = solve_room(maps, axes, w, limited).rounds[0].cost;
    const double gap = std::abs(c_full - oracle.cost);
    worst_gap = std::max(worst_gap, gap);
    equal += gap <= 1e-9;
    const double ratio = c_lim / oracle.cost - 1.0;
    worst_ratio = std::max(worst_ratio, ratio);
    close += ratio <= 0.10;
  }
  return {equal == 30 && close >= 27,
          fmt("unrestricted round equals oracle on %d/30 (max gap %.2e), limited round within 10%% on %d/30 (worst +%.1f%%)",
              equal, worst_gap, close, 100 * worst_ratio)};
}

struct CleanRoom {
  std::vector<Vec2> corners;
  RoomEvidence evidence;
  std::vector<double> orientations;
};

// Exact evidence for a rectangle or L-shaped room: indicator density on a
// 2 cm grid and wall points every centimeter.
CleanRoom clean_room(int k) {
  std::mt19937_64 rng(4000 + k);
  std::uniform_real_distribution<double> unit(0, 1);
  const double a = 2.5 + 2.5 * unit(rng), b = 2.5 + 2.5 * unit(rng);
  CleanRoom room;
  if (k % 3 == 2) {
    const double ca = a * (0.4 + 0.3 * unit(rng)), cb = b * (0.4 + 0.3 * unit(rng));
    room.corners = {{0, 0}, {a, 0}, {a, cb}, {ca, cb}, {ca, b}, {0, b}};
  } else {
    room.corners = {{0, 0}, {a, 0}, {a, b}, {0, b}};
  }
  const double th = 0.8 * (2 * unit(rng) - 1);
  const Eigen::Rotation2Dd rot(th);
  const Vec2 off(1 + unit(rng), -2 + unit(rng));
  for (auto& c : room.corners) c = rot * c + off;
  room.orientations = {reduce_mod_pi(th), reduce_mod_pi(th + kPi / 2)};

  Vec2 lo = room.corners[0], hi = room.corners[0];
  for (const auto& c : room.corners) lo = lo.cwiseMin(c), hi = hi.cwiseMax(c);
  GridSpec gs;
  gs.cell_size = 0.02;
  gs.origin = lo - Vec2(0.5, 0.5);
  gs.cols = static_cast<int>((hi.x() - lo.x() + 1) / gs.cell_size) + 1;
  gs.rows = static_cast<int>((hi.y() - lo.y() + 1) / gs.cell_size) + 1;
  room.evidence.density = DensityGrid(gs);
  for (int v = 0; v < gs.rows; ++v) {
    for (int u = 0; u < gs.cols; ++u) {
      if (point_in_polygon(room.evidence.density.cell_center({u, v}), room.corners)) room.evidence.density.at({u, v}) = 1;
    }
  }
  for (std::size_t i = 0; i < room.corners.size(); ++i) {
    const Vec2 p = room.corners[i], q = room.corners[(i + 1) % room.corners.size()];
    const int m = static_cast<int>((q - p).norm() / 0.01);
    for (int j = 0; j < m; ++j) room.evidence.wall_points.push_back(p + (q - p) * (j + 0.5) / m);
  }
  return room;
}

Outcome redundancy_removal() {
  int exact = 0;
  double round1 = 0.0, final_count = 0.0, worst_err = 0.0;
  for (int k = 0; k < 20; ++k) {
    const CleanRoom room = clean_room(k);
    const RoomShape shape = solve_room(room.evidence, room.orientations, SpaWeights{}, IspaSchedule::standard());
    const double fine = evidence_window(room.evidence).side / 96;
    double err = 0.0;
    for (const auto& g : room.corners) {
      double best = 1e18;
      for (const auto& c : shape.polygon.corners) best = std::min(best, (c - g).norm());
      err = std::max(err, best / fine);
    }
    const bool count_ok = shape.polygon.corners.size() == room.corners.size();
    if (count_ok) worst_err = std::max(worst_err, err);
    exact += count_ok && err <= 1.0;
    round1 += static_cast<double>(shape.rounds.front().corners.size());
    final_count += static_cast<double>(shape.polygon.corners.size());
  }
  round1 /= 20;
  final_count /= 20;
  return {final_count < round1 && exact >= 18,
          fmt("mean corners %.2f after round 1, %.2f after 3 rounds; exact count within 1 fine cell %d/20 "
              "(worst error %.2f cells)",
              round1, final_count, exact, worst_err)};
}

Outcome ispa_speed() {
  int faster = 0;
  bool bound = true;
  double t_lim = 0, t_full = 0;
  for (int k = 0; k < 5; ++k) {
    const CleanRoom room = clean_room(k);
    const ShapeMaps maps = build_maps(room.evidence, evidence_window(room.evidence), 64);
    IspaSchedule limited, full;
    limited.rounds = {{64, 8, 5}};
    full.rounds = {{64, std::nullopt, 5}};
    auto t0 = Clock::now();
    const RoomShape a = solve_room(maps, room.orientations, SpaWeights{}, limited);
    const double tl = seconds_since(t0);
    t0 = Clock::now();
    solve_room(maps, room.orientations, SpaWeights{}, full);
    const double tf = seconds_since(t0);
    faster += tl < tf;
    t_lim += tl;
    t_full += tf;
    const RoundResult& r = a.rounds[0];
    bound = bound && r.edge_count <= 17u * 17u * r.node_count;
  }
  return {faster == 5 && bound, fmt("limited round faster on %d/5 rooms (%.2f s vs %.2f s total), edge bound %s", faster,
                                    t_lim, t_full, bound ? "holds" : "violated")};
}

// ---------------------------------------------------------------------------
// End to end

Outcome end_to_end() {
  SceneParams p;
  p.room_count = 5;
  p.true_scale = 1.6;
  p.noise.sigma_phi = 0.5 * kPi / 180;
  p.noise.sigma_t = 0.01;
  p.seed = 5000;
  const SceneStream scene = generate(random_scene(p));
  const auto t0 = Clock::now();
  const FloorPlanOutput out = run_pipeline(scene.keyframes, PipelineConfig{});
  const double secs = seconds_since(t0);
  const Similarity2 align = align_to_ground_truth(out.trajectory, scene.truth.poses);
  std::vector<RoomPolygon> pred;
  for (const auto& r : out.rooms) pred.push_back(align.apply(r));
  const EvalReport rep = evaluate(pred, scene.truth.rooms);
  const MatchCounts& at05 = rep.rooms[1];
  return {at05.recall() >= 0.9 && at05.precision() >= 0.9 && rep.corners.recall() >= 0.8 && secs <= 120,
          fmt("room recall %.2f precision %.2f at IoU 0.5, corner recall %.2f, %.1f s, scale %.3f (true 1.6)",
              at05.recall(), at05.precision(), rep.corners.recall(), secs, out.scale_used)};
}

// ---------------------------------------------------------------------------
// Invariants

Outcome invariants() {
  std::vector<std::string> broken;
  std::mt19937_64 rng(6000);
  std::uniform_real_distribution<double> unit(0, 1);

  // Normalized projection sums to one.
  {
    std::vector<Vec2> pts;
    for (int i = 0; i < 500; ++i) pts.emplace_back(10 * unit(rng) - 5, 10 * unit(rng) - 5);
    const auto g = grid_project(pts, anchored_grid_spec(pts, 0.3), ProjectionMode::kNormalized);
    double sum = 0;
    for (double v : g.grid.values()) sum += v;
    if (std::abs(sum - 1.0) > 1e-12) broken.push_back("grid normalization");
  }
  // RANSAC reproducible under a seed.
  {
    std::vector<Vec2> pts;
    for (int i = 0; i < 200; ++i) pts.emplace_back(unit(rng) * 3, i % 4 ? 1.0 : unit(rng) * 3);
    RansacConfig cfg;
    cfg.seed = 77;
    const auto a = fit_wall(pts, cfg), b = fit_wall(pts, cfg);
    if (a.normal != b.normal || a.offset != b.offset) broken.push_back("RANSAC determinism");
  }
  // Posterior spread never grows.
  {
    std::vector<OrientationPosterior> post;
    OrientationConfig cfg;
    double last = 1e9;
    for (int i = 0; i < 100; ++i) {
      update_orientation(post, 0.7 + 0.05 * (unit(rng) - 0.5), 5 * unit(rng), cfg);
      if (post.size() != 1 || post[0].spread > last) {
        broken.push_back("posterior spread monotone");
        break;
      }
      last = post[0].spread;
    }
  }
  // Anchor containment on every round.
  for (int k = 0; k < 5; ++k) {
    const CleanRoom room = clean_room(20 + k);
    const RoomShape s = solve_room(room.evidence, room.orientations, SpaWeights{}, IspaSchedule::standard({48, 64, 64}));
    for (const auto& r : s.rounds) {
      if (!point_in_polygon(s.anchor, r.world_corners)) broken.push_back("anchor containment");
    }
  }
  // Room metric monotone in the IoU threshold.
  for (int k = 0; k < 20; ++k) {
    std::vector<RoomPolygon> gt, pred;
    for (int i = 0; i < 3; ++i) {
      const double x = 6 * unit(rng), z = 6 * unit(rng);
      gt.push_back({{{x, z}, {x + 2, z}, {x + 2, z + 2}, {x, z + 2}}, i});
      const double dx = unit(rng), dz = unit(rng);
      pred.push_back({{{x + dx, z + dz}, {x + 2, z + dz}, {x + 2, z + 2.5}, {x + dx, z + 2.5}}, i});
    }
    double lr = 2, lp = 2;
    for (double t : {0.3, 0.5, 0.7}) {
      const auto m = room_metric(pred, gt, t, nullptr, 0.05);
      if (m.recall() > lr || m.precision() > lp) broken.push_back("metric monotonicity");
      lr = m.recall();
      lp = m.precision();
    }
  }
  // Synth -> project -> register lands on the walls.
  {
    SceneParams p;
    p.room_count = 4;
    p.true_scale = 2.2;
    p.seed = 6001;
    const SceneStream scene = generate(random_scene(p));
    double worst = 0;
    for (std::size_t i = 0; i < scene.keyframes.size(); ++i) {
      const auto world = register_boundary(project_boundary(scene.keyframes[i].layout, 1.0), scene.truth.poses[i], 1.0);
      const auto& room = scene.truth.rooms[static_cast<std::size_t>(scene.truth.labels[i])].corners;
      for (const Vec2& x : world.floor_points()) {
        double best = 1e18;
        for (std::size_t e = 0; e < room.size(); ++e) {
          const Vec2 a = room[e], b = room[(e + 1) % room.size()];
          const double t = std::clamp((x - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
          best = std::min(best, (a + t * (b - a) - x).norm());
        }
        worst = std::max(worst, best);
      }
    }
    if (worst > 1e-6) broken.push_back("synth round trip");
  }
  std::string detail = "grid normalization, RANSAC seed, posterior spread, anchor containment, metric monotonicity, "
                       "synth round trip";
  if (!broken.empty()) {
    detail = "broken:";
    for (const auto& b : broken) detail += " " + b;
  }
  return {broken.empty(), detail};
}

// ---------------------------------------------------------------------------
// Metrics fixtures

Outcome metrics_fixtures() {
  std::vector<std::string> bad;
  const Bounds2 px{Vec2(0, 0), Vec2(256, 256)};
  const std::vector<Vec2> gt = {{100.5, 100.5}};
  auto expect = [&](const char* name, MatchCounts m, int tp, int fp, int fn) {
    if (m.tp != tp || m.fp != fp || m.fn != fn) bad.push_back(name);
  };
  const std::vector<Vec2> exact = {{10.5, 10.5}, {100.5, 20.5}, {200.5, 200.5}};
  expect("corner exact", corner_metric(exact, exact, px), 3, 0, 0);
  const std::vector<Vec2> two = {{105.5, 100.5}, {103.5, 100.5}};
  expect("corner closest wins", corner_metric(two, gt, px), 1, 1, 0);
  const std::vector<Vec2> far = {{111.5, 100.5}};
  expect("corner 11 px", corner_metric(far, gt, px), 0, 1, 1);

  auto box = [](double x0, double z0, double x1, double z1) {
    return RoomPolygon{{{x0, z0}, {x1, z0}, {x1, z1}, {x0, z1}}, 0};
  };
  const std::vector<RoomPolygon> rooms = {box(0, 0, 3, 2), box(3, 0, 6, 4)};
  for (double t : {0.3, 0.5, 0.7}) expect("room identical", room_metric(rooms, rooms, t), 2, 0, 0);
  const std::vector<RoomPolygon> one = {box(0, 0, 10, 1)};
  const std::vector<RoomPolygon> halves = {box(0, 0, 4, 1), box(6, 0, 10, 1)};
  expect("room one-to-one", room_metric(halves, one, 0.3), 1, 1, 0);

  std::vector<Vec2> src, dst;
  const Mat2 r = Eigen::Rotation2Dd(kPi / 6).toRotationMatrix();
  for (int i = 0; i < 6; ++i) {
    src.emplace_back(std::cos(i * 1.3) * (i + 1), std::sin(i * 0.7) * 2);
    dst.push_back(1.5 * (r * src.back()) + Vec2(3, -1));
  }
  const Similarity2 s = align_points(src, dst);
  if (std::abs(s.angle() - kPi / 6) > 1e-6 || std::abs(s.scale - 1.5) > 1e-6 || (s.translation - Vec2(3, -1)).norm() > 1e-6) {
    bad.push_back("alignment");
  }
  std::string detail = "corner, room and alignment fixtures reproduce exactly";
  if (!bad.empty()) {
    detail = "mismatch:";
    for (const auto& b : bad) detail += " " + b;
  }
  return {bad.empty(), detail};
}

}  // namespace

int main() {
  report("scale recovery", scale_recovery);
  report("entropy landscape", entropy_landscape);
  report("room identification", room_identification);
  report("iSPA vs oracle", ispa_vs_oracle);
  report("iSPA redundancy removal", redundancy_removal);
  report("iSPA speed", ispa_speed);
  report("end to end", end_to_end);
  report("invariant suites", invariants);
  report("metrics self-check", metrics_fixtures);
  std::printf("%d failed\n", failures);
  return failures;
}
