#include "floorplan/pipeline.hpp"

#include "floorplan/error.hpp"
#include "floorplan/layout.hpp"
#include "floorplan/plane_filter.hpp"
#include "floorplan/room_id.hpp"
#include "floorplan/scale_recovery.hpp"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <future>
#include <map>
#include <mutex>
#include <thread>

namespace floorplan {

namespace {

// Fixed-size pool; tasks are drained before destruction.
class WorkerPool {
 public:
  explicit WorkerPool(int threads) {
    for (int i = 0; i < threads; ++i) workers_.emplace_back([this] { loop(); });
  }
  ~WorkerPool() {
    {
      std::lock_guard lock(mutex_);
      stopping_ = true;
    }
    cv_.notify_all();
    for (auto& w : workers_) w.join();
  }

  template <typename F>
  auto submit(F&& f) {
    using R = std::invoke_result_t<F>;
    auto task = std::make_shared<std::packaged_task<R()>>(std::forward<F>(f));
    auto future = task->get_future();
    {
      std::lock_guard lock(mutex_);
      queue_.emplace_back([task] { (*task)(); });
    }
    cv_.notify_one();
    return future;
  }

 private:
  void loop() {
    for (;;) {
      std::function<void()> job;
      {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
        if (queue_.empty()) return;
        job = std::move(queue_.front());
        queue_.pop_front();
      }
      job();
    }
  }

  std::vector<std::thread> workers_;
  std::deque<std::function<void()>> queue_;
  std::mutex mutex_;
  std::condition_variable cv_;
  bool stopping_ = false;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t frame, std::uint64_t wall) {
  std::uint64_t z = seed ^ (frame * 0x9E3779B97F4A7C15ull) ^ (wall * 0xC2B2AE3D27D4EB4Full);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

struct RoomExtras {
  std::vector<Vec2> wall_points;
  std::vector<OrientationPosterior> posteriors;
  int generation = 0;
};

struct Solved {
  int room_id = -1;
  int generation = 0;
  bool ok = false;
  RoomShape shape;
  double seconds = 0.0;
  std::string error;
};

}  // namespace

FloorPlanOutput run_pipeline(std::span<const Keyframe> keyframes, const PipelineConfig& config, const MapDumpFn& dump) {
  if (keyframes.empty()) throw InputError("empty stream");
  config.validate();
  FloorPlanOutput out;
  const double h = config.camera_height;

  // Phase 1: warm-up scale search.
  ScaleSearchConfig scfg = config.scale;
  const std::size_t warm = warmup_count(keyframes.size(), scfg);
  std::vector<LayoutBoundary> warm_boundaries;
  std::vector<Pose> warm_poses;
  for (std::size_t i = 0; i < warm; ++i) {
    try {
      warm_boundaries.push_back(project_boundary(keyframes[i].layout, h));
      warm_poses.push_back(keyframes[i].pose);
    } catch (const Error& e) {
      out.log.push_back("keyframe " + std::to_string(keyframes[i].index) + ": skipped in warm-up: " + e.what());
    }
  }
  if (warm_boundaries.size() < 2) throw DegenerateError("warm-up has fewer than 2 usable keyframes");
  if (warm_boundaries.size() < static_cast<std::size_t>(scfg.window)) {
    scfg.window = static_cast<int>(warm_boundaries.size());
    out.log.push_back("warm-up shorter than the scale window; window reduced to " + std::to_string(scfg.window));
  }
  const ScaleResult scale = recover_scale(warm_boundaries, warm_poses, scfg);
  for (const auto& w : scale.warnings) out.log.push_back("scale: " + w);
  const double s = scale.scale;
  out.scale_used = s;
  out.scale_observable = scale.observable;
  out.warmup_frames = warm;

  // Phase 2: causal pass over every keyframe.
  RoomTracker tracker(config.room);
  std::map<int, RoomExtras> extras;
  const IspaSchedule schedule = config.schedule();
  WorkerPool pool(config.threads);
  std::vector<std::future<Solved>> futures;

  auto dispatch = [&](int room_id) {
    const RoomState& state = tracker.room(room_id);
    RoomExtras& ex = extras[room_id];
    if (state.frame_count < config.min_room_frames) {
      out.log.push_back("room " + std::to_string(room_id) + ": dropped, only " + std::to_string(state.frame_count) +
                        " keyframes");
      return;
    }
    RoomEvidence evidence{state.density, ex.wall_points, config.room.threshold};
    std::vector<double> orientations = likely_orientations(ex.posteriors, config.orient);
    const int generation = ex.generation;
    futures.push_back(pool.submit([=, &config, &schedule, &dump]() {
      Solved r;
      r.room_id = room_id;
      r.generation = generation;
      const auto start = std::chrono::steady_clock::now();
      try {
        r.shape = solve_room(evidence, orientations, config.spa, schedule);
        r.ok = true;
        if (dump) {
          const ShapeMaps maps = build_maps(evidence, evidence_window(evidence), schedule.rounds.front().grid_size);
          dump(room_id, evidence, maps, r.shape);
        }
      } catch (const Error& e) {
        r.error = e.what();
      }
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return r;
    }));
  };

  out.assignments.assign(keyframes.size(), -1);
  for (std::size_t i = 0; i < keyframes.size(); ++i) {
    const Keyframe& kf = keyframes[i];
    Pose scaled = kf.pose;
    scaled.translation *= s;
    out.trajectory.push_back(scaled);
    try {
      const LayoutBoundary boundary = project_boundary(kf.layout, h);
      LayoutBoundary world = register_boundary(boundary, kf.pose, s);
      const Vec2 camera = kf.pose.position2d(s);
      const std::vector<Vec2> loop = clip_boundary(boundary, kf.pose, s, config.room.radius);

      // Wall fitting before the tracker takes ownership of the boundary.
      std::vector<PlaneWallFeature> walls;
      const auto floor = world.floor_points();
      const auto subsets = world.wall_subsets();
      for (std::size_t k = 0; k < subsets.size(); ++k) {
        if (static_cast<int>(subsets[k].size()) < config.min_wall_points) continue;
        std::vector<Vec2> pts;
        pts.reserve(subsets[k].size());
        for (int idx : subsets[k]) pts.push_back(floor[static_cast<std::size_t>(idx)]);
        RansacConfig rc = config.ransac;
        rc.seed = mix_seed(config.ransac.seed, static_cast<std::uint64_t>(kf.index), k);
        PlaneWallFeature f = fit_wall(pts, rc, camera);
        if (f.valid) walls.push_back(std::move(f));
      }

      const RoomTracker::Step step = tracker.process(camera, loop, std::move(world));
      RoomExtras& ex = extras[step.room_id];
      if (step.reopened >= 0) {
        ++ex.generation;
        out.log.push_back("keyframe " + std::to_string(kf.index) + ": re-entered finalized room " +
                          std::to_string(step.reopened) + "; its shape will be solved again");
      }
      for (const auto& f : walls) {
        ex.wall_points.insert(ex.wall_points.end(), f.points.begin(), f.points.end());
        update_orientation(ex.posteriors, f.orientation(), f.distance, config.orient);
      }
      for (int id : step.finalized) dispatch(id);
      out.assignments[i] = step.room_id;
    } catch (const Error& e) {
      out.log.push_back("keyframe " + std::to_string(kf.index) + ": skipped: " + e.what());
    }
  }
  for (int id : tracker.finish()) dispatch(id);

  std::map<int, Solved> latest;
  for (auto& f : futures) {
    Solved r = f.get();
    if (r.generation != extras[r.room_id].generation) continue;
    latest[r.room_id] = std::move(r);
  }
  for (auto& [id, r] : latest) {
    if (!r.ok) {
      out.log.push_back("room " + std::to_string(id) + ": shape failed: " + r.error);
      continue;
    }
    r.shape.polygon.room_id = id;
    out.rooms.push_back(r.shape.polygon);
    out.corner_counts.push_back(static_cast<int>(r.shape.polygon.corners.size()));
    out.room_seconds.push_back(r.seconds);
    out.room_warnings.push_back(r.shape.warnings);
  }
  if (out.rooms.empty()) throw DegenerateError("no room could be reconstructed");
  return out;
}

}  // namespace floorplan
