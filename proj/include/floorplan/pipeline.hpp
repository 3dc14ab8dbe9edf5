#pragma once

#include "floorplan/io.hpp"
#include "floorplan/keyframe.hpp"
#include "floorplan/room_shape.hpp"

#include <functional>
#include <span>

namespace floorplan {

/// Called once per solved room with the evidence and the first-round maps.
/// May be invoked from worker threads.
using MapDumpFn = std::function<void(int room_id, const RoomEvidence&, const ShapeMaps&, const RoomShape&)>;

/// Warm-up scale search, then one causal pass over every keyframe; finalized
/// rooms are solved on a worker pool. Per-keyframe failures are logged and
/// skipped. Throws InputError on an empty stream and DegenerateError when no
/// room could be reconstructed.
FloorPlanOutput run_pipeline(std::span<const Keyframe> keyframes, const PipelineConfig& config,
                             const MapDumpFn& dump = {});

}  // namespace floorplan
