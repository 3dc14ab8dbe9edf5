// floorplan: command-line front end.
//
//   floorplan run        --input stream.jsonl --output plan.json [--config cfg] [--warmup f] [--seed n] [--dump-debug dir]
//   floorplan synth      --output stream.jsonl [--truth gt.json] [--rooms n] [--scale s] [--seed n] ...
//   floorplan eval       --input plan.json --truth gt.json [--output report.txt]
//   floorplan debug-maps --input stream.jsonl --dump-debug dir [--config cfg]
//
// Exit codes: 0 success, 1 input error, 2 pipeline failure.

#include "floorplan/error.hpp"
#include "floorplan/io.hpp"
#include "floorplan/metrics.hpp"
#include "floorplan/pipeline.hpp"
#include "floorplan/synth_scene.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace floorplan;

namespace {

std::string slurp(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Writes to a temporary sibling first so a failed run leaves no output file.
void write_file(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << content;
  }
  fs::rename(tmp, path);
}

struct RunOptions {
  std::string config;
  std::string input = "-";
  std::string output = "-";
  std::optional<std::uint64_t> seed;
  std::optional<double> warmup;
  std::string dump_dir;
};

PipelineConfig load_config(const RunOptions& o) {
  PipelineConfig cfg = o.config.empty() ? PipelineConfig{} : read_config_file(o.config);
  if (o.seed) cfg.ransac.seed = *o.seed;
  if (o.warmup) cfg.scale.warmup_fraction = *o.warmup;
  cfg.validate();
  return cfg;
}

MapDumpFn make_dumper(const std::string& dir) {
  if (dir.empty()) return {};
  fs::create_directories(dir);
  return [dir](int id, const RoomEvidence& ev, const ShapeMaps& maps, const RoomShape& shape) {
    const std::string base = dir + "/room" + std::to_string(id);
    write_pgm(base + "_H.pgm", ev.density);
    write_pgm(base + "_MP.pgm", maps.plane);
    write_pgm(base + "_MH.pgm", maps.mask);
    // Per-round corners drawn onto the mask of that round's grid.
    for (std::size_t r = 0; r < shape.rounds.size(); ++r) {
      const auto& round = shape.rounds[r];
      ShapeMaps grid = resample_maps(maps, round.round.grid_size);
      DensityGrid img = grid.mask;
      for (double& v : img.values()) v *= 0.3;
      for (std::size_t i = 0; i < round.corners.size(); ++i) {
        const Cell a = round.corners[i];
        const Cell b = round.corners[(i + 1) % round.corners.size()];
        img.at(a) = 1.0;
        for (const Cell& c : rasterize_segment(a, b)) img.at(c) = 0.7;
        img.at(b) = 1.0;
      }
      write_pgm(base + "_round" + std::to_string(r + 1) + ".pgm", img);
    }
  };
}

FloorPlanOutput run(const RunOptions& o) {
  const PipelineConfig cfg = load_config(o);
  const std::string bytes = slurp(o.input);
  std::istringstream in(bytes);
  const auto keyframes = read_stream(in);
  FloorPlanOutput out = run_pipeline(keyframes, cfg, make_dumper(o.dump_dir));
  out.config_hash = fnv1a_hex(format_config(cfg));
  out.input_hash = fnv1a_hex(bytes);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential floor plan reconstruction from keyframe layouts"};
  app.require_subcommand(1);

  RunOptions ro;
  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", ro.config, "Config file (key = value)")->check(CLI::ExistingFile);
    cmd->add_option("--input", ro.input, "Keyframe stream, or '-' for stdin");
    cmd->add_option("--seed", ro.seed, "RANSAC seed");
    cmd->add_option("--warmup", ro.warmup, "Warm-up fraction of keyframes for scale recovery");
    cmd->add_option("--dump-debug", ro.dump_dir, "Directory for H, M_P and M_H images");
  };
  auto* run_cmd = app.add_subcommand("run", "Reconstruct a floor plan from a keyframe stream");
  add_run_flags(run_cmd);
  run_cmd->add_option("--output", ro.output, "Floor plan JSON, or '-' for stdout");

  auto* maps_cmd = app.add_subcommand("debug-maps", "Dump per-room H, M_P, M_H and round images");
  add_run_flags(maps_cmd);

  SceneParams sp;
  std::string synth_out = "-";
  std::string truth_out;
  double sigma_phi_deg = 0.0;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scene stream and ground truth");
  synth_cmd->add_option("--output", synth_out, "Keyframe stream path, or '-' for stdout");
  synth_cmd->add_option("--truth", truth_out, "Ground truth JSON path");
  synth_cmd->add_option("--seed", sp.seed, "Scene seed");
  synth_cmd->add_option("--rooms", sp.room_count, "Number of rooms")->check(CLI::Range(1, 64));
  synth_cmd->add_option("--scale", sp.true_scale, "Hidden odometry scale");
  synth_cmd->add_option("--width", sp.width, "Panorama width in columns");
  synth_cmd->add_option("--sigma-phi", sigma_phi_deg, "Boundary angle noise, degrees");
  synth_cmd->add_option("--sigma-t", sp.noise.sigma_t, "Odometry translation noise");
  synth_cmd->add_option("--occlusion", sp.noise.occlusion_prob, "Per-keyframe occlusion probability");
  synth_cmd->add_option("--l-shape", sp.l_shape_prob, "Probability of an L-shaped room");
  synth_cmd->add_flag("!--no-revisit", sp.revisit, "Do not return to an earlier room at the end");

  std::string eval_input, eval_truth, eval_out = "-";
  auto* eval_cmd = app.add_subcommand("eval", "Score a floor plan against ground truth");
  eval_cmd->add_option("--input", eval_input, "Floor plan JSON")->required();
  eval_cmd->add_option("--truth", eval_truth, "Ground truth JSON")->required();
  eval_cmd->add_option("--output", eval_out, "Report path, or '-' for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run_cmd) {
      const FloorPlanOutput out = run(ro);
      std::ostringstream doc;
      write_output(doc, out);
      write_file(ro.output, doc.str());
      for (const auto& line : out.log) std::cerr << line << '\n';
    } else if (*maps_cmd) {
      if (ro.dump_dir.empty()) throw InputError("debug-maps needs --dump-debug <dir>");
      const FloorPlanOutput out = run(ro);
      std::cerr << "wrote maps for " << out.rooms.size() << " rooms to " << ro.dump_dir << '\n';
    } else if (*synth_cmd) {
      sp.noise.sigma_phi = sigma_phi_deg * kPi / 180.0;
      const SceneStream scene = generate(random_scene(sp));
      std::ostringstream stream;
      write_stream(stream, scene.keyframes);
      write_file(synth_out, stream.str());
      if (!truth_out.empty()) {
        std::ostringstream gt;
        write_ground_truth(gt, scene.truth);
        write_file(truth_out, gt.str());
      }
    } else if (*eval_cmd) {
      std::istringstream pin(slurp(eval_input));
      std::istringstream gin(slurp(eval_truth));
      const FloorPlanOutput plan = read_output(pin);
      const GroundTruth truth = read_ground_truth(gin);
      const Similarity2 align = align_to_ground_truth(plan.trajectory, truth.poses);
      std::vector<RoomPolygon> pred;
      for (const auto& r : plan.rooms) pred.push_back(align.apply(r));
      EvalReport report = evaluate(pred, truth.rooms, plan.room_seconds);
      report.alignment = align;
      std::ostringstream doc;
      write_report(doc, report);
      write_file(eval_out, doc.str());
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  } catch (const CLI::Error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "pipeline failure: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
