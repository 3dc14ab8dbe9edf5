#include "floorplan/io.hpp"

#include "floorplan/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace floorplan {

using nlohmann::json;

// -----------------------------------------------------------------------------
// Keyframe streams
// -----------------------------------------------------------------------------

std::string format_keyframe(const Keyframe& kf) {
  Eigen::Quaterniond q(kf.pose.rotation);
  q.normalize();
  if (q.w() < 0) q.coeffs() = -q.coeffs();
  json j;
  j["index"] = kf.index;
  j["timestamp"] = kf.pose.timestamp;
  j["q"] = {q.w(), q.x(), q.y(), q.z()};
  j["t"] = {kf.pose.translation.x(), kf.pose.translation.y(), kf.pose.translation.z()};
  j["width"] = kf.layout.image_width;
  j["phi"] = kf.layout.phi;
  j["corners"] = kf.layout.wall_corner_columns;
  return j.dump();
}

namespace {

[[noreturn]] void field_error(int line, const json* rec, const std::string& field, const std::string& what) {
  std::string where = "line " + std::to_string(line);
  if (rec && rec->contains("index") && (*rec)["index"].is_number_integer()) {
    where += " (index " + std::to_string((*rec)["index"].get<long>()) + ")";
  }
  throw InputError(where + ": field '" + field + "': " + what);
}

const json& require(const json& rec, const char* field, int line) {
  if (!rec.contains(field)) field_error(line, &rec, field, "missing");
  return rec[field];
}

std::vector<double> number_array(const json& rec, const char* field, int line, std::size_t expect = 0) {
  const json& v = require(rec, field, line);
  if (!v.is_array()) field_error(line, &rec, field, "expected an array");
  if (expect && v.size() != expect) field_error(line, &rec, field, "expected " + std::to_string(expect) + " numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) field_error(line, &rec, field, "expected numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

Keyframe parse_keyframe(std::string_view text, int line) {
  json rec;
  try {
    rec = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("line " + std::to_string(line) + ": malformed record: " + e.what());
  }
  if (!rec.is_object()) throw InputError("line " + std::to_string(line) + ": record is not an object");
  static const std::vector<std::string> kFields = {"index", "timestamp", "q", "t", "width", "phi", "corners"};
  for (const auto& [key, _] : rec.items()) {
    if (std::find(kFields.begin(), kFields.end(), key) == kFields.end()) field_error(line, &rec, key, "unknown field");
  }

  Keyframe kf;
  const json& index = require(rec, "index", line);
  if (!index.is_number_integer()) field_error(line, &rec, "index", "expected an integer");
  kf.index = index.get<int>();
  kf.pose.timestamp = kf.index;
  if (rec.contains("timestamp")) {
    if (!rec["timestamp"].is_number_integer()) field_error(line, &rec, "timestamp", "expected an integer");
    kf.pose.timestamp = rec["timestamp"].get<std::int64_t>();
  }

  const auto q = number_array(rec, "q", line, 4);
  const double norm = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
  if (!(std::abs(norm - 1.0) <= 1e-6)) {
    field_error(line, &rec, "q", "quaternion norm " + std::to_string(norm) + " is not 1");
  }
  kf.pose.rotation = Eigen::Quaterniond(q[0], q[1], q[2], q[3]).toRotationMatrix();
  const auto t = number_array(rec, "t", line, 3);
  kf.pose.translation = Vec3(t[0], t[1], t[2]);
  for (double x : t) {
    if (!std::isfinite(x)) field_error(line, &rec, "t", "not finite");
  }

  const json& width = require(rec, "width", line);
  if (!width.is_number_integer() || width.get<long>() <= 0) field_error(line, &rec, "width", "expected a positive integer");
  kf.layout.image_width = width.get<int>();
  kf.layout.phi = number_array(rec, "phi", line);
  const json& corners = require(rec, "corners", line);
  if (!corners.is_array()) field_error(line, &rec, "corners", "expected an array");
  for (const auto& c : corners) {
    if (!c.is_number_integer()) field_error(line, &rec, "corners", "expected integers");
    kf.layout.wall_corner_columns.push_back(c.get<int>());
  }
  try {
    kf.layout.validate();
  } catch (const InputError& e) {
    field_error(line, &rec, "phi/corners", e.what());
  }
  return kf;
}

std::vector<Keyframe> read_stream(std::istream& in) {
  std::vector<Keyframe> out;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    Keyframe kf = parse_keyframe(text, line);
    if (!out.empty()) {
      if (kf.layout.image_width != out.front().layout.image_width) {
        throw InputError("line " + std::to_string(line) + " (index " + std::to_string(kf.index) +
                         "): field 'width': differs from the first record");
      }
      if (kf.pose.timestamp < out.back().pose.timestamp) {
        throw InputError("line " + std::to_string(line) + " (index " + std::to_string(kf.index) +
                         "): field 'timestamp': decreases");
      }
    }
    out.push_back(std::move(kf));
  }
  return out;
}

void write_stream(std::ostream& out, std::span<const Keyframe> keyframes) {
  for (const auto& kf : keyframes) out << format_keyframe(kf) << '\n';
}

// -----------------------------------------------------------------------------
// Configuration
// -----------------------------------------------------------------------------

void PipelineConfig::validate() const {
  if (!(camera_height > 0)) throw InputError("camera.height must be positive");
  scale.validate();
  room.validate();
  if (min_room_frames < 1) throw InputError("room.min_frames must be at least 1");
  if (!(ransac.max_residual > 0)) throw InputError("ransac.max_residual must be positive");
  if (!(ransac.inlier_ratio_min > 0 && ransac.inlier_ratio_min <= 1)) throw InputError("ransac.inlier_min must be in (0, 1]");
  if (ransac.iterations < 1) throw InputError("ransac.iterations must be at least 1");
  if (min_wall_points < 2) throw InputError("ransac.min_points must be at least 2");
  if (!(orient.sigma0 > 0) || orient.lambda < 0) throw InputError("orient.sigma0 must be positive, orient.lambda nonnegative");
  if (!(orient.gate > 0) || !(orient.accept > 0)) throw InputError("orient.gate and orient.accept must be positive");
  spa.validate();
  schedule().validate();
  if (threads < 1) throw InputError("pipeline.threads must be at least 1");
}

namespace {

using Setter = std::function<void(PipelineConfig&, const std::string&)>;
using Getter = std::function<std::string(const PipelineConfig&)>;

// Lists may be separated by spaces or commas.
std::vector<double> parse_numbers(const std::string& key, std::string value) {
  std::replace(value.begin(), value.end(), ',', ' ');
  std::istringstream in(value);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw InputError("config key '" + key + "': '" + tok + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw InputError("config key '" + key + "': missing value");
  return out;
}

double one_number(const std::string& key, const std::string& value) {
  const auto v = parse_numbers(key, value);
  if (v.size() != 1) throw InputError("config key '" + key + "': expected one number");
  return v[0];
}

int one_int(const std::string& key, const std::string& value) {
  const double v = one_number(key, value);
  if (v != std::floor(v) || std::abs(v) > 2e9) throw InputError("config key '" + key + "': expected an integer");
  return static_cast<int>(v);
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + fmt(static_cast<double>(v[i]));
  return out;
}

struct Key {
  const char* name;
  Setter set;
  Getter get;
};

#define FP_DOUBLE(name, field)                                                                    \
  Key {                                                                                           \
    name, [](PipelineConfig& c, const std::string& v) { c.field = one_number(name, v); },       \
        [](const PipelineConfig& c) { return fmt(c.field); }                                      \
  }
#define FP_INT(name, field)                                                                       \
  Key {                                                                                           \
    name, [](PipelineConfig& c, const std::string& v) { c.field = one_int(name, v); },          \
        [](const PipelineConfig& c) { return fmt(c.field); }                                      \
  }

const std::vector<Key>& config_keys() {
  static const std::vector<Key> keys = {
      FP_DOUBLE("camera.height", camera_height),
      Key{"scale.range",
          [](PipelineConfig& c, const std::string& v) {
            const auto r = parse_numbers("scale.range", v);
            if (r.size() != 2) throw InputError("config key 'scale.range': expected two numbers");
            c.scale.s_min = r[0];
            c.scale.s_max = r[1];
          },
          [](const PipelineConfig& c) { return fmt(c.scale.s_min) + " " + fmt(c.scale.s_max); }},
      Key{"scale.steps", [](PipelineConfig& c, const std::string& v) { c.scale.steps = parse_numbers("scale.steps", v); },
          [](const PipelineConfig& c) { return join(c.scale.steps); }},
      FP_INT("scale.window", scale.window),
      FP_DOUBLE("scale.warmup_fraction", scale.warmup_fraction),
      FP_DOUBLE("scale.cell_size", scale.cell_size),
      FP_DOUBLE("room.clip_radius", room.radius),
      FP_DOUBLE("room.threshold", room.threshold),
      FP_INT("room.patience", room.patience),
      FP_DOUBLE("room.cell_size", room.cell_size),
      FP_INT("room.min_frames", min_room_frames),
      FP_DOUBLE("ransac.max_residual", ransac.max_residual),
      FP_DOUBLE("ransac.inlier_min", ransac.inlier_ratio_min),
      FP_INT("ransac.iterations", ransac.iterations),
      Key{"ransac.seed",
          [](PipelineConfig& c, const std::string& v) {
            const double s = one_number("ransac.seed", v);
            if (s < 0 || s != std::floor(s)) throw InputError("config key 'ransac.seed': expected a nonnegative integer");
            c.ransac.seed = static_cast<std::uint64_t>(s);
          },
          [](const PipelineConfig& c) { return std::to_string(c.ransac.seed); }},
      FP_INT("ransac.min_points", min_wall_points),
      FP_DOUBLE("orient.sigma0", orient.sigma0),
      FP_DOUBLE("orient.lambda", orient.lambda),
      FP_DOUBLE("orient.gate", orient.gate),
      FP_DOUBLE("orient.accept", orient.accept),
      FP_DOUBLE("spa.lambdas.ori", spa.orientation),
      FP_DOUBLE("spa.lambdas.plane", spa.plane),
      FP_DOUBLE("spa.lambdas.mask", spa.mask),
      FP_DOUBLE("spa.lambdas.complex", spa.complexity),
      Key{"spa.rounds",
          [](PipelineConfig& c, const std::string& v) {
            c.spa_rounds.clear();
            for (double x : parse_numbers("spa.rounds", v)) {
              if (x != std::floor(x)) throw InputError("config key 'spa.rounds': expected integers");
              c.spa_rounds.push_back(static_cast<int>(x));
            }
          },
          [](const PipelineConfig& c) { return join(c.spa_rounds); }},
      FP_INT("spa.max_edge_len", spa_max_edge_length),
      FP_INT("spa.neighborhood_radius", spa_neighborhood_radius),
      FP_INT("pipeline.threads", threads),
  };
  return keys;
}

#undef FP_DOUBLE
#undef FP_INT

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

PipelineConfig parse_config(std::istream& in) {
  PipelineConfig cfg;
  std::map<std::string, const Key*> by_name;
  for (const auto& k : config_keys()) by_name[k.name] = &k;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto hash = text.find('#');
    if (hash != std::string::npos) text.resize(hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw InputError("config line " + std::to_string(line) + ": expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const auto it = by_name.find(key);
    if (it == by_name.end()) throw InputError("config line " + std::to_string(line) + ": unknown key '" + key + "'");
    it->second->set(cfg, value);
  }
  cfg.validate();
  return cfg;
}

PipelineConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path);
  return parse_config(in);
}

std::string format_config(const PipelineConfig& config) {
  std::string out;
  for (const auto& k : config_keys()) out += std::string(k.name) + " = " + k.get(config) + "\n";
  return out;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// -----------------------------------------------------------------------------
// Output and ground truth documents
// -----------------------------------------------------------------------------

namespace {

json polygon_json(const RoomPolygon& p) {
  json corners = json::array();
  for (const auto& c : p.corners) corners.push_back({c.x(), c.y()});
  return {{"room_id", p.room_id}, {"corners", corners}};
}

RoomPolygon polygon_from(const json& j) {
  RoomPolygon p;
  p.room_id = j.at("room_id").get<int>();
  for (const auto& c : j.at("corners")) {
    if (!c.is_array() || c.size() != 2) throw InputError("polygon corner must be [x, z]");
    p.corners.emplace_back(c[0].get<double>(), c[1].get<double>());
  }
  return p;
}

json pose_json(const Pose& p) {
  Eigen::Quaterniond q(p.rotation);
  q.normalize();
  if (q.w() < 0) q.coeffs() = -q.coeffs();
  return {{"timestamp", p.timestamp},
          {"q", {q.w(), q.x(), q.y(), q.z()}},
          {"t", {p.translation.x(), p.translation.y(), p.translation.z()}}};
}

Pose pose_from(const json& j) {
  Pose p;
  p.timestamp = j.at("timestamp").get<std::int64_t>();
  const auto& q = j.at("q");
  const auto& t = j.at("t");
  if (q.size() != 4 || t.size() != 3) throw InputError("pose needs q[4] and t[3]");
  p.rotation = Eigen::Quaterniond(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>())
                   .normalized()
                   .toRotationMatrix();
  p.translation = Vec3(t[0].get<double>(), t[1].get<double>(), t[2].get<double>());
  return p;
}

json parse_document(std::istream& in, const char* what) {
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

void write_output(std::ostream& out, const FloorPlanOutput& o) {
  json j;
  j["scale_used"] = o.scale_used;
  j["scale_observable"] = o.scale_observable;
  j["warmup_frames"] = o.warmup_frames;
  json rooms = json::array();
  for (std::size_t i = 0; i < o.rooms.size(); ++i) {
    json r = polygon_json(o.rooms[i]);
    r["corner_count"] = i < o.corner_counts.size() ? o.corner_counts[i] : static_cast<int>(o.rooms[i].corners.size());
    if (i < o.room_warnings.size()) r["warnings"] = o.room_warnings[i];
    rooms.push_back(r);
  }
  j["rooms"] = rooms;
  json traj = json::array();
  for (const auto& p : o.trajectory) traj.push_back(pose_json(p));
  j["trajectory"] = traj;
  j["assignments"] = o.assignments;
  j["log"] = o.log;
  j["provenance"] = {{"config_hash", o.config_hash}, {"input_hash", o.input_hash}};
  j["timing"] = {{"room_seconds", o.room_seconds}};
  out << j.dump(1) << '\n';
}

FloorPlanOutput read_output(std::istream& in) {
  const json j = parse_document(in, "floor plan");
  FloorPlanOutput o;
  try {
    o.scale_used = j.at("scale_used").get<double>();
    o.scale_observable = j.value("scale_observable", true);
    o.warmup_frames = j.value("warmup_frames", std::size_t{0});
    for (const auto& r : j.at("rooms")) {
      o.rooms.push_back(polygon_from(r));
      o.corner_counts.push_back(r.value("corner_count", static_cast<int>(o.rooms.back().corners.size())));
      o.room_warnings.push_back(r.value("warnings", std::vector<std::string>{}));
    }
    for (const auto& p : j.value("trajectory", json::array())) o.trajectory.push_back(pose_from(p));
    o.assignments = j.value("assignments", std::vector<int>{});
    o.log = j.value("log", std::vector<std::string>{});
    if (j.contains("provenance")) {
      o.config_hash = j["provenance"].value("config_hash", "");
      o.input_hash = j["provenance"].value("input_hash", "");
    }
    if (j.contains("timing")) o.room_seconds = j["timing"].value("room_seconds", std::vector<double>{});
  } catch (const json::exception& e) {
    throw InputError(std::string("floor plan document: ") + e.what());
  }
  return o;
}

void write_ground_truth(std::ostream& out, const GroundTruth& t) {
  json j;
  json rooms = json::array();
  for (const auto& r : t.rooms) rooms.push_back(polygon_json(r));
  j["rooms"] = rooms;
  json corners = json::array();
  for (const auto& c : t.corners) corners.push_back({c.x(), c.y()});
  j["corners"] = corners;
  j["true_scale"] = t.true_scale;
  json poses = json::array();
  for (const auto& p : t.poses) poses.push_back(pose_json(p));
  j["poses"] = poses;
  j["labels"] = t.labels;
  out << j.dump(1) << '\n';
}

GroundTruth read_ground_truth(std::istream& in) {
  const json j = parse_document(in, "ground truth");
  GroundTruth t;
  try {
    for (const auto& r : j.at("rooms")) t.rooms.push_back(polygon_from(r));
    for (const auto& c : j.at("corners")) t.corners.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    t.true_scale = j.at("true_scale").get<double>();
    for (const auto& p : j.at("poses")) t.poses.push_back(pose_from(p));
    t.labels = j.at("labels").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw InputError(std::string("ground truth document: ") + e.what());
  }
  return t;
}

void write_pgm(const std::string& path, const DensityGrid& grid, double max_value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << "P5\n" << grid.cols() << ' ' << grid.rows() << "\n255\n";
  // Row v = 0 is the smallest z; images are written top row = largest z.
  for (int v = grid.rows() - 1; v >= 0; --v) {
    for (int u = 0; u < grid.cols(); ++u) {
      const double x = max_value > 0 ? std::clamp(grid.at({u, v}) / max_value, 0.0, 1.0) : 0.0;
      out.put(static_cast<char>(std::lround(255.0 * x)));
    }
  }
}

}  // namespace floorplan
