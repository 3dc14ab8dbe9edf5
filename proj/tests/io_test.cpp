#include "floorplan/error.hpp"
#include "floorplan/io.hpp"
#include "floorplan/synth_scene.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace floorplan {
namespace {

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

const char* kRecord = R"({"index":3,"timestamp":30,"q":[1,0,0,0],"t":[0.5,0,-1],"width":8,)"
                      R"("phi":[0.4,0.4,0.5,0.5,0.6,0.6,0.5,0.4],"corners":[1,3,5,7]})";

TEST(Keyframe, ParsesAllFields) {
  const Keyframe kf = parse_keyframe(kRecord, 1);
  EXPECT_EQ(kf.index, 3);
  EXPECT_EQ(kf.pose.timestamp, 30);
  EXPECT_TRUE(kf.pose.rotation.isIdentity());
  EXPECT_EQ(kf.pose.translation, Vec3(0.5, 0, -1));
  EXPECT_EQ(kf.layout.image_width, 8);
  EXPECT_EQ(kf.layout.phi.size(), 8u);
  EXPECT_EQ(kf.layout.wall_corner_columns, (std::vector<int>{1, 3, 5, 7}));
}

TEST(Keyframe, StreamRoundTrip) {
  SceneParams p;
  p.room_count = 2;
  p.noise.sigma_phi = 0.01;
  p.noise.sigma_t = 0.02;
  p.seed = 21;
  const SceneStream s = generate(random_scene(p));
  std::stringstream buf;
  write_stream(buf, s.keyframes);
  const auto back = read_stream(buf);
  ASSERT_EQ(back.size(), s.keyframes.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].index, s.keyframes[i].index);
    EXPECT_EQ(back[i].pose.timestamp, s.keyframes[i].pose.timestamp);
    EXPECT_EQ(back[i].layout.phi, s.keyframes[i].layout.phi);
    EXPECT_EQ(back[i].layout.wall_corner_columns, s.keyframes[i].layout.wall_corner_columns);
    EXPECT_EQ(back[i].pose.translation, s.keyframes[i].pose.translation);
    EXPECT_TRUE(back[i].pose.rotation.isApprox(s.keyframes[i].pose.rotation, 1e-12));
  }
}

TEST(Keyframe, QuaternionNormIsChecked) {
  const std::string bad = R"({"index":7,"q":[0.9,0,0,0],"t":[0,0,0],"width":8,"phi":[0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5],"corners":[]})";
  const std::string msg = message_of([&] { parse_keyframe(bad, 4); });
  EXPECT_NE(msg.find("'q'"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
  EXPECT_NE(msg.find("index 7"), std::string::npos) << msg;
}

TEST(Keyframe, FieldErrorsNameTheField) {
  EXPECT_NE(message_of([] { parse_keyframe(R"({"index":1,"q":[1,0,0,0],"t":[0,0],"width":4,"phi":[0.5,0.5,0.5,0.5],"corners":[]})", 2); })
                .find("'t'"),
            std::string::npos);
  EXPECT_NE(message_of([] { parse_keyframe(R"({"index":1,"q":[1,0,0,0],"t":[0,0,0],"width":4,"phi":[0.5,0.5,0.5],"corners":[]})", 2); })
                .find("phi"),
            std::string::npos);
  EXPECT_NE(message_of([] { parse_keyframe(R"({"index":1,"q":[1,0,0,0],"t":[0,0,0],"width":4,"phi":[0.5,0.5,0.5,0.5],"corners":[],"x":1})", 2); })
                .find("'x'"),
            std::string::npos);
  EXPECT_NE(message_of([] { parse_keyframe(R"({"q":[1,0,0,0]})", 9); }).find("'index'"), std::string::npos);
  EXPECT_NE(message_of([] { parse_keyframe("{not json", 5); }).find("line 5"), std::string::npos);
}

TEST(Stream, BlankLinesSkippedAndOrderChecked) {
  std::stringstream in;
  in << kRecord << "\n\n  \n" << kRecord << "\n";
  EXPECT_EQ(read_stream(in).size(), 2u);

  std::string later = kRecord;
  later.replace(later.find("\"timestamp\":30"), 14, "\"timestamp\":10");
  std::stringstream back;
  back << kRecord << "\n" << later << "\n";
  EXPECT_NE(message_of([&] { read_stream(back); }).find("timestamp"), std::string::npos);

  std::stringstream empty;
  EXPECT_TRUE(read_stream(empty).empty());
}

TEST(Config, UnknownKeyRejectedByName) {
  std::stringstream in("camera.height = 1.2\nspa.lambdas.colour = 3\n");
  const std::string msg = message_of([&] { parse_config(in); });
  EXPECT_NE(msg.find("spa.lambdas.colour"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
}

TEST(Config, ParsesValuesAndComments) {
  std::stringstream in(
      "# tuned\n"
      "spa.rounds = 32, 48\n"
      "spa.lambdas.mask = 4   # stronger\n"
      "scale.steps = 0.4, 0.05\n"
      "ransac.seed = 99\n");
  const PipelineConfig c = parse_config(in);
  EXPECT_EQ(c.spa_rounds, (std::vector<int>{32, 48}));
  EXPECT_DOUBLE_EQ(c.spa.mask, 4.0);
  EXPECT_EQ(c.scale.steps, (std::vector<double>{0.4, 0.05}));
  EXPECT_EQ(c.ransac.seed, 99u);
}

TEST(Config, RoundTrip) {
  PipelineConfig c;
  c.camera_height = 1.6;
  c.spa.complexity = 7.5;
  c.spa_rounds = {48, 64, 64};
  c.room.patience = 4;
  c.threads = 2;
  std::stringstream in(format_config(c));
  const PipelineConfig back = parse_config(in);
  EXPECT_EQ(format_config(back), format_config(c));
  EXPECT_DOUBLE_EQ(back.camera_height, 1.6);
  EXPECT_EQ(back.spa_rounds, c.spa_rounds);
}

TEST(Config, InvalidValuesRejected) {
  for (const char* text : {"camera.height = 0\n", "spa.lambdas.complex = 0\n", "ransac.iterations = 1.5\n",
                           "scale.range = 1\n", "spa.rounds = 4\n", "camera.height\n", "scale.window = x\n"}) {
    std::stringstream in(text);
    EXPECT_THROW(parse_config(in), InputError) << text;
  }
}

TEST(Output, RoundTrip) {
  FloorPlanOutput o;
  o.rooms = {RoomPolygon{{{0, 0}, {2, 0}, {2, 1.5}, {0, 1.5}}, 0}, RoomPolygon{{{2, 0}, {4, 0}, {3, 2}}, 1}};
  o.corner_counts = {4, 3};
  o.room_warnings = {{}, {"degenerate room"}};
  o.room_seconds = {0.25, 0.5};
  o.scale_used = 1.37;
  o.warmup_frames = 12;
  o.trajectory = {Pose::from_yaw(0.3, Vec3(1, 0, 2), 0), Pose::from_yaw(-1.0, Vec3(0, 0, 1), 1)};
  o.assignments = {0, 1};
  o.log = {"kf 3 skipped"};
  o.config_hash = "abc";
  o.input_hash = "def";
  std::stringstream buf;
  write_output(buf, o);
  const FloorPlanOutput back = read_output(buf);
  ASSERT_EQ(back.rooms.size(), 2u);
  EXPECT_EQ(back.rooms[1].corners, o.rooms[1].corners);
  EXPECT_EQ(back.rooms[1].room_id, 1);
  EXPECT_EQ(back.corner_counts, o.corner_counts);
  EXPECT_EQ(back.room_warnings, o.room_warnings);
  EXPECT_EQ(back.room_seconds, o.room_seconds);
  EXPECT_EQ(back.scale_used, o.scale_used);
  EXPECT_EQ(back.warmup_frames, o.warmup_frames);
  EXPECT_EQ(back.assignments, o.assignments);
  EXPECT_EQ(back.log, o.log);
  EXPECT_EQ(back.config_hash, "abc");
  ASSERT_EQ(back.trajectory.size(), 2u);
  EXPECT_TRUE(back.trajectory[1].rotation.isApprox(o.trajectory[1].rotation, 1e-12));
  EXPECT_EQ(back.trajectory[1].timestamp, 1);
}

TEST(GroundTruth, RoundTrip) {
  SceneParams p;
  p.room_count = 3;
  p.seed = 22;
  const GroundTruth t = generate(random_scene(p)).truth;
  std::stringstream buf;
  write_ground_truth(buf, t);
  const GroundTruth back = read_ground_truth(buf);
  EXPECT_EQ(back.labels, t.labels);
  EXPECT_EQ(back.corners, t.corners);
  EXPECT_EQ(back.true_scale, t.true_scale);
  ASSERT_EQ(back.rooms.size(), t.rooms.size());
  EXPECT_EQ(back.rooms[2].corners, t.rooms[2].corners);
}

TEST(Documents, MalformedRejected) {
  std::stringstream junk("{\"rooms\": 3}");
  EXPECT_THROW(read_output(junk), InputError);
  std::stringstream half("{\"rooms\": [");
  EXPECT_THROW(read_ground_truth(half), InputError);
}

TEST(Hash, KnownValues) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

}  // namespace
}  // namespace floorplan
