#pragma once

// Deterministic fixture corpus shared by the unit, acceptance and CLI tests.
// Four manifests: a single-frame office scene (two printers and a table), a
// two-frame pair with known relative pose, a four-frame video, and a
// single-frame distance scene. Depth PNGs are synthesized for the pair.

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "spatialforge/geometry.hpp"
#include "spatialforge/image_io.hpp"

namespace fixtures {

using nlohmann::json;
using spatialforge::Box3D;
using spatialforge::CameraModel;
using spatialforge::DepthMap;
using spatialforge::EulerAngles;
using spatialforge::Pose;
using spatialforge::Vec3;

inline json vec3_json(const Vec3& v) { return json{v.x(), v.y(), v.z()}; }

inline json box_json(double x, double y, double z, double sx, double sy, double sz,
                     double p = 0, double yw = 0, double r = 0) {
  return json{{"center", {x, y, z}}, {"size", {sx, sy, sz}}, {"angles", {p, yw, r}}};
}

inline json pose_json(const Pose& pose) {
  json rot = json::array();
  for (int r = 0; r < 3; ++r)
    rot.push_back({pose.rotation(r, 0), pose.rotation(r, 1), pose.rotation(r, 2)});
  return json{{"rotation", rot},
              {"translation",
               {pose.translation.x(), pose.translation.y(), pose.translation.z()}}};
}

// Projected 2D refs for an object visible in a frame (pose world-from-cam).
inline void add_refs(json& obj, const Box3D& box, const CameraModel& cam,
                     const Pose& pose, int frame) {
  Pose inv = pose.inverse();
  auto corners = spatialforge::box_corners(box);
  double x1 = 1e18, y1 = 1e18, x2 = -1e18, y2 = -1e18;
  bool ok = true;
  for (const auto& c : corners) {
    auto px = spatialforge::project_point(cam, inv.apply(c));
    if (!px) {
      ok = false;
      break;
    }
    x1 = std::min(x1, px->x());
    y1 = std::min(y1, px->y());
    x2 = std::max(x2, px->x());
    y2 = std::max(y2, px->y());
  }
  auto center_px = spatialforge::project_point(cam, inv.apply(box.center));
  if (!ok || !center_px) return;
  auto clampx = [&](double v) { return std::clamp(v, 0.0, double(cam.width)); };
  auto clampy = [&](double v) { return std::clamp(v, 0.0, double(cam.height)); };
  std::string key = std::to_string(frame);
  obj["box2d"][key] = {std::round(clampx(x1)), std::round(clampy(y1)),
                       std::round(clampx(x2)), std::round(clampy(y2))};
  obj["point2d"][key] = {clampx(center_px->x()), clampy(center_px->y())};
}

inline Box3D make_box(const json& bj, const std::string& label) {
  Box3D b;
  b.center = Vec3(bj["center"][0], bj["center"][1], bj["center"][2]);
  b.size = Vec3(bj["size"][0], bj["size"][1], bj["size"][2]);
  b.angles = {bj["angles"][0], bj["angles"][1], bj["angles"][2]};
  b.label = label;
  return b;
}

// --- scene_printer: the office scene with two printers and a table ---------
inline json scene_printer() {
  CameraModel cam = CameraModel::from_hfov_deg(959, 696, 69.16);
  json frames = json::array();
  frames.push_back({{"image", "images/printer_0.jpg"},
                    {"camera",
                     {{"width", 959}, {"height", 696}, {"focal", cam.focal}}}});

  json objects = json::array();
  auto add = [&](const char* label, json bj) {
    json o{{"label", label}, {"box", bj}, {"in_frames", {true}}};
    add_refs(o, make_box(bj, label), cam, Pose::identity(), 0);
    objects.push_back(std::move(o));
  };
  add("printer", box_json(-0.16, 0.12, 1.56, 0.44, 0.51, 0.41, 0.11, 0.28, 0.05));
  add("printer", box_json(0.40, -0.02, 1.96, 0.45, 0.51, 0.36, 0.11, 0.27, 0.05));
  add("table", box_json(0.19, 0.56, 1.78, 0.53, 0.52, 1.36, 0.1, 0.26, 0.04));
  int marker = 0;
  for (auto& o : objects) o["marker_id"] = marker++;

  return json{{"schema_version", 1},
              {"scene_id", "scene_printer"},
              {"source", "fixture"},
              {"frames", frames},
              {"objects", objects}};
}

// --- scene_pair: two frames, pan right 20 deg, move (0.5, 0, 0.6) ----------
inline json scene_pair(const std::string& dir) {
  CameraModel cam(200, 160, 120.0);
  Pose pose1 = Pose::identity();
  Pose pose2;
  pose2.rotation = spatialforge::euler_to_matrix({0, 20.0 / 180.0, 0});
  pose2.translation = Vec3(0.5, 0, 0.6);

  // depth maps: the world plane z = 2.2 seen from each camera
  auto plane_depth = [&](const Pose& pose) {
    DepthMap d = DepthMap::filled(cam.width, cam.height, 0.0f);
    for (int y = 0; y < cam.height; ++y)
      for (int x = 0; x < cam.width; ++x) {
        Vec3 dir_cam = spatialforge::unproject_pixel(cam, x + 0.5, y + 0.5, 1.0);
        Vec3 dir_world = pose.rotation * dir_cam;
        if (dir_world.z() <= 1e-9) continue;  // ray never reaches the plane
        double t = (2.2 - pose.translation.z()) / dir_world.z();
        if (t <= 0) continue;
        d.at(x, y) = static_cast<float>(t * dir_cam.z());
      }
    return d;
  };
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "depth");
  spatialforge::write_depth_png(plane_depth(pose1),
                                (fs::path(dir) / "depth/pair_0.png").string());
  spatialforge::write_depth_png(plane_depth(pose2),
                                (fs::path(dir) / "depth/pair_1.png").string());

  json frames = json::array();
  json cam_j = {{"width", cam.width}, {"height", cam.height}, {"focal", cam.focal}};
  frames.push_back({{"image", "images/pair_0.jpg"},
                    {"camera", cam_j},
                    {"pose", pose_json(pose1)},
                    {"depth", "depth/pair_0.png"}});
  frames.push_back({{"image", "images/pair_1.jpg"},
                    {"camera", cam_j},
                    {"pose", pose_json(pose2)},
                    {"depth", "depth/pair_1.png"}});

  json objects = json::array();
  auto add = [&](const char* label, json bj, std::vector<bool> in_frames,
                 std::vector<Vec3> points = {}) {
    json o{{"label", label}, {"box", bj}};
    o["in_frames"] = in_frames;
    Box3D b = make_box(bj, label);
    if (in_frames[0]) add_refs(o, b, cam, pose1, 0);
    if (in_frames[1]) add_refs(o, b, cam, pose2, 1);
    if (!points.empty()) {
      json pts = json::array();
      for (const auto& p : points) pts.push_back(vec3_json(p));
      o["points"] = pts;
    }
    objects.push_back(std::move(o));
  };

  // instance points live on the z = 2.2 plane so the depth maps agree
  auto plane_points = [&](double cx, double cy, double half) {
    std::vector<Vec3> pts;
    for (int i = -2; i <= 2; ++i)
      for (int j = -2; j <= 2; ++j)
        pts.emplace_back(cx + half * i / 2.0, cy + half * j / 2.0, 2.2);
    return pts;
  };

  add("table", box_json(0.4, 0.3, 2.2, 0.9, 0.5, 0.7), {true, true},
      plane_points(0.4, 0.3, 0.25));
  add("sofa", box_json(-0.3, 0.4, 3.4, 1.6, 0.8, 0.8), {true, true});
  add("lamp", box_json(-0.8, 0.1, 1.8, 0.3, 0.9, 0.3), {true, false});
  add("chair", box_json(1.4, 0.2, 2.8, 0.5, 0.9, 0.5), {false, true});
  int marker = 0;
  for (auto& o : objects) o["marker_id"] = marker++;

  return json{{"schema_version", 1},
              {"scene_id", "scene_pair"},
              {"source", "fixture"},
              {"frames", frames},
              {"objects", objects}};
}

// --- scene_video: four forward steps, appearance ordering and 8 chairs -----
inline json scene_video() {
  CameraModel cam(200, 160, 120.0);
  json frames = json::array();
  json cam_j = {{"width", cam.width}, {"height", cam.height}, {"focal", cam.focal}};
  std::vector<Pose> poses;
  for (int k = 0; k < 4; ++k) {
    Pose p;
    p.translation = Vec3(0, 0, 0.15 * k);
    poses.push_back(p);
    frames.push_back({{"image", "images/video_" + std::to_string(k) + ".jpg"},
                      {"camera", cam_j},
                      {"pose", pose_json(p)},
                      {"time_index", k}});
  }

  json objects = json::array();
  auto add = [&](const char* label, json bj, std::vector<bool> in_frames,
                 int appearance) {
    json o{{"label", label}, {"box", bj}};
    o["in_frames"] = in_frames;
    o["appearance_frame"] = appearance;
    Box3D b = make_box(bj, label);
    if (in_frames[0]) add_refs(o, b, cam, poses[0], 0);
    objects.push_back(std::move(o));
  };

  add("cabinet", box_json(-1.0, 0.2, 2.4, 0.8, 1.2, 0.5), {true, true, true, true}, 0);
  add("trash bin", box_json(0.9, 0.5, 2.8, 0.35, 0.5, 0.35), {false, true, true, true}, 1);
  add("table divider", box_json(0.1, 0.1, 3.6, 1.4, 0.6, 0.1), {false, false, true, true}, 2);
  add("pillar", box_json(-0.6, -0.2, 4.6, 0.4, 2.4, 0.4), {false, false, false, true}, 3);
  // eight chairs around a long table
  const double cx[8] = {-0.9, -0.45, 0.0, 0.45, 0.9, -0.65, 0.2, 0.65};
  const double cz[8] = {2.6, 2.85, 3.15, 3.4, 3.7, 4.0, 4.3, 4.6};
  for (int i = 0; i < 8; ++i) {
    std::vector<bool> in_frames = {i % 2 == 0, true, true, i % 3 != 0};
    add("chair", box_json(cx[i], 0.4, cz[i], 0.5, 0.95, 0.5), in_frames,
        i % 2 == 0 ? 0 : 1);
  }

  return json{{"schema_version", 1},
              {"scene_id", "scene_video"},
              {"source", "fixture"},
              {"fps", 2.0},
              {"frames", frames},
              {"objects", objects}};
}

// --- scene_distance: the pillow/chair distances and measurement values -----
inline json scene_distance() {
  CameraModel cam = CameraModel::from_hfov_deg(959, 696, 69.16);
  json frames = json::array();
  frames.push_back({{"image", "images/distance_0.jpg"},
                    {"camera",
                     {{"width", 959}, {"height", 696}, {"focal", cam.focal}}}});

  const Vec3 chair(0.5, 0.4, 2.0);
  const Vec3 pillow_a = chair + Vec3(0, 0, 3.51);  // exactly 3.51 m away
  double dz_b = std::sqrt(3.67 * 3.67 - 1.2 * 1.2 - 0.2 * 0.2);
  const Vec3 pillow_b = chair + Vec3(1.2, -0.2, dz_b);  // exactly 3.67 m away

  json objects = json::array();
  auto add = [&](const char* label, json bj) {
    json o{{"label", label}, {"box", bj}, {"in_frames", {true}}};
    add_refs(o, make_box(bj, label), cam, Pose::identity(), 0);
    objects.push_back(std::move(o));
  };
  add("pillow", box_json(pillow_a.x(), pillow_a.y(), pillow_a.z(), 0.5, 0.3, 0.4));
  add("pillow", box_json(pillow_b.x(), pillow_b.y(), pillow_b.z(), 0.5, 0.3, 0.4));
  add("chair", box_json(chair.x(), chair.y(), chair.z(), 0.5, 0.97, 0.45));
  add("table", box_json(-1.5, 0.5, 3.0, 1.2, 0.71, 0.8));

  return json{{"schema_version", 1},
              {"scene_id", "scene_distance"},
              {"source", "fixture"},
              {"frames", frames},
              {"objects", objects}};
}

/// Writes the whole corpus under `dir`; returns the manifest paths.
inline std::vector<std::string> write_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::pair<std::string, json>> scenes = {
      {"scene_printer", scene_printer()},
      {"scene_pair", scene_pair(dir)},
      {"scene_video", scene_video()},
      {"scene_distance", scene_distance()},
  };
  std::vector<std::string> paths;
  for (auto& [name, j] : scenes) {
    std::string path = (fs::path(dir) / (name + ".json")).string();
    std::ofstream f(path);
    f << j.dump(2) << "\n";
    paths.push_back(path);
  }
  return paths;
}

}  // namespace fixtures
