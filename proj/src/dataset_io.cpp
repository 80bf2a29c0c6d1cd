#include "spatialforge/dataset_io.hpp"

#include <filesystem>
#include <fstream>

#include "spatialforge/errors.hpp"
#include "spatialforge/image_io.hpp"

namespace spatialforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& pointer, const std::string& msg) {
  throw SchemaViolation(pointer, msg);
}

const json& need(const json& j, const char* key, const std::string& pointer) {
  if (!j.is_object() || !j.contains(key)) fail(pointer + "/" + key, "missing field");
  return j.at(key);
}

double need_num(const json& j, const char* key, const std::string& pointer) {
  const json& v = need(j, key, pointer);
  if (!v.is_number()) fail(pointer + "/" + key, "expected a number");
  return v.get<double>();
}

int need_int(const json& j, const char* key, const std::string& pointer) {
  const json& v = need(j, key, pointer);
  if (!v.is_number_integer()) fail(pointer + "/" + key, "expected an integer");
  return v.get<int>();
}

std::string need_str(const json& j, const char* key, const std::string& pointer) {
  const json& v = need(j, key, pointer);
  if (!v.is_string()) fail(pointer + "/" + key, "expected a string");
  return v.get<std::string>();
}

Vec3 parse_vec3(const json& v, const std::string& pointer) {
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
      !v[2].is_number())
    fail(pointer, "expected [x, y, z]");
  return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
}

Mat3 parse_mat3(const json& v, const std::string& pointer) {
  if (!v.is_array() || v.size() != 3) fail(pointer, "expected a 3x3 matrix");
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    const json& row = v[r];
    if (!row.is_array() || row.size() != 3)
      fail(pointer + "/" + std::to_string(r), "expected a row of 3 numbers");
    for (int c = 0; c < 3; ++c) {
      if (!row[c].is_number())
        fail(pointer + "/" + std::to_string(r) + "/" + std::to_string(c),
             "expected a number");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

CameraModel parse_camera(const json& j, const std::string& pointer) {
  int w = need_int(j, "width", pointer);
  int h = need_int(j, "height", pointer);
  double f = need_num(j, "focal", pointer);
  if (w < 1) fail(pointer + "/width", "must be >= 1");
  if (h < 1) fail(pointer + "/height", "must be >= 1");
  if (!(f > 0)) fail(pointer + "/focal", "must be > 0");
  double cx = j.contains("cx") ? need_num(j, "cx", pointer) : 0.5 * w;
  double cy = j.contains("cy") ? need_num(j, "cy", pointer) : 0.5 * h;
  return CameraModel(w, h, f, cx, cy);
}

Pose parse_pose(const json& j, const std::string& pointer) {
  Mat3 r = parse_mat3(need(j, "rotation", pointer), pointer + "/rotation");
  Vec3 t = parse_vec3(need(j, "translation", pointer), pointer + "/translation");
  Pose p{r, t};
  if (!p.is_rigid(1e-6)) fail(pointer + "/rotation", "not orthonormal with det +1");
  return p;
}

Box3D parse_box(const json& j, const std::string& pointer) {
  Box3D b;
  b.center = parse_vec3(need(j, "center", pointer), pointer + "/center");
  b.size = parse_vec3(need(j, "size", pointer), pointer + "/size");
  const json& a = need(j, "angles", pointer);
  Vec3 ang = parse_vec3(a, pointer + "/angles");
  b.angles = {ang.x(), ang.y(), ang.z()};
  for (int i = 0; i < 3; ++i) {
    if (!(b.size[i] > 0)) fail(pointer + "/size", "components must be > 0");
    if (std::abs(ang[i]) > 1.0) fail(pointer + "/angles", "must lie in [-1, 1]");
  }
  return b;
}

std::string resolve(const std::string& dir, const std::string& rel) {
  fs::path p(rel);
  if (p.is_absolute() || dir.empty()) return rel;
  return (fs::path(dir) / p).lexically_normal().string();
}

// Raw pack straight from the manifest: poses world-from-camera, objects in
// world coordinates.
ScenePack build_raw(const SceneManifest& m, const NormalizeOptions& opts) {
  const json& j = m.raw;
  ScenePack pack;
  pack.id = need_str(j, "scene_id", "");
  pack.source = j.value("source", std::string());
  if (j.contains("fps")) {
    if (!j["fps"].is_number()) fail("/fps", "expected a number");
    pack.fps = j["fps"].get<double>();
  }

  const json& frames = need(j, "frames", "");
  if (!frames.is_array() || frames.empty()) fail("/frames", "expected a nonempty array");

  for (size_t k = 0; k < frames.size(); ++k) {
    std::string ptr = "/frames/" + std::to_string(k);
    const json& fj = frames[k];
    Frame fr;
    fr.image = need_str(fj, "image", ptr);
    fr.cam = parse_camera(need(fj, "camera", ptr), ptr + "/camera");
    fr.world_from_cam =
        fj.contains("pose") ? parse_pose(fj["pose"], ptr + "/pose") : Pose::identity();
    if (fj.contains("depth")) {
      if (!fj["depth"].is_string()) fail(ptr + "/depth", "expected a path string");
      fr.depth_path = resolve(m.dir, fj["depth"].get<std::string>());
      if (opts.load_depth) {
        fr.depth = read_depth_png(fr.depth_path, opts.depth_divisor);
        if (fr.depth.width != fr.cam.width || fr.depth.height != fr.cam.height)
          fail(ptr + "/depth", "depth dimensions do not match the camera");
      }
    }
    if (fj.contains("time_index")) fr.time_index = need_int(fj, "time_index", ptr);
    pack.frames.push_back(std::move(fr));
  }

  if (j.contains("objects")) {
    const json& objs = j["objects"];
    if (!objs.is_array()) fail("/objects", "expected an array");
    for (size_t i = 0; i < objs.size(); ++i) {
      std::string ptr = "/objects/" + std::to_string(i);
      const json& oj = objs[i];
      SceneObject obj;
      obj.label = need_str(oj, "label", ptr);
      obj.box = parse_box(need(oj, "box", ptr), ptr + "/box");
      obj.box.label = obj.label;
      obj.axis_aligned_source = oj.value("axis_aligned", false);
      if (obj.axis_aligned_source) obj.box.angles = {0, 0, 0};

      if (oj.contains("in_frames")) {
        const json& flags = oj["in_frames"];
        if (!flags.is_array() || flags.size() != pack.frames.size())
          fail(ptr + "/in_frames", "length must equal the frame count");
        bool any = false;
        for (const auto& b : flags) {
          if (!b.is_boolean()) fail(ptr + "/in_frames", "expected booleans");
          obj.in_frames.push_back(b.get<bool>());
          any = any || b.get<bool>();
        }
        if (!any) fail(ptr + "/in_frames", "object is in no frame");
      }
      if (oj.contains("appearance_frame"))
        obj.appearance_frame = need_int(oj, "appearance_frame", ptr);
      if (oj.contains("points")) {
        const json& pts = oj["points"];
        if (!pts.is_array()) fail(ptr + "/points", "expected an array");
        for (size_t p = 0; p < pts.size(); ++p)
          obj.points.push_back(
              parse_vec3(pts[p], ptr + "/points/" + std::to_string(p)));
      }
      if (oj.contains("box2d")) {
        for (const auto& [key, val] : oj["box2d"].items()) {
          if (!val.is_array() || val.size() != 4)
            fail(ptr + "/box2d/" + key, "expected [x1, y1, x2, y2]");
          obj.refs.box2d[std::stoi(key)] =
              Box2{val[0].get<double>(), val[1].get<double>(), val[2].get<double>(),
                   val[3].get<double>()};
        }
      }
      if (oj.contains("point2d")) {
        for (const auto& [key, val] : oj["point2d"].items()) {
          if (!val.is_array() || val.size() != 2)
            fail(ptr + "/point2d/" + key, "expected [u, v]");
          obj.refs.point2d[std::stoi(key)] =
              Vec2(val[0].get<double>(), val[1].get<double>());
        }
      }
      if (oj.contains("marker_id")) obj.refs.marker_id = need_int(oj, "marker_id", ptr);
      pack.objects.push_back(std::move(obj));
    }
  }
  return pack;
}

ScenePack normalize_pack(ScenePack pack, const NormalizeOptions& opts) {
  const Pose& first = pack.frames.front().world_from_cam;
  bool already_frame1 = (first.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() ==
                            0.0 &&
                        first.translation.cwiseAbs().maxCoeff() == 0.0;
  if (!already_frame1) {
    Pose to_frame1 = first.inverse();
    for (auto& fr : pack.frames)
      fr.world_from_cam = to_frame1.compose(fr.world_from_cam);
    // by construction frame 1 is now the origin; pin it exactly so a second
    // normalize is a bitwise no-op
    pack.frames.front().world_from_cam = Pose::identity();

    for (auto& obj : pack.objects) {
      obj.box = transform_box(obj.box, to_frame1);
      obj.box.label = obj.label;
      for (auto& p : obj.points) p = to_frame1.apply(p);
    }
  }

  // Visibility flags for objects that did not bring their own: center check
  // against the depth map when present, otherwise a frustum test.
  std::vector<SceneObject> kept;
  for (auto& obj : pack.objects) {
    if (obj.in_frames.empty()) {
      bool any = false;
      for (const auto& fr : pack.frames) {
        auto v = check_visibility(obj.box.center, fr.world_from_cam, fr.cam,
                                  fr.depth, opts.rel_tol);
        obj.in_frames.push_back(v.status == Visibility::Visible);
        any = any || obj.in_frames.back();
      }
      if (!any) continue;  // annotated but never visible: drop
    }
    kept.push_back(std::move(obj));
  }
  pack.objects = std::move(kept);
  return pack;
}

}  // namespace

SceneManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path);
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw DataError("manifest is not valid JSON: " + path);
  if (!j.is_object()) throw SchemaViolation("", "manifest must be a JSON object");
  int version = j.value("schema_version", 1);
  if (version != 1) fail("/schema_version", "unsupported schema version");

  SceneManifest m;
  m.raw = std::move(j);
  m.path = path;
  m.dir = fs::path(path).parent_path().string();
  // validate eagerly so load_manifest alone surfaces schema problems
  build_raw(m, NormalizeOptions{1000.0, /*load_depth=*/false});
  return m;
}

ScenePack normalize(const SceneManifest& manifest, const NormalizeOptions& opts) {
  return normalize_pack(build_raw(manifest, opts), opts);
}

ScenePack unify_pack(const ScenePack& pack, double f_new) {
  ScenePack out = pack;
  for (size_t k = 0; k < out.frames.size(); ++k) {
    Frame& fr = out.frames[k];
    UnifyResult r = unify_fov(fr.cam, f_new);
    for (auto& obj : out.objects) {
      auto bit = obj.refs.box2d.find(static_cast<int>(k));
      if (bit != obj.refs.box2d.end())
        bit->second = rescale_box(bit->second, r.scale_x, r.scale_y, r.new_cam);
      auto pit = obj.refs.point2d.find(static_cast<int>(k));
      if (pit != obj.refs.point2d.end())
        pit->second = rescale_point(pit->second, r.scale_x, r.scale_y, r.new_cam);
    }
    if (!fr.depth.empty())
      fr.depth = resample_depth_nearest(fr.depth, r.new_width, r.new_height);
    fr.cam = r.new_cam;
  }
  out.fov_unified = true;
  out.f_new = f_new;
  return out;
}

json pack_to_json(const ScenePack& pack) {
  json j;
  j["schema_version"] = 1;
  j["scene_id"] = pack.id;
  j["source"] = pack.source;
  j["fov_unified"] = pack.fov_unified;
  j["f_new"] = pack.f_new;
  if (pack.fps) j["fps"] = *pack.fps;

  json frames = json::array();
  for (const auto& fr : pack.frames) {
    json fj;
    fj["image"] = fr.image;
    fj["camera"] = {{"width", fr.cam.width},
                    {"height", fr.cam.height},
                    {"focal", fr.cam.focal},
                    {"cx", fr.cam.cx},
                    {"cy", fr.cam.cy}};
    json rot = json::array();
    for (int r = 0; r < 3; ++r)
      rot.push_back({fr.world_from_cam.rotation(r, 0), fr.world_from_cam.rotation(r, 1),
                     fr.world_from_cam.rotation(r, 2)});
    fj["pose"] = {{"rotation", rot},
                  {"translation",
                   {fr.world_from_cam.translation.x(), fr.world_from_cam.translation.y(),
                    fr.world_from_cam.translation.z()}}};
    if (!fr.depth_path.empty()) fj["depth"] = fr.depth_path;
    if (fr.time_index) fj["time_index"] = *fr.time_index;
    frames.push_back(std::move(fj));
  }
  j["frames"] = std::move(frames);

  json objs = json::array();
  for (const auto& obj : pack.objects) {
    json oj;
    oj["label"] = obj.label;
    oj["box"] = {{"center", {obj.box.center.x(), obj.box.center.y(), obj.box.center.z()}},
                 {"size", {obj.box.size.x(), obj.box.size.y(), obj.box.size.z()}},
                 {"angles", {obj.box.angles.pitch, obj.box.angles.yaw, obj.box.angles.roll}}};
    oj["in_frames"] = obj.in_frames;
    if (obj.axis_aligned_source) oj["axis_aligned"] = true;
    if (obj.appearance_frame) oj["appearance_frame"] = *obj.appearance_frame;
    if (!obj.points.empty()) {
      json pts = json::array();
      for (const auto& p : obj.points) pts.push_back({p.x(), p.y(), p.z()});
      oj["points"] = std::move(pts);
    }
    if (!obj.refs.box2d.empty()) {
      json b2;
      for (const auto& [k, b] : obj.refs.box2d)
        b2[std::to_string(k)] = {b.x1, b.y1, b.x2, b.y2};
      oj["box2d"] = std::move(b2);
    }
    if (!obj.refs.point2d.empty()) {
      json p2;
      for (const auto& [k, p] : obj.refs.point2d)
        p2[std::to_string(k)] = {p.x(), p.y()};
      oj["point2d"] = std::move(p2);
    }
    if (obj.refs.marker_id) oj["marker_id"] = *obj.refs.marker_id;
    objs.push_back(std::move(oj));
  }
  j["objects"] = std::move(objs);
  return j;
}

ScenePack pack_from_json(const json& j, const std::string& base_dir,
                         const NormalizeOptions& opts) {
  SceneManifest m;
  m.raw = j;
  m.dir = base_dir;
  ScenePack pack = build_raw(m, opts);
  pack.fov_unified = j.value("fov_unified", false);
  pack.f_new = j.value("f_new", 0.0);
  return pack;
}

void save_pack(const ScenePack& pack, const std::string& path) {
  ScenePack to_save = pack;
  fs::path out(path);
  // attached depth maps are materialized next to the pack so a reload sees
  // dimensions consistent with the (possibly unified) cameras
  for (size_t k = 0; k < to_save.frames.size(); ++k) {
    Frame& fr = to_save.frames[k];
    if (fr.depth.empty()) continue;
    std::string name = out.stem().string() + "_d" + std::to_string(k) + ".png";
    write_depth_png(fr.depth, (out.parent_path() / name).string());
    fr.depth_path = name;  // store-relative so the store can be relocated
  }
  std::ofstream f(path);
  if (!f) throw DataError("cannot write pack: " + path);
  f << pack_to_json(to_save).dump(2) << "\n";
}

ScenePack load_pack(const std::string& path, const NormalizeOptions& opts) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pack: " + path);
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw DataError("pack is not valid JSON: " + path);
  return pack_from_json(j, fs::path(path).parent_path().string(), opts);
}

void write_jsonl(const std::vector<json>& records, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write: " + path);
  for (const auto& r : records) f << r.dump() << "\n";
}

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open: " + path);
  std::vector<json> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw ParseError(lineno, "malformed JSON record");
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace spatialforge
