#include "spatialforge/sample_gen.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "spatialforge/errors.hpp"
#include "spatialforge/iou3d.hpp"
#include "spatialforge/rewards.hpp"
#include "spatialforge/rng.hpp"
#include "spatialforge/visibility.hpp"

namespace spatialforge {

using nlohmann::json;

const char* kCotSystemPrompt =
    "You are a helpful assistant. You should first think about the reasoning "
    "process in the mind and then provide the user with the answer. The "
    "reasoning process is enclosed within <think> </think> tags, i.e. <think> "
    "reasoning process here </think> answer here.";

namespace {

constexpr const char* kTaskTags[] = {
    "relative_depth",    "distance_compare",  "det3d_si",
    "det3d_mi",          "grounding3d",       "measurement_height",
    "measurement_dim",   "scene_caption_si",  "scene_caption_mi",
    "correspondence",    "objobj_direction",  "objobj_distance",
    "camcam_position",   "camcam_facing",     "camera_motion_rotation",
    "camera_motion_translation", "video_appearance_order", "video_count",
    "video_objobj",
};

constexpr const char* kRefColors[] = {
    "orange", "purple", "yellow", "cyan", "green",  "pink",
    "red",    "blue",   "brown",  "magenta", "lime", "gray",
};

std::string sub(std::string text, const std::string& key, const std::string& value) {
  std::string tok = "{" + key + "}";
  size_t pos = 0;
  while ((pos = text.find(tok, pos)) != std::string::npos) {
    text.replace(pos, tok.size(), value);
    pos += value.size();
  }
  return text;
}

char letter(int i) { return static_cast<char>('A' + i); }

int pick_template(Rng& rng, int pool_size, int template_id) {
  if (template_id >= 0) {
    if (template_id >= pool_size) throw ValidationError("template_id out of range");
    return template_id;
  }
  return static_cast<int>(rng.below(static_cast<uint64_t>(pool_size)));
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// "x and y" / "x, y and z"
std::string join_natural(const std::vector<std::string>& parts) {
  if (parts.empty()) return "";
  if (parts.size() == 1) return parts[0];
  std::string out;
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    if (i) out += ", ";
    out += parts[i];
  }
  return out + " and " + parts.back();
}

std::string plural(const std::string& noun) {
  if (noun.empty()) return noun;
  char last = noun.back();
  if (last == 's' || last == 'x' || last == 'z') return noun + "es";
  if (noun.size() >= 2) {
    std::string tail = noun.substr(noun.size() - 2);
    if (tail == "ch" || tail == "sh") return noun + "es";
  }
  return noun + "s";
}

// Multi-image packs must be normalized (frame 1 at the origin) before any
// generator consumes cross-frame geometry.
void require_frame1_coords(const ScenePack& pack) {
  if (pack.frames.size() < 2) return;
  const Pose& p = pack.frames.front().world_from_cam;
  if ((p.rotation - Mat3::Identity()).norm() > 1e-9 || p.translation.norm() > 1e-9)
    throw ValidationError("pack is not in frame-1 coordinates; run normalize first");
}

InstructionSample start_sample(const ScenePack& pack, Task task, uint64_t seed,
                               int n_media_frames) {
  InstructionSample s;
  s.task = task;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(seed));
  s.id = pack.id + "__" + std::string(task_tag(task)) + "__" + buf;
  int count = n_media_frames < 0 ? static_cast<int>(pack.frames.size())
                                 : std::min<int>(n_media_frames,
                                                 static_cast<int>(pack.frames.size()));
  for (int k = 0; k < count; ++k) s.media.push_back(pack.frames[k].image);
  s.meta["scene"] = pack.id;
  s.meta["source"] = pack.source;
  s.meta["seed"] = std::string(buf);
  return s;
}

void finish_qa(InstructionSample& s, const std::string& question,
               const std::string& answer) {
  s.turns.push_back({"user", question});
  s.turns.push_back({"assistant", answer});
  s.answer = answer;
}

// Candidate objects visible in a frame, optionally requiring a 2D ref kind.
std::vector<int> visible_objects(const ScenePack& pack, int frame,
                                 const RefFormat* need_ref = nullptr) {
  std::vector<int> out;
  for (size_t i = 0; i < pack.objects.size(); ++i) {
    const SceneObject& o = pack.objects[i];
    if (frame >= static_cast<int>(o.in_frames.size()) || !o.in_frames[frame])
      continue;
    if (need_ref) {
      if (*need_ref == RefFormat::Point && !o.refs.point2d.count(frame)) continue;
      if (*need_ref == RefFormat::Box2d && !o.refs.box2d.count(frame)) continue;
      if (*need_ref == RefFormat::VisualPrompt && !o.refs.marker_id) continue;
    }
    out.push_back(static_cast<int>(i));
  }
  return out;
}

// Seeded selection of k objects whose pairwise center depths differ by at
// least `gap`. Deterministic; falls back to the greedy chain when random
// attempts keep colliding.
std::vector<int> select_depth_separated(const ScenePack& pack,
                                        std::vector<int> candidates, int k,
                                        double gap, Rng& rng) {
  if (static_cast<int>(candidates.size()) < k)
    throw InsufficientSeparation("not enough candidate objects");
  std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    return pack.objects[a].box.center.z() < pack.objects[b].box.center.z();
  });
  // greedy chain gives the maximum subset size with pairwise gaps >= gap
  std::vector<int> chain;
  double last = -1e18;
  for (int idx : candidates) {
    double z = pack.objects[idx].box.center.z();
    if (z - last >= gap) {
      chain.push_back(idx);
      last = z;
    }
  }
  if (static_cast<int>(chain.size()) < k)
    throw InsufficientSeparation("depth gaps below the minimum");

  auto z_of = [&](int idx) { return pack.objects[idx].box.center.z(); };
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<int> pool = candidates;
    rng.shuffle(pool);
    std::vector<int> chosen;
    for (int idx : pool) {
      bool ok = true;
      for (int c : chosen)
        if (std::abs(z_of(idx) - z_of(c)) < gap) {
          ok = false;
          break;
        }
      if (ok) chosen.push_back(idx);
      if (static_cast<int>(chosen.size()) == k) break;
    }
    if (static_cast<int>(chosen.size()) == k) return chosen;
  }
  chain.resize(k);
  return chain;
}

std::vector<int> sorted_by_depth(const ScenePack& pack, std::vector<int> idx,
                                 OrderDirection dir) {
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return pack.objects[a].box.center.z() < pack.objects[b].box.center.z();
  });
  if (dir == OrderDirection::FarToNear) std::reverse(idx.begin(), idx.end());
  return idx;
}

std::string box2d_answer_json(const ScenePack& pack, const std::vector<int>& order,
                              int frame) {
  std::string out = "[";
  for (size_t i = 0; i < order.size(); ++i) {
    const SceneObject& o = pack.objects[order[i]];
    const Box2& b = o.refs.box2d.at(frame);
    out += i == 0 ? "\n\t" : ",\n\t";
    out += "{\"bbox_2d\":[";
    const double v[4] = {b.x1, b.y1, b.x2, b.y2};
    for (int j = 0; j < 4; ++j) {
      if (j) out += ",";
      out += std::to_string(static_cast<long long>(std::llround(v[j])));
    }
    out += "],\"label\":" + json(o.label).dump() + "}";
  }
  out += order.empty() ? "]" : "\n]";
  return out;
}

// MCQ helper: place the correct option among distractors at a seeded slot.
struct Mcq {
  std::vector<std::string> options;
  int correct = 0;
  char correct_letter() const { return letter(correct); }
};

Mcq build_mcq(const std::string& correct, std::vector<std::string> distractor_pool,
              int n_options, Rng& rng) {
  distractor_pool.erase(
      std::remove(distractor_pool.begin(), distractor_pool.end(), correct),
      distractor_pool.end());
  rng.shuffle(distractor_pool);
  Mcq m;
  int n_distract = std::min<int>(n_options - 1, static_cast<int>(distractor_pool.size()));
  m.options.assign(distractor_pool.begin(), distractor_pool.begin() + n_distract);
  m.correct = static_cast<int>(rng.below(m.options.size() + 1));
  m.options.insert(m.options.begin() + m.correct, correct);
  return m;
}

std::string mcq_inline(const Mcq& m) {
  std::vector<std::string> parts;
  for (size_t i = 0; i < m.options.size(); ++i)
    parts.push_back(std::string(1, letter(static_cast<int>(i))) + ". " + m.options[i]);
  return join(parts, ", ");
}

std::string mcq_lines(const Mcq& m) {
  std::vector<std::string> parts;
  for (size_t i = 0; i < m.options.size(); ++i)
    parts.push_back(std::string(1, letter(static_cast<int>(i))) + ". " + m.options[i]);
  return join(parts, "\n");
}

std::string mcq_answer(const Mcq& m) {
  return std::string(1, m.correct_letter()) + ". " + m.options[m.correct];
}

bool near_sector_boundary(double bearing_deg, double margin_deg) {
  // boundaries at odd multiples of 22.5
  double r = std::fmod(std::fmod(bearing_deg, 45.0) + 45.0, 45.0);
  return std::abs(r - 22.5) < margin_deg;
}

const std::vector<std::string>& compass_names() {
  static const std::vector<std::string> names = {
      "north", "northeast", "east", "southeast",
      "south", "southwest", "west", "northwest"};
  return names;
}

std::vector<std::string> sector_names(bool hyphen) {
  std::vector<std::string> v;
  for (int i = 0; i < 8; ++i)
    v.push_back(ego_sector_name(static_cast<EgoSector>(i), hyphen));
  return v;
}

// Shared camera-parameter preamble for detection-style prompts.
std::string camera_preamble(const ScenePack& pack) {
  const CameraModel& cam = pack.frames[0].cam;
  std::string world_sentence =
      pack.multi_frame()
          ? "We take the camera coordinate system of the first image as the "
            "world coordinate system."
          : "We take the camera coordinate system as the world coordinate "
            "system.";
  std::string text =
      "Here are the detailed camera parameters for the image.\n\n"
      "Camera intrinsic parameters: Horizontal fov, hfov={hfov}, and vertical "
      "fov, vfov={vfov}. Image width={w} and height={h}. We do not consider "
      "distortion parameters here.\n\n"
      "Camera coordinate: X-axis points rightward, Y-axis points downward, "
      "and Z-axis points forward. The origin point is the camera location.\n"
      "{world}\n\n"
      "3D bounding box format: [x_center, y_center, z_center, x_size, y_size, "
      "z_size, pitch, yaw, roll]\n\n"
      "* x_center, y_center, z_center: the center of the object in the camera "
      "coordinate, in meters. z_center is the depth of the object in space.\n\n"
      "* x_size, y_size, z_size: The dimensions of the object along the ( XYZ "
      ") axes, in meters, when the rotation angles are zero.\n\n"
      "* pitch, yaw, roll: Euler angles representing rotations around the X, "
      "Y, and Z axes, respectively. Each angle is normalized to the range of "
      "(-1, 1) and is multiplied by 180 to convert it into degrees.\n\n"
      "Output a json list where each entry contains the object name in "
      "\"label\" and its 3D bounding box in \"bbox_3d\".";
  text = sub(text, "hfov", format2(cam.hfov_deg()));
  text = sub(text, "vfov", format2(cam.vfov_deg()));
  text = sub(text, "w", std::to_string(cam.width));
  text = sub(text, "h", std::to_string(cam.height));
  text = sub(text, "world", world_sentence);
  return text;
}

std::string serialize_box_inline(const Box3D& b) {
  const double vals[9] = {b.center.x(), b.center.y(), b.center.z(),
                          b.size.x(),   b.size.y(),   b.size.z(),
                          b.angles.pitch, b.angles.yaw, b.angles.roll};
  std::string out = "[";
  for (int i = 0; i < 9; ++i) {
    if (i) out += ",";
    out += format2(vals[i]);
  }
  return out + "]";
}

}  // namespace

// ---------------------------------------------------------------------------

const char* task_tag(Task t) { return kTaskTags[static_cast<int>(t)]; }

std::optional<Task> task_from_tag(const std::string& tag) {
  for (int i = 0; i < static_cast<int>(std::size(kTaskTags)); ++i)
    if (tag == kTaskTags[i]) return static_cast<Task>(i);
  return std::nullopt;
}

std::vector<Task> all_tasks() {
  std::vector<Task> out;
  for (int i = 0; i < static_cast<int>(std::size(kTaskTags)); ++i)
    out.push_back(static_cast<Task>(i));
  return out;
}

json InstructionSample::to_json() const {
  json j;
  j["id"] = id;
  j["task"] = task_tag(task);
  j["media"] = media;
  json messages = json::array();
  for (size_t i = 0; i < turns.size(); ++i) {
    std::string content = turns[i].content;
    if (think && i + 1 == turns.size() && turns[i].role == "assistant")
      content = "<think>" + *think + "</think> " + content;
    messages.push_back({{"role", turns[i].role}, {"content", content}});
  }
  j["messages"] = std::move(messages);
  j["answer"] = answer;
  j["meta"] = meta;
  return j;
}

const char* compass_name(Compass c) {
  return compass_names()[static_cast<int>(c)].c_str();
}

double compass_bearing_deg(const Vec3& a, const Vec3& b, const Vec3& c) {
  Vec2 north(b.x() - a.x(), b.z() - a.z());
  Vec2 d(c.x() - a.x(), c.z() - a.z());
  if (north.norm() < 1e-9)
    throw DegenerateReference("reference direction has no ground projection");
  if (d.norm() < 1e-9)
    throw DegenerateReference("query point coincides with the anchor");
  north.normalize();
  // clockwise viewed from above (Y down): east is north rotated 90 degrees CW
  Vec2 east(north.y(), -north.x());
  double deg = std::atan2(d.dot(east), d.dot(north)) * 180.0 / M_PI;
  if (deg < 0) deg += 360.0;
  return deg;
}

Compass compass_from_bearing(double bearing_deg) {
  double r = std::fmod(std::fmod(bearing_deg, 360.0) + 360.0, 360.0) / 45.0;
  int lo = static_cast<int>(std::floor(r));
  double frac = r - lo;
  int idx;
  if (std::abs(frac - 0.5) < 1e-12)
    idx = (lo % 2 == 0) ? lo : lo + 1;  // tie toward the cardinal
  else
    idx = static_cast<int>(std::lround(r));
  return static_cast<Compass>(idx % 8);
}

Compass compass_relation(const Vec3& a, const Vec3& b, const Vec3& c) {
  return compass_from_bearing(compass_bearing_deg(a, b, c));
}

Compass compass_rotated(Compass base, double clockwise_deg) {
  return compass_from_bearing(static_cast<int>(base) * 45.0 + clockwise_deg);
}

const char* ego_sector_name(EgoSector s, bool hyphen) {
  static const char* kHyphen[] = {"front", "front-right", "right", "back-right",
                                  "back",  "back-left",   "left",  "front-left"};
  static const char* kSpace[] = {"front", "front right", "right", "back right",
                                 "back",  "back left",   "left",  "front left"};
  return hyphen ? kHyphen[static_cast<int>(s)] : kSpace[static_cast<int>(s)];
}

double position_bearing_deg(double x, double z) {
  if (x == 0.0 && z == 0.0) return 0.0;  // zero offset counts as front
  double deg = std::atan2(x, z) * 180.0 / M_PI;
  if (deg < 0) deg += 360.0;
  return deg;
}

EgoSector position_sector(double x, double z) {
  double r = position_bearing_deg(x, z) / 45.0;
  int lo = static_cast<int>(std::floor(r));
  double frac = r - lo;
  int idx;
  if (std::abs(frac - 0.5) < 1e-12)
    idx = (lo % 2 == 0) ? lo : lo + 1;
  else
    idx = static_cast<int>(std::lround(r));
  return static_cast<EgoSector>(idx % 8);
}

CameraMotion classify_camera_motion(const Pose& world_from_cam1,
                                    const Pose& world_from_cam2,
                                    const GenConfig& cfg) {
  CameraMotion m;
  Mat3 r_rel = world_from_cam1.rotation.transpose() * world_from_cam2.rotation;
  m.relative_rotation = matrix_to_euler(r_rel).angles;
  m.relative_translation = world_from_cam1.rotation.transpose() *
                           (world_from_cam2.translation - world_from_cam1.translation);

  struct Axis {
    double value;
    const char* pos;
    const char* neg;
  };
  const Axis rot[3] = {
      {m.relative_rotation.yaw_deg(), "panning to the right", "panning to the left"},
      {m.relative_rotation.pitch_deg(), "tilting upward", "tilting downward"},
      {m.relative_rotation.roll_deg(), "rolling clockwise", "rolling counterclockwise"},
  };
  double rot_max = 0, trans_max = 0;
  for (const auto& a : rot) rot_max = std::max(rot_max, std::abs(a.value));
  const Axis trans[3] = {
      {m.relative_translation.x(), "rightward", "leftward"},
      {m.relative_translation.y(), "downward", "upward"},
      {m.relative_translation.z(), "forward", "backward"},
  };
  for (const auto& a : trans) trans_max = std::max(trans_max, std::abs(a.value));

  for (const auto& a : rot)
    if (std::abs(a.value) >= cfg.rotation_floor_deg &&
        std::abs(a.value) >= cfg.dominant_ratio * rot_max)
      m.rotation_labels.push_back(a.value > 0 ? a.pos : a.neg);
  for (const auto& a : trans)
    if (std::abs(a.value) >= cfg.translation_floor_m &&
        std::abs(a.value) >= cfg.dominant_ratio * trans_max)
      m.translation_labels.push_back(a.value > 0 ? a.pos : a.neg);

  if (m.rotation_labels.empty() && m.translation_labels.empty())
    throw NoSignificantMotion("relative pose below rotation and translation floors");
  return m;
}

// ---------------------------------------------------------------------------
// Naming

std::string display_name(const ScenePack& pack, int object_index) {
  const std::string& label = pack.objects[object_index].label;
  int same = 0, rank = -1;
  for (size_t i = 0; i < pack.objects.size(); ++i) {
    if (pack.objects[i].label != label) continue;
    if (static_cast<int>(i) == object_index) rank = same;
    ++same;
  }
  if (same <= 1) return label;
  if (rank < 26) return label + "-" + std::string(1, letter(rank));
  return label + "-" + std::to_string(rank + 1);  // beyond Z: numeric
}

const char* ref_color(int object_index) {
  return kRefColors[object_index % static_cast<int>(std::size(kRefColors))];
}

std::string display_name_with_ref(const ScenePack& pack, int object_index,
                                  int frame) {
  std::string base = display_name(pack, object_index);
  const ObjectRefs& refs = pack.objects[object_index].refs;
  if (refs.point2d.count(frame))
    return base + " (" + ref_color(object_index) + " point)";
  if (refs.box2d.count(frame))
    return base + " (" + ref_color(object_index) + " box)";
  return base;
}

// ---------------------------------------------------------------------------
// Depth ordering

InstructionSample gen_depth_order(const ScenePack& pack, int k, RefFormat format,
                                  uint64_t seed, const GenConfig& cfg,
                                  int template_id) {
  if (format == RefFormat::Point) k = 2;
  if (k < 2) throw ValidationError("gen_depth_order: k must be >= 2");
  Rng rng(seed);

  std::vector<int> candidates = visible_objects(pack, 0, &format);
  std::vector<int> chosen = select_depth_separated(pack, candidates, k,
                                                   cfg.min_depth_gap, rng);
  rng.shuffle(chosen);  // presentation order

  InstructionSample s = start_sample(pack, Task::RelativeDepth, seed, 1);
  json gold;
  gold["objects"] = chosen;

  switch (format) {
    case RefFormat::Text: {
      static const std::vector<std::pair<const char*, OrderDirection>> kPool = {
          {"Tell me the depth relationship of the objects of {options}.",
           OrderDirection::NearToFar},
          {"Based on the image, arrange the object represented by these "
           "sentences in a list from the closest to the farthest.\n{numbered}",
           OrderDirection::NearToFar},
          {"Consider how far each listed object is from the camera and sort "
           "them from the farthest to the nearest: {options}.",
           OrderDirection::FarToNear},
      };
      int t = pick_template(rng, static_cast<int>(kPool.size()), template_id);
      OrderDirection dir = kPool[t].second;
      std::vector<int> order = sorted_by_depth(pack, chosen, dir);

      std::vector<std::string> opts, numbered;
      for (size_t i = 0; i < chosen.size(); ++i) {
        opts.push_back(std::string(1, letter(static_cast<int>(i))) + "." +
                       display_name(pack, chosen[i]));
        numbered.push_back(std::to_string(i + 1) + ". " +
                           display_name(pack, chosen[i]));
      }
      std::string q = sub(kPool[t].first, "options", join(opts, ", "));
      q = sub(q, "numbered", join(numbered, "\n"));

      std::string ans;
      if (t == 1) {
        std::vector<std::string> parts;
        for (size_t i = 0; i < order.size(); ++i)
          parts.push_back(std::to_string(i + 1) + ". " +
                          display_name(pack, order[i]));
        ans = join(parts, ", ");
      } else {
        std::vector<std::string> letters;
        for (int idx : order) {
          auto at = std::find(chosen.begin(), chosen.end(), idx) - chosen.begin();
          letters.push_back(std::string(1, letter(static_cast<int>(at))));
        }
        ans = std::string("The objects from ") +
              (dir == OrderDirection::NearToFar ? "near to far" : "far to near") +
              " is " + join(letters, ", ");
      }
      finish_qa(s, q, ans);
      gold["kind"] = "order";
      gold["direction"] = dir == OrderDirection::NearToFar ? "near_to_far" : "far_to_near";
      gold["sorted"] = order;
      s.meta["template_id"] = t;
      s.meta["format"] = "text";
      break;
    }
    case RefFormat::Point: {
      static const std::vector<std::pair<const char*, bool>> kPool = {
          {"The image contains {color} point-A and point-B. Please decide "
           "which point is closer to the camera.", true},
          {"Two points, point-A and point-B, are marked in the image. Which "
           "one lies nearer to the camera?", true},
          {"Look at point-A and point-B in the image. Which point is farther "
           "from the camera?", false},
      };
      int t = pick_template(rng, static_cast<int>(kPool.size()), template_id);
      bool nearest = kPool[t].second;
      std::string q = sub(kPool[t].first, "color", ref_color(chosen[0]));
      double z0 = pack.objects[chosen[0]].box.center.z();
      double z1 = pack.objects[chosen[1]].box.center.z();
      int extreme_pos = (nearest == (z0 < z1)) ? 0 : 1;
      std::string ans = std::string("point-") + letter(extreme_pos);
      finish_qa(s, q, ans);
      gold["kind"] = "extreme";
      gold["direction"] = nearest ? "near_to_far" : "far_to_near";
      gold["choice"] = chosen[extreme_pos];
      json pix = json::object();
      for (size_t i = 0; i < chosen.size(); ++i) {
        const Vec2& p = pack.objects[chosen[i]].refs.point2d.at(0);
        pix[std::string(1, letter(static_cast<int>(i)))] = {p.x(), p.y()};
      }
      s.meta["points"] = pix;
      s.meta["template_id"] = t;
      s.meta["format"] = "point";
      break;
    }
    case RefFormat::Box2d: {
      static const std::vector<std::pair<const char*, OrderDirection>> kPool = {
          {"You are given several 2D bounding boxes in the image:\n{boxes}\n"
           "Arrange the object represented by these boxes from the farthest "
           "to the nearest based on their depth relationship and give their "
           "names. Output the sorted bboxes and labels using JSON format.",
           OrderDirection::FarToNear},
          {"You are given several 2D bounding boxes in the image:\n{boxes}\n"
           "Arrange the object represented by these boxes from the nearest "
           "to the farthest based on their depth relationship and give their "
           "names. Output the sorted bboxes and labels using JSON format.",
           OrderDirection::NearToFar},
          {"Several 2D boxes are listed below:\n{boxes}\nSort the "
           "corresponding objects by their distance to the camera, farthest "
           "first, and output the sorted bboxes and labels using JSON format.",
           OrderDirection::FarToNear},
      };
      int t = pick_template(rng, static_cast<int>(kPool.size()), template_id);
      OrderDirection dir = kPool[t].second;
      std::vector<int> order = sorted_by_depth(pack, chosen, dir);
      std::vector<std::string> lines;
      for (int idx : chosen) {
        const Box2& b = pack.objects[idx].refs.box2d.at(0);
        lines.push_back("[" + std::to_string(std::llround(b.x1)) + ", " +
                        std::to_string(std::llround(b.y1)) + ", " +
                        std::to_string(std::llround(b.x2)) + ", " +
                        std::to_string(std::llround(b.y2)) + "]");
      }
      std::string q = sub(kPool[t].first, "boxes", join(lines, "\n"));
      finish_qa(s, q, box2d_answer_json(pack, order, 0));
      gold["kind"] = "order";
      gold["direction"] = dir == OrderDirection::NearToFar ? "near_to_far" : "far_to_near";
      gold["sorted"] = order;
      s.meta["template_id"] = t;
      s.meta["format"] = "box2d";
      break;
    }
    case RefFormat::VisualPrompt: {
      static const std::vector<std::pair<const char*, OrderDirection>> kPool = {
          {"There are several boxes in the image: {markers}. Each box "
           "represents an object. Present the object represented by these "
           "boxes in an order that goes from close to far and give their "
           "names.", OrderDirection::NearToFar},
          {"There are several boxes in the image: {markers}. Each box "
           "represents an object. Present the object represented by these "
           "boxes in an order that goes from far to close and give their "
           "names.", OrderDirection::FarToNear},
          {"The image is annotated with marked boxes: {markers}. Sort them by "
           "distance from the camera, nearest first, and name each object.",
           OrderDirection::NearToFar},
      };
      int t = pick_template(rng, static_cast<int>(kPool.size()), template_id);
      OrderDirection dir = kPool[t].second;
      std::vector<int> order = sorted_by_depth(pack, chosen, dir);
      auto marker_name = [&](int idx) {
        int id = *pack.objects[idx].refs.marker_id;
        return "box-" + (id < 26 ? std::string(1, letter(id)) : std::to_string(id + 1));
      };
      std::vector<std::string> markers, parts;
      for (int idx : chosen) markers.push_back(marker_name(idx));
      for (int idx : order)
        parts.push_back(marker_name(idx) + " (" + pack.objects[idx].label + ")");
      std::string q = sub(kPool[t].first, "markers", join(markers, ", "));
      finish_qa(s, q, join(parts, ", "));
      gold["kind"] = "order";
      gold["direction"] = dir == OrderDirection::NearToFar ? "near_to_far" : "far_to_near";
      gold["sorted"] = order;
      s.meta["template_id"] = t;
      s.meta["format"] = "visual_prompt";
      break;
    }
  }
  s.meta["gold"] = std::move(gold);
  return s;
}

// ---------------------------------------------------------------------------
// Distance comparison

InstructionSample gen_distance_compare(const ScenePack& pack, int anchor_index,
                                       const std::vector<int>& candidates,
                                       uint64_t seed, const GenConfig& cfg,
                                       int template_id) {
  if (candidates.size() < 2)
    throw ValidationError("gen_distance_compare: need at least two candidates");
  Rng rng(seed);

  static const std::vector<std::pair<const char*, bool>> kPool = {
      // true = closest
      {"Estimate the real distances and identify which object—{cands}—is "
       "closest to the {anchor}.", true},
      {"Considering the positions, which object—{cands}—do you think is "
       "farthest from the {anchor}?", false},
      {"Which of {cands} is nearest to the {anchor} in real space?", true},
  };
  int t = pick_template(rng, static_cast<int>(kPool.size()), template_id);
  bool closest = kPool[t].second;

  const Vec3& a = pack.objects[anchor_index].box.center;
  std::vector<double> dist;
  for (int idx : candidates)
    dist.push_back((pack.objects[idx].box.center - a).norm());

  int best = 0;
  for (size_t i = 1; i < dist.size(); ++i)
    if (closest ? dist[i] < dist[best] : dist[i] > dist[best])
      best = static_cast<int>(i);
  for (size_t i = 0; i < dist.size(); ++i) {
    if (static_cast<int>(i) == best) continue;
    if (std::abs(dist[i] - dist[best]) < cfg.distance_tie_tol)
      throw DistanceTie("candidate distances within the tie tolerance");
  }

  std::vector<std::string> cand_names;
  for (int idx : candidates)
    cand_names.push_back("the " + display_name_with_ref(pack, idx, 0));
  std::string cands =
      candidates.size() == 2
          ? cand_names[0] + " or " + cand_names[1]
          : join(cand_names, ", ");

  std::string q = sub(kPool[t].first, "cands", cands);
  q = sub(q, "anchor", display_name_with_ref(pack, anchor_index, 0));

  std::string choice_name = display_name(pack, candidates[best]);
  std::string ans;
  if (t == 0) {
    std::vector<std::string> lines;
    for (size_t i = 0; i < candidates.size(); ++i)
      lines.push_back("Distance[" + display_name(pack, anchor_index) + ", " +
                      display_name(pack, candidates[i]) + "]=" + format2(dist[i]) +
                      "m");
    ans = "The distance relationships are: \n" + join(lines, "\n") +
          "\nSo, the answer is " + choice_name + ".";
  } else {
    ans = choice_name;
  }

  InstructionSample s = start_sample(pack, Task::DistanceCompare, seed, 1);
  finish_qa(s, q, ans);
  s.meta["template_id"] = t;
  s.meta["gold"] = {{"kind", "distance"},
                    {"anchor", anchor_index},
                    {"candidates", candidates},
                    {"mode", closest ? "closest" : "farthest"},
                    {"choice", candidates[best]}};
  return s;
}

// ---------------------------------------------------------------------------
// 3D detection and grounding

InstructionSample gen_3ddet_sample(const ScenePack& pack,
                                   const std::vector<std::string>& labels,
                                   TurnMode mode, uint64_t seed, int template_id) {
  if (labels.empty()) throw ValidationError("gen_3ddet_sample: no labels");
  Rng rng(seed);
  static const std::vector<const char*> kQueries = {
      "Detect the 3D bounding boxes of {label}.",
      "Find every {label} and report each as a 3D bounding box.",
      "Locate all instances of {label} and output their 3D bounding boxes.",
  };
  int t = pick_template(rng, static_cast<int>(kQueries.size()), template_id);

  auto boxes_for = [&](const std::string& label) {
    std::vector<Box3D> out;
    for (const auto& obj : pack.objects)
      if (obj.label == label) out.push_back(obj.box);
    return out;
  };
  for (const auto& label : labels)
    if (boxes_for(label).empty())
      throw NoMatchingObjects("no objects labeled '" + label + "'");

  if (pack.multi_frame()) require_frame1_coords(pack);
  bool multi_view = pack.multi_frame();
  InstructionSample s = start_sample(
      pack, multi_view ? Task::Det3dMulti : Task::Det3dSingle, seed,
      multi_view ? -1 : 1);

  std::string preamble = camera_preamble(pack);
  json gold_labels = json::array();
  if (mode == TurnMode::Single) {
    // one query covering every requested label in one turn
    std::string label_list = join(labels, ", ");
    std::string q = preamble + "\n\n" + sub(kQueries[t], "label", label_list);
    std::vector<Box3D> boxes;
    for (const auto& label : labels)
      for (const auto& b : boxes_for(label)) boxes.push_back(b);
    finish_qa(s, q, boxes_to_answer_json(boxes));
    gold_labels = labels;
  } else {
    for (size_t i = 0; i < labels.size(); ++i) {
      std::string q = sub(kQueries[t], "label", labels[i]);
      if (i == 0) q = preamble + "\n\n" + q;
      std::string a = boxes_to_answer_json(boxes_for(labels[i]));
      s.turns.push_back({"user", q});
      s.turns.push_back({"assistant", a});
      s.answer = a;
    }
    gold_labels = labels;
  }
  s.meta["template_id"] = t;
  s.meta["turn_mode"] = mode == TurnMode::Single ? "single" : "multi";
  s.meta["gold"] = {{"labels", gold_labels}};
  return s;
}

InstructionSample gen_grounding(const ScenePack& pack, const Box3D& box,
                                uint64_t seed, int template_id) {
  Rng rng(seed);
  static const std::vector<const char*> kPool = {
      "What object is represented by the 3D bounding box {box}?",
      "Here is a 3D bounding box in the camera coordinate system: {box}. "
      "Which object does it enclose?",
      "Identify the object located at the 3D bounding box {box}.",
  };
  int t = pick_template(rng, static_cast<int>(kPool.size()), template_id);

  int best = -1;
  double best_iou = 0.0;
  for (size_t i = 0; i < pack.objects.size(); ++i) {
    double v = iou3d(box, pack.objects[i].box);
    if (v > best_iou) {
      best_iou = v;
      best = static_cast<int>(i);
    }
  }
  if (best < 0) throw NoMatchingObjects("queried box overlaps no object");

  std::string q = camera_preamble(pack) + "\n\n" +
                  sub(kPool[t], "box", serialize_box_inline(box));
  InstructionSample s = start_sample(pack, Task::Grounding3d, seed,
                                     pack.multi_frame() ? -1 : 1);
  finish_qa(s, q, pack.objects[best].label);
  s.meta["template_id"] = t;
  s.meta["gold"] = {{"target", best}, {"iou", best_iou}};
  return s;
}

// ---------------------------------------------------------------------------
// Measurement

namespace {

std::string measurement_value(const ScenePack& pack, const MeasureQuery& q) {
  const Box3D& b = pack.objects[q.object_index].box;
  double meters = q.kind == MeasureKind::Height
                      ? b.size.y()
                      : std::max({b.size.x(), b.size.y(), b.size.z()});
  if (q.unit == LengthUnit::Centimeters)
    return std::to_string(std::llround(meters * 100.0)) + " cm";
  return format2(meters) + " m";
}

std::string measurement_question(const ScenePack& pack, const MeasureQuery& mq,
                                 int t) {
  std::string name = display_name(pack, mq.object_index);
  const ObjectRefs& refs = pack.objects[mq.object_index].refs;
  if (refs.point2d.count(0))
    name += std::string(" (marked by the ") + ref_color(mq.object_index) + " point)";
  const char* unit_word =
      mq.unit == LengthUnit::Centimeters ? "centimeters" : "meters";
  std::string q;
  if (mq.kind == MeasureKind::Height) {
    static const std::vector<const char*> kPool = {
        "Could you provide the height of the {name}? Specify the measurement "
        "in {unit}.\nAnswer the question using a single word or phrase.",
        "What is the height of the {name} in {unit}?\nAnswer the question "
        "using a single word or phrase.",
        "Measure the vertical extent of the {name} and report it in {unit}.",
    };
    q = kPool[t % kPool.size()];
  } else {
    static const std::vector<const char*> kPool = {
        "What is the length of the dimension with the maximum value (length, "
        "width, or height) of the {name} in {unit}?\nPlease try to answer the "
        "question with short words or phrases if possible.",
        "What is the length of the largest dimension (length, width, or "
        "height) of the {name} in {unit}?",
        "Among length, width and height of the {name}, report the largest "
        "one in {unit}.",
    };
    q = kPool[t % kPool.size()];
  }
  q = sub(q, "name", name);
  return sub(q, "unit", unit_word);
}

}  // namespace

InstructionSample gen_measurement(const ScenePack& pack, int object_index,
                                  MeasureKind kind, LengthUnit unit, uint64_t seed,
                                  int template_id) {
  return gen_measurement_multi(pack, {{object_index, kind, unit}}, seed,
                               template_id);
}

InstructionSample gen_measurement_multi(const ScenePack& pack,
                                        const std::vector<MeasureQuery>& queries,
                                        uint64_t seed, int template_id) {
  if (queries.empty()) throw ValidationError("gen_measurement: no queries");
  Rng rng(seed);
  int t = pick_template(rng, 3, template_id);

  InstructionSample s = start_sample(
      pack,
      queries[0].kind == MeasureKind::Height ? Task::MeasurementHeight
                                             : Task::MeasurementDim,
      seed, 1);
  json gold = json::array();
  for (const auto& mq : queries) {
    std::string q = measurement_question(pack, mq, t);
    std::string a = measurement_value(pack, mq);
    s.turns.push_back({"user", q});
    s.turns.push_back({"assistant", a});
    s.answer = a;
    gold.push_back({{"object", mq.object_index},
                    {"kind", mq.kind == MeasureKind::Height ? "height" : "max_dim"},
                    {"unit", mq.unit == LengthUnit::Centimeters ? "cm" : "m"},
                    {"value", a}});
  }
  s.meta["template_id"] = t;
  s.meta["gold"] = std::move(gold);
  return s;
}

// ---------------------------------------------------------------------------
// Object-object relations over an image pair

namespace {

struct AnchorSets {
  std::vector<int> shared, only_first, only_second;
};

AnchorSets split_by_presence(const ScenePack& pack) {
  AnchorSets sets;
  for (size_t i = 0; i < pack.objects.size(); ++i) {
    const auto& f = pack.objects[i].in_frames;
    if (f.size() < 2) continue;
    if (f[0] && f[1]) sets.shared.push_back(static_cast<int>(i));
    else if (f[0]) sets.only_first.push_back(static_cast<int>(i));
    else if (f[1]) sets.only_second.push_back(static_cast<int>(i));
  }
  return sets;
}

}  // namespace

InstructionSample gen_objobj_relation(const ScenePack& pack, RelationKind kind,
                                      uint64_t seed, const GenConfig& cfg,
                                      int template_id) {
  if (pack.frames.size() < 2)
    throw NoValidAnchors("object-object relations need two frames");
  require_frame1_coords(pack);
  AnchorSets sets = split_by_presence(pack);
  if (sets.shared.empty())
    throw NoValidAnchors("no object-level correspondence between the frames");

  Rng rng(seed);
  // anchor pair: one object exclusive to each image, center heights within 1 m
  std::vector<std::pair<int, int>> anchor_pairs;
  for (int x : sets.only_first)
    for (int z : sets.only_second)
      if (std::abs(pack.objects[x].box.center.y() - pack.objects[z].box.center.y()) <
          1.0)
        anchor_pairs.emplace_back(x, z);
  if (anchor_pairs.empty())
    throw NoValidAnchors("no exclusive object pair within the height limit");
  auto [x_idx, z_idx] = anchor_pairs[rng.below(anchor_pairs.size())];

  InstructionSample s = start_sample(
      pack, kind == RelationKind::Direction ? Task::ObjObjDirection : Task::ObjObjDistance,
      seed, 2);

  std::string x_name = display_name(pack, x_idx);
  std::string z_name = display_name(pack, z_idx);

  if (kind == RelationKind::Direction) {
    static const std::vector<std::pair<const char*, bool>> kPool = {
        // bool: reference is a shared object (else the first camera)
        {"If the {x} in the first image is north of the {y}, what direction "
         "is the {z} in the second image from the {y}? Options: {opts}", true},
        {"If, from the camera position of the first image, the direction "
         "toward the {x} (visible in the first image) is north, then in "
         "which direction does the {z} (visible in the second image) lie "
         "relative to the first image's camera? Options: {opts}", false},
        {"Suppose the {x} in the first image sits due north of the {y}. "
         "From the {y}, which compass direction points at the {z} from the "
         "second image? Options: {opts}", true},
    };
    int t = pick_template(rng, static_cast<int>(kPool.size()), template_id);
    bool object_ref = kPool[t].second;
    int y_idx = object_ref ? sets.shared[rng.below(sets.shared.size())] : -1;
    Vec3 ref = object_ref ? pack.objects[y_idx].box.center : Vec3::Zero();

    double bearing = compass_bearing_deg(ref, pack.objects[x_idx].box.center,
                                         pack.objects[z_idx].box.center);
    if (near_sector_boundary(bearing, cfg.compass_boundary_margin_deg))
      throw InsufficientSeparation("bearing too close to a sector boundary");
    Compass dir = compass_from_bearing(bearing);

    Mcq mcq = build_mcq(compass_name(dir), compass_names(), 4, rng);
    std::string q = kPool[t].first;
    q = sub(q, "x", x_name);
    q = sub(q, "z", z_name);
    if (object_ref) q = sub(q, "y", display_name(pack, y_idx));
    q = sub(q, "opts", mcq_inline(mcq));
    finish_qa(s, q, mcq_answer(mcq));
    s.meta["template_id"] = t;
    s.meta["gold"] = {{"kind", "compass"},
                      {"ref", object_ref ? json(y_idx) : json("camera")},
                      {"north", x_idx},
                      {"query", z_idx},
                      {"bearing_deg", bearing},
                      {"direction", compass_name(dir)},
                      {"letter", std::string(1, mcq.correct_letter())}};
  } else {
    static const std::vector<const char*> kPool = {
        "Both images show the same scene. Which is closer to the {y}: the "
        "{x} from the first image or the {z} from the second image?",
        "Taking both views together, decide whether the {x} (first image) or "
        "the {z} (second image) lies nearer to the {y}.",
        "Judging from the two frames, which object is closer to the {y}: the "
        "{x} seen only in the first image, or the {z} seen only in the "
        "second?",
    };
    int t = pick_template(rng, static_cast<int>(kPool.size()), template_id);
    int y_idx = sets.shared[rng.below(sets.shared.size())];
    double dx = (pack.objects[x_idx].box.center - pack.objects[y_idx].box.center).norm();
    double dz = (pack.objects[z_idx].box.center - pack.objects[y_idx].box.center).norm();
    if (std::abs(dx - dz) < cfg.distance_tie_tol)
      throw DistanceTie("anchor distances within the tie tolerance");
    int choice = dx < dz ? x_idx : z_idx;

    std::string q = kPool[t];
    q = sub(q, "x", x_name);
    q = sub(q, "z", z_name);
    q = sub(q, "y", display_name(pack, y_idx));
    finish_qa(s, q, display_name(pack, choice));
    s.meta["template_id"] = t;
    s.meta["gold"] = {{"kind", "anchor_distance"},
                      {"ref", y_idx},
                      {"first", x_idx},
                      {"second", z_idx},
                      {"choice", choice}};
  }
  return s;
}

// ---------------------------------------------------------------------------
// Camera-camera relations and camera motion

InstructionSample gen_camcam_relation(const ScenePack& pack, CamCamKind kind,
                                      uint64_t seed, const GenConfig& cfg,
                                      int template_id) {
  if (pack.frames.size() < 2)
    throw NoValidAnchors("camera relations need two frames");
  require_frame1_coords(pack);
  Rng rng(seed);

  InstructionSample s = start_sample(
      pack, kind == CamCamKind::Position ? Task::CamCamPosition : Task::CamCamFacing,
      seed, 2);

  static const std::vector<const char*> kLeadIns = {
      "Images are shot one after another from a first-person perspective.",
      "The frames are acquired in a continuous sequence from a first-person "
      "perspective.",
      "The two photos were taken back to back from a first-person "
      "perspective.",
  };

  if (kind == CamCamKind::Position) {
    static const std::vector<const char*> kPool = {
        "{lead} When positioned at the second photo spot, how is the first "
        "camera placed relative to me? Options: {opts}",
        "{lead} Standing where the second image was taken, in which "
        "direction is the first camera from me? Options: {opts}",
        "{lead} Relative to the second viewpoint, where is the first "
        "camera located? Options: {opts}",
    };
    int t = pick_template(rng, static_cast<int>(kPool.size()), template_id);
    // first camera's position expressed in the second camera's coordinates
    Vec3 p = pack.frames[1].world_from_cam.inverse().apply(
        pack.frames[0].world_from_cam.translation);
    double bearing = position_bearing_deg(p.x(), p.z());
    bool zero_offset = std::hypot(p.x(), p.z()) < 1e-9;
    if (!zero_offset && near_sector_boundary(bearing, cfg.compass_boundary_margin_deg))
      throw InsufficientSeparation("camera offset too close to a sector boundary");
    EgoSector sector = position_sector(p.x(), p.z());

    Mcq mcq = build_mcq(ego_sector_name(sector, false), sector_names(false), 4, rng);
    std::string q = sub(kPool[t], "lead", kLeadIns[t % kLeadIns.size()]);
    q = sub(q, "opts", mcq_inline(mcq));
    finish_qa(s, q, mcq_answer(mcq));
    s.meta["template_id"] = t;
    s.meta["gold"] = {{"kind", "camcam_position"},
                      {"offset", {p.x(), p.y(), p.z()}},
                      {"sector", ego_sector_name(sector, false)},
                      {"letter", std::string(1, mcq.correct_letter())}};
  } else {
    static const std::vector<const char*> kPool = {
        "{lead} If the first picture was taken with the camera facing "
        "{given}, what is the direction for the second picture? Options: "
        "{opts}",
        "{lead} Suppose the first frame looks {given}. Which way does the "
        "camera face in the second frame? Options: {opts}",
        "{lead} Assuming the first shot faces {given}, what compass "
        "direction is the second shot facing? Options: {opts}",
    };
    int t = pick_template(rng, static_cast<int>(kPool.size()), template_id);
    Mat3 r_rel = pack.frames[0].world_from_cam.rotation.transpose() *
                 pack.frames[1].world_from_cam.rotation;
    double yaw_deg = matrix_to_euler(r_rel).angles.yaw_deg();
    Compass given = static_cast<Compass>(rng.below(8));
    double result_bearing = static_cast<int>(given) * 45.0 + yaw_deg;
    if (near_sector_boundary(result_bearing, cfg.compass_boundary_margin_deg))
      throw InsufficientSeparation("facing too close to a sector boundary");
    Compass result = compass_from_bearing(result_bearing);

    Mcq mcq = build_mcq(compass_name(result), compass_names(), 4, rng);
    std::string q = sub(kPool[t], "lead", kLeadIns[t % kLeadIns.size()]);
    q = sub(q, "given", compass_name(given));
    q = sub(q, "opts", mcq_inline(mcq));
    finish_qa(s, q, mcq_answer(mcq));
    s.meta["template_id"] = t;
    s.meta["gold"] = {{"kind", "camcam_facing"},
                      {"given", compass_name(given)},
                      {"yaw_deg", yaw_deg},
                      {"facing", compass_name(result)},
                      {"letter", std::string(1, mcq.correct_letter())}};
  }
  return s;
}

InstructionSample gen_camera_motion(const ScenePack& pack, MotionKind kind,
                                    uint64_t seed, const GenConfig& cfg,
                                    int template_id) {
  if (pack.frames.size() < 2)
    throw NoSignificantMotion("camera motion needs two frames");
  require_frame1_coords(pack);
  Rng rng(seed);
  CameraMotion motion = classify_camera_motion(pack.frames[0].world_from_cam,
                                               pack.frames[1].world_from_cam, cfg);

  static const std::vector<const char*> kLeadIns = {
      "The frames are captured in a continuous manner from a first-person "
      "perspective.",
      "The visual narrative unfolds through a series of images, all from a "
      "first-person angle.",
      "Two consecutive photos show a scene from a first-person view.",
  };

  InstructionSample s = start_sample(
      pack,
      kind == MotionKind::Rotation ? Task::CameraMotionRotation
                                   : Task::CameraMotionTranslation,
      seed, 2);

  if (kind == MotionKind::Rotation) {
    if (motion.rotation_labels.empty())
      throw NoSignificantMotion("no rotation above the floor");
    // the dominant rotation axis decides the question flavor
    double yaw = std::abs(motion.relative_rotation.yaw_deg());
    double pitch = std::abs(motion.relative_rotation.pitch_deg());
    double roll = std::abs(motion.relative_rotation.roll_deg());
    int axis = yaw >= pitch && yaw >= roll ? 0 : (pitch >= roll ? 1 : 2);

    static const char* kAxisQuestion[3] = {
        "If we're only considering horizontal rotation, does the camera pan "
        "left or right from image one to image two? Options: A. panning to "
        "the left, B. panning to the right",
        "Considering only vertical rotation, does the camera tilt upward or "
        "downward from image one to image two? Options: A. tilting upward, "
        "B. tilting downward",
        "Considering only rotation about the viewing direction, does the "
        "camera roll clockwise or counterclockwise from image one to image "
        "two? Options: A. rolling clockwise, B. rolling counterclockwise",
    };
    static const char* kAxisOptions[3][2] = {
        {"panning to the left", "panning to the right"},
        {"tilting upward", "tilting downward"},
        {"rolling clockwise", "rolling counterclockwise"},
    };
    int t = pick_template(rng, static_cast<int>(kLeadIns.size()), template_id);
    double value = axis == 0 ? motion.relative_rotation.yaw_deg()
                             : (axis == 1 ? motion.relative_rotation.pitch_deg()
                                          : motion.relative_rotation.roll_deg());
    const char* label;
    if (axis == 0) label = value > 0 ? "panning to the right" : "panning to the left";
    else if (axis == 1) label = value > 0 ? "tilting upward" : "tilting downward";
    else label = value > 0 ? "rolling clockwise" : "rolling counterclockwise";

    int correct = label == std::string(kAxisOptions[axis][0]) ? 0 : 1;
    std::string q = std::string(kLeadIns[t]) + " " + kAxisQuestion[axis];
    std::string ans = std::string(1, letter(correct)) + ". " + label;
    finish_qa(s, q, ans);
    s.meta["template_id"] = t;
    s.meta["gold"] = {{"kind", "rotation"},
                      {"axis", axis == 0 ? "pan" : (axis == 1 ? "tilt" : "roll")},
                      {"labels", motion.rotation_labels},
                      {"answer_label", label}};
  } else {
    if (motion.translation_labels.empty())
      throw NoSignificantMotion("no translation above the floor");
    std::string correct = "moving " + join_natural(motion.translation_labels);

    // distractor compounds
    std::vector<std::string> pool = {
        "moving forward",      "moving backward",     "moving leftward",
        "moving rightward",    "moving upward",       "moving downward",
        "moving rightward and forward", "moving leftward and forward",
        "moving rightward and backward", "moving leftward and backward",
        "moving backward and upward",   "moving forward and downward",
        "moving leftward, backward and upward",
    };
    Mcq mcq = build_mcq(correct, pool, 4, rng);
    int t = pick_template(rng, static_cast<int>(kLeadIns.size()), template_id);
    std::string q =
        std::string(kLeadIns[t]) +
        " You are to determine the main direction in which the camera is "
        "translated, disregarding small shakes or jitters and concentrating "
        "on the overall intentional movement. Which way is the camera's "
        "perspective moving? Options: " +
        mcq_inline(mcq);
    finish_qa(s, q, mcq_answer(mcq));
    s.meta["template_id"] = t;
    s.meta["gold"] = {{"kind", "translation"},
                      {"labels", motion.translation_labels},
                      {"answer", correct},
                      {"letter", std::string(1, mcq.correct_letter())}};
  }
  return s;
}

// ---------------------------------------------------------------------------
// Video tasks

InstructionSample gen_video_order(const ScenePack& pack, int k, uint64_t seed,
                                  const GenConfig& cfg, int template_id) {
  (void)cfg;
  if (k < 2) throw ValidationError("gen_video_order: k must be >= 2");
  Rng rng(seed);

  std::vector<int> candidates;
  for (size_t i = 0; i < pack.objects.size(); ++i)
    if (pack.objects[i].first_appearance() >= 0)
      candidates.push_back(static_cast<int>(i));
  rng.shuffle(candidates);

  std::vector<int> chosen;
  std::set<int> used_frames;
  for (int idx : candidates) {
    int fa = pack.objects[idx].first_appearance();
    if (used_frames.count(fa)) continue;  // ties excluded from generation
    used_frames.insert(fa);
    chosen.push_back(idx);
    if (static_cast<int>(chosen.size()) == k) break;
  }
  if (static_cast<int>(chosen.size()) < k)
    throw InsufficientSeparation("not enough objects with distinct first appearances");

  std::vector<int> order = chosen;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return pack.objects[a].first_appearance() < pack.objects[b].first_appearance();
  });

  auto names_of = [&](const std::vector<int>& idx) {
    std::vector<std::string> v;
    for (int i : idx) v.push_back(display_name(pack, i));
    return v;
  };
  std::string correct = join(names_of(order), ", ");

  // two distractor permutations, distinct from the answer and each other
  std::vector<std::string> distractors;
  std::vector<int> perm = order;
  for (int guard = 0; guard < 200 && distractors.size() < 2; ++guard) {
    rng.shuffle(perm);
    std::string cand = join(names_of(perm), ", ");
    if (cand != correct &&
        std::find(distractors.begin(), distractors.end(), cand) == distractors.end())
      distractors.push_back(cand);
  }
  if (distractors.size() < 2)
    throw InsufficientSeparation("could not build distinct order options");

  Mcq mcq;
  mcq.options = distractors;
  mcq.correct = static_cast<int>(rng.below(mcq.options.size() + 1));
  mcq.options.insert(mcq.options.begin() + mcq.correct, correct);

  static const std::vector<const char*> kPool = {
      "Provide the appearance order for the initial sighting of these objects "
      "within the video: {names}.\nOptions:\n{opts}",
      "Arrange the given objects based on the timestamp of their first "
      "appearance in the video: {names}.\nOptions:\n{opts}",
      "In what order do these objects first show up in the video: {names}?\n"
      "Options:\n{opts}",
  };
  int t = pick_template(rng, static_cast<int>(kPool.size()), template_id);
  std::string q = sub(kPool[t], "names", join(names_of(chosen), ", "));
  q = sub(q, "opts", mcq_lines(mcq));

  InstructionSample s = start_sample(pack, Task::VideoAppearanceOrder, seed, -1);
  finish_qa(s, q, mcq_answer(mcq));
  s.meta["template_id"] = t;
  s.meta["gold"] = {{"kind", "appearance_order"},
                    {"objects", chosen},
                    {"order", order},
                    {"letter", std::string(1, mcq.correct_letter())}};
  return s;
}

InstructionSample gen_video_count(const ScenePack& pack, const std::string& label,
                                  uint64_t seed, const GenConfig& cfg,
                                  int template_id) {
  Rng rng(seed);
  int count = 0;
  for (const auto& obj : pack.objects) {
    if (obj.label != label) continue;
    for (bool b : obj.in_frames)
      if (b) {
        ++count;
        break;
      }
  }
  if (count == 0 && !cfg.count_allow_zero)
    throw NoMatchingObjects("no '" + label + "' appears in the video");

  static const std::vector<const char*> kPool = {
      "How many {plural} can you spot in this part of the video?\nAnswer the "
      "question using a single word or phrase.",
      "How many {plural} show up in the video?",
      "Count the number of distinct {plural} that appear over the course of "
      "the video.",
  };
  int t = pick_template(rng, static_cast<int>(kPool.size()), template_id);
  std::string q = sub(kPool[t], "plural", plural(label));

  InstructionSample s = start_sample(pack, Task::VideoCount, seed, -1);
  finish_qa(s, q, std::to_string(count));
  s.meta["template_id"] = t;
  s.meta["gold"] = {{"kind", "count"}, {"label", label}, {"count", count}};
  return s;
}

InstructionSample gen_video_objobj(const ScenePack& pack, RelationKind kind,
                                   uint64_t seed, const GenConfig& cfg,
                                   int template_id) {
  Rng rng(seed);
  std::vector<int> candidates;
  for (size_t i = 0; i < pack.objects.size(); ++i)
    if (pack.objects[i].first_appearance() >= 0)
      candidates.push_back(static_cast<int>(i));

  InstructionSample s = start_sample(pack, Task::VideoObjObj, seed, -1);

  if (kind == RelationKind::Direction) {
    if (candidates.size() < 3)
      throw NoValidAnchors("need three objects for a direction question");
    static const std::vector<const char*> kPool = {
        "Consider the scene in the video. You are positioned at {a}, with "
        "your gaze fixed on {b}. In which direction is {c}? Options: {opts}",
        "Assuming you are at {a} and looking at {b}, determine the location "
        "of {c} relative to you. Options: {opts}",
        "Imagine standing at {a} in the scene and facing {b}. Where is {c} "
        "from your viewpoint? Options: {opts}",
    };
    int t = pick_template(rng, static_cast<int>(kPool.size()), template_id);
    std::vector<int> pool = candidates;
    rng.shuffle(pool);
    int a = pool[0], b = pool[1], c = pool[2];
    double bearing = compass_bearing_deg(pack.objects[a].box.center,
                                         pack.objects[b].box.center,
                                         pack.objects[c].box.center);
    if (near_sector_boundary(bearing, cfg.compass_boundary_margin_deg))
      throw InsufficientSeparation("bearing too close to a sector boundary");
    // forward = gaze direction; sector ordinals share the compass binning
    EgoSector sector =
        static_cast<EgoSector>(static_cast<int>(compass_from_bearing(bearing)));

    Mcq mcq = build_mcq(ego_sector_name(sector, true), sector_names(true), 4, rng);
    std::string q = kPool[t];
    q = sub(q, "a", display_name(pack, a));
    q = sub(q, "b", display_name(pack, b));
    q = sub(q, "c", display_name(pack, c));
    q = sub(q, "opts", mcq_inline(mcq));
    finish_qa(s, q, mcq_answer(mcq));
    s.meta["template_id"] = t;
    s.meta["gold"] = {{"kind", "ego_direction"},
                      {"at", a},
                      {"gaze", b},
                      {"query", c},
                      {"bearing_deg", bearing},
                      {"sector", ego_sector_name(sector, true)},
                      {"letter", std::string(1, mcq.correct_letter())}};
  } else {
    if (candidates.size() < 3)
      throw NoValidAnchors("need an anchor and two candidates");
    static const std::vector<const char*> kPool = {
        "During the course of this video, which of the objects {list} is "
        "closest to the {anchor}? Options: {opts}",
        "Across the video, determine which of {list} lies nearest to the "
        "{anchor}. Options: {opts}",
        "Out of {list}, which one ends up closest to the {anchor} in the "
        "scene shown by the video? Options: {opts}",
    };
    int t = pick_template(rng, static_cast<int>(kPool.size()), template_id);
    std::vector<int> pool = candidates;
    rng.shuffle(pool);
    int anchor = pool[0];
    int n_cands = std::min<size_t>(4, pool.size() - 1);
    std::vector<int> cands(pool.begin() + 1, pool.begin() + 1 + n_cands);

    int best = 0;
    std::vector<double> dist;
    const Vec3& ap = pack.objects[anchor].box.center;
    for (int idx : cands) dist.push_back((pack.objects[idx].box.center - ap).norm());
    for (size_t i = 1; i < dist.size(); ++i)
      if (dist[i] < dist[best]) best = static_cast<int>(i);
    for (size_t i = 0; i < dist.size(); ++i)
      if (static_cast<int>(i) != best &&
          std::abs(dist[i] - dist[best]) < cfg.distance_tie_tol)
        throw DistanceTie("candidate distances within the tie tolerance");

    Mcq mcq;
    for (int idx : cands) mcq.options.push_back(display_name(pack, idx));
    mcq.correct = best;
    std::vector<std::string> names = mcq.options;
    std::string q = kPool[t];
    q = sub(q, "list", join_natural(names));
    q = sub(q, "anchor", display_name(pack, anchor));
    q = sub(q, "opts", mcq_inline(mcq));
    finish_qa(s, q, mcq_answer(mcq));
    s.meta["template_id"] = t;
    s.meta["gold"] = {{"kind", "video_distance"},
                      {"anchor", anchor},
                      {"candidates", cands},
                      {"choice", cands[best]},
                      {"letter", std::string(1, mcq.correct_letter())}};
  }
  return s;
}

// ---------------------------------------------------------------------------
// Correspondence sample

InstructionSample gen_correspondence_sample(const ScenePack& pack, int object_index,
                                            uint64_t seed, const GenConfig& cfg,
                                            int template_id) {
  if (pack.frames.size() < 2)
    throw NoMatchingObjects("correspondence needs two frames");
  require_frame1_coords(pack);
  const SceneObject& obj = pack.objects[object_index];
  if (obj.points.empty()) throw EmptyInstance("object has no instance points");

  Rng rng(seed);
  FrameGeometry fa{pack.frames[0].world_from_cam, pack.frames[0].cam,
                   pack.frames[0].depth.empty() ? nullptr : &pack.frames[0].depth};
  FrameGeometry fb{pack.frames[1].world_from_cam, pack.frames[1].cam,
                   pack.frames[1].depth.empty() ? nullptr : &pack.frames[1].depth};
  auto pairs = gen_correspondence(fa, fb, obj.points, cfg.correspondence_points,
                                  rng.next_u64(), cfg.rel_tol);
  if (pairs.empty()) throw NoMatchingObjects("no point survives both visibility tests");
  const PixelPair& truth = pairs[rng.below(pairs.size())];

  // distractor pixels in frame 2: other objects' visible points, then jitter
  std::vector<Vec2> distractors;
  std::vector<int> others;
  for (size_t i = 0; i < pack.objects.size(); ++i)
    if (static_cast<int>(i) != object_index && !pack.objects[i].points.empty())
      others.push_back(static_cast<int>(i));
  rng.shuffle(others);
  for (int idx : others) {
    if (distractors.size() >= 3) break;
    auto cand = gen_correspondence(fa, fb, pack.objects[idx].points, 4,
                                   rng.next_u64(), cfg.rel_tol);
    for (const auto& c : cand)
      if (distractors.size() < 3 && (c.b - truth.b).norm() >= 20.0) {
        distractors.push_back(c.b);
        break;
      }
  }
  const CameraModel& cam_b = pack.frames[1].cam;
  int guard = 0;
  while (distractors.size() < 3 && guard++ < 200) {
    Vec2 jitter(truth.b.x() + rng.uniform(-140, 140),
                truth.b.y() + rng.uniform(-110, 110));
    jitter.x() = std::clamp(jitter.x(), 4.0, cam_b.width - 4.0);
    jitter.y() = std::clamp(jitter.y(), 4.0, cam_b.height - 4.0);
    bool ok = (jitter - truth.b).norm() >= 20.0;
    for (const auto& d : distractors) ok = ok && (jitter - d).norm() >= 12.0;
    if (ok) distractors.push_back(jitter);
  }
  if (distractors.size() < 3)
    throw NoMatchingObjects("could not place distinct distractor points");

  std::vector<Vec2> slots = distractors;
  int correct = static_cast<int>(rng.below(slots.size() + 1));
  slots.insert(slots.begin() + correct, truth.b);

  static const std::vector<const char*> kPool = {
      "The first image shows a point circled in gold. After adjusting the "
      "camera or lighting, the second image presents several gold-circled "
      "points labeled '{letters}'. Which matches the original? Options:\n{opts}",
      "A gold-circled point is marked in the first image. Among the candidate "
      "points {letters} circled in the second image, which one corresponds to "
      "it? Options:\n{opts}",
      "Match the gold-circled point from the first image to one of the "
      "labeled points {letters} in the second image. Options:\n{opts}",
  };
  int t = pick_template(rng, static_cast<int>(kPool.size()), template_id);

  std::vector<std::string> letters, opts;
  for (size_t i = 0; i < slots.size(); ++i) {
    letters.push_back(std::string(1, letter(static_cast<int>(i))));
    opts.push_back(letters.back() + ": point-" + letters.back());
  }
  std::string q = sub(kPool[t], "letters", join(letters, ", "));
  q = sub(q, "opts", join(opts, ",\n"));
  std::string ans = letters[correct] + ": point-" + letters[correct];

  InstructionSample s = start_sample(pack, Task::Correspondence, seed, 2);
  finish_qa(s, q, ans);
  s.meta["template_id"] = t;
  json marker_b = json::object();
  for (size_t i = 0; i < slots.size(); ++i)
    marker_b[letters[i]] = {slots[i].x(), slots[i].y()};
  s.meta["gold"] = {{"kind", "correspondence"},
                    {"object", object_index},
                    {"source", {truth.source.x(), truth.source.y(), truth.source.z()}},
                    {"pixel_a", {truth.a.x(), truth.a.y()}},
                    {"pixel_b", {truth.b.x(), truth.b.y()}},
                    {"letter", letters[correct]},
                    {"markers_b", marker_b}};
  return s;
}

}  // namespace spatialforge
