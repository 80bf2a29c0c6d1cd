#include "spatialforge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "spatialforge/errors.hpp"
#include "spatialforge/rng.hpp"

namespace spatialforge {

namespace fs = std::filesystem;
using nlohmann::json;

void GenStats::merge(const GenStats& other) {
  for (const auto& [k, v] : other.generated) generated[k] += v;
  for (const auto& [k, v] : other.skipped) skipped[k] += v;
}

json GenStats::to_json() const {
  int total = 0;
  for (const auto& [k, v] : generated) total += v;
  return json{{"tasks", generated}, {"skipped", skipped}, {"total", total}};
}

std::vector<Task> default_gen_tasks() {
  std::vector<Task> out;
  for (Task t : all_tasks())
    if (t != Task::SceneCaptionSingle && t != Task::SceneCaptionMulti)
      out.push_back(t);
  return out;
}

namespace {

std::vector<std::string> distinct_labels(const ScenePack& pack, Rng& rng,
                                         size_t max_labels) {
  std::set<std::string> set;
  for (const auto& o : pack.objects) set.insert(o.label);
  std::vector<std::string> labels(set.begin(), set.end());
  rng.shuffle(labels);
  if (labels.size() > max_labels) labels.resize(max_labels);
  return labels;
}

std::vector<int> frame0_visible(const ScenePack& pack) {
  std::vector<int> out;
  for (size_t i = 0; i < pack.objects.size(); ++i)
    if (!pack.objects[i].in_frames.empty() && pack.objects[i].in_frames[0])
      out.push_back(static_cast<int>(i));
  return out;
}

// One generation attempt for one task; returns nullopt when the pack shape
// does not support the task at all.
std::optional<InstructionSample> attempt(const ScenePack& pack, Task task,
                                         const RunConfig& cfg, uint64_t seed) {
  Rng rng(derive_seed(seed, "args"));
  const GenConfig& g = cfg.gen;
  bool multi = pack.frames.size() >= 2;
  bool video = pack.frames.size() >= 3;

  switch (task) {
    case Task::RelativeDepth: {
      std::vector<RefFormat> formats;
      for (RefFormat f : {RefFormat::Text, RefFormat::Point, RefFormat::Box2d,
                          RefFormat::VisualPrompt}) {
        int capable = 0;
        for (int idx : frame0_visible(pack)) {
          const ObjectRefs& r = pack.objects[idx].refs;
          if (f == RefFormat::Point && !r.point2d.count(0)) continue;
          if (f == RefFormat::Box2d && !r.box2d.count(0)) continue;
          if (f == RefFormat::VisualPrompt && !r.marker_id) continue;
          ++capable;
        }
        if (capable >= 2) formats.push_back(f);
      }
      if (formats.empty()) return std::nullopt;
      RefFormat format = formats[rng.below(formats.size())];
      int avail = static_cast<int>(frame0_visible(pack).size());
      int k = 2 + static_cast<int>(rng.below(
                      static_cast<uint64_t>(std::max(1, std::min(3, avail - 1)))));
      return gen_depth_order(pack, k, format, seed, g);
    }
    case Task::DistanceCompare: {
      std::vector<int> vis = frame0_visible(pack);
      if (vis.size() < 3) return std::nullopt;
      rng.shuffle(vis);
      int anchor = vis[0];
      size_t n_cand = 2 + rng.below(std::min<size_t>(vis.size() - 1, 3) - 1);
      std::vector<int> cands(vis.begin() + 1, vis.begin() + 1 + n_cand);
      return gen_distance_compare(pack, anchor, cands, seed, g);
    }
    case Task::Det3dSingle: {
      if (multi || pack.objects.empty()) return std::nullopt;
      auto labels = distinct_labels(pack, rng, 1);
      return gen_3ddet_sample(pack, labels, TurnMode::Single, seed);
    }
    case Task::Det3dMulti: {
      if (!multi || pack.objects.empty()) return std::nullopt;
      auto labels = distinct_labels(pack, rng, 3);
      return gen_3ddet_sample(pack, labels, TurnMode::Multi, seed);
    }
    case Task::Grounding3d: {
      if (pack.objects.empty()) return std::nullopt;
      int idx = static_cast<int>(rng.below(pack.objects.size()));
      return gen_grounding(pack, pack.objects[idx].box, seed);
    }
    case Task::MeasurementHeight:
    case Task::MeasurementDim: {
      std::vector<int> vis = frame0_visible(pack);
      if (vis.empty()) return std::nullopt;
      rng.shuffle(vis);
      MeasureKind kind = task == Task::MeasurementHeight ? MeasureKind::Height
                                                         : MeasureKind::MaxDim;
      std::vector<MeasureQuery> queries;
      size_t n = vis.size() >= 2 && rng.chance(0.5) ? 2 : 1;
      for (size_t i = 0; i < n; ++i)
        queries.push_back({vis[i], kind,
                           rng.chance(0.5) ? LengthUnit::Centimeters
                                           : LengthUnit::Meters});
      return gen_measurement_multi(pack, queries, seed);
    }
    case Task::SceneCaptionSingle:
    case Task::SceneCaptionMulti:
      return std::nullopt;  // prompts for the external teacher, not samples
    case Task::Correspondence: {
      if (!multi) return std::nullopt;
      std::vector<int> with_points;
      for (size_t i = 0; i < pack.objects.size(); ++i)
        if (!pack.objects[i].points.empty())
          with_points.push_back(static_cast<int>(i));
      if (with_points.empty()) return std::nullopt;
      int idx = with_points[rng.below(with_points.size())];
      return gen_correspondence_sample(pack, idx, seed, g);
    }
    case Task::ObjObjDirection:
      if (!multi) return std::nullopt;
      return gen_objobj_relation(pack, RelationKind::Direction, seed, g);
    case Task::ObjObjDistance:
      if (!multi) return std::nullopt;
      return gen_objobj_relation(pack, RelationKind::Distance, seed, g);
    case Task::CamCamPosition:
      if (!multi) return std::nullopt;
      return gen_camcam_relation(pack, CamCamKind::Position, seed, g);
    case Task::CamCamFacing:
      if (!multi) return std::nullopt;
      return gen_camcam_relation(pack, CamCamKind::Facing, seed, g);
    case Task::CameraMotionRotation:
      if (!multi) return std::nullopt;
      return gen_camera_motion(pack, MotionKind::Rotation, seed, g);
    case Task::CameraMotionTranslation:
      if (!multi) return std::nullopt;
      return gen_camera_motion(pack, MotionKind::Translation, seed, g);
    case Task::VideoAppearanceOrder:
      if (!video) return std::nullopt;
      return gen_video_order(pack, 3, seed, g);
    case Task::VideoCount: {
      if (!video) return std::nullopt;
      auto labels = distinct_labels(pack, rng, 1);
      if (labels.empty()) return std::nullopt;
      return gen_video_count(pack, labels[0], seed, g);
    }
    case Task::VideoObjObj:
      if (!video) return std::nullopt;
      return gen_video_objobj(pack,
                              rng.chance(0.5) ? RelationKind::Direction
                                              : RelationKind::Distance,
                              seed, g);
  }
  return std::nullopt;
}

}  // namespace

std::vector<InstructionSample> generate_for_scene(const ScenePack& pack,
                                                  const RunConfig& cfg,
                                                  const std::vector<Task>& tasks,
                                                  GenStats* stats) {
  std::vector<InstructionSample> out;
  std::string config_hash = cfg.hash();
  for (Task task : tasks) {
    const char* tag = task_tag(task);
    double weight = 1.0;
    if (auto it = cfg.task_weights.find(tag); it != cfg.task_weights.end())
      weight = it->second;
    int attempts = static_cast<int>(std::lround(cfg.samples_per_task * weight));
    for (int i = 0; i < attempts; ++i) {
      uint64_t seed = derive_seed(cfg.seed, pack.id + "|" + tag + "|" +
                                                std::to_string(i));
      try {
        auto s = attempt(pack, task, cfg, seed);
        if (!s) break;  // task not applicable to this pack shape
        s->meta["config_hash"] = config_hash;
        out.push_back(std::move(*s));
        if (stats) stats->generated[tag]++;
      } catch (const GenSkip&) {
        if (stats) stats->skipped[tag]++;
      }
    }
  }
  return out;
}

std::vector<std::string> list_store(const std::string& dir) {
  std::vector<std::string> out;
  if (!fs::is_directory(dir)) throw DataError("store is not a directory: " + dir);
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

void for_each_scene(const std::vector<std::string>& pack_paths, int jobs,
                    const std::function<void(size_t, const std::string&)>& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || pack_paths.size() <= 1) {
    for (size_t i = 0; i < pack_paths.size(); ++i) fn(i, pack_paths[i]);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= pack_paths.size()) return;
      try {
        fn(i, pack_paths[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min<int>(jobs, static_cast<int>(pack_paths.size())); ++t)
    pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

json eval_report_to_json(const EvalReport& rep, const RunConfig& cfg,
                         size_t n_scenes) {
  json j;
  j["AP"] = rep.ap;
  for (const auto& [tau, v] : rep.ap_by_tau) {
    char key[32];
    std::snprintf(key, sizeof(key), "AP@%d", static_cast<int>(std::lround(tau * 100)));
    j[key] = v;
  }
  {
    char key[32];
    std::snprintf(key, sizeof(key), "AR@%d", rep.ar_top_k);
    j[key] = rep.ar;
  }
  j["per_label"] = rep.per_label_ap;
  j["meta"] = {{"ranking", "generation_order"},
               {"config_hash", cfg.hash()},
               {"thresholds", rep.taus},
               {"scenes", n_scenes}};
  return j;
}

}  // namespace spatialforge
