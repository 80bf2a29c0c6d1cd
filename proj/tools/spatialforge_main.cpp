// spatial-forge: scene ingestion, FoV unification, instruction-sample
// generation, 3D detection evaluation and reward scoring.
//
// Exit codes: 0 success, 2 validation failure, 3 data error.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>

#include "spatialforge/bev.hpp"
#include "spatialforge/config.hpp"
#include "spatialforge/dataset_io.hpp"
#include "spatialforge/errors.hpp"
#include "spatialforge/image_io.hpp"
#include "spatialforge/pipeline.hpp"
#include "spatialforge/rewards.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spatialforge;

namespace {

struct GlobalFlags {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<int> jobs;
  std::optional<double> f_new, alpha, tau, rel_tol;
  std::string tasks_csv;
  std::string out_dir = "out";
};

RunConfig effective_config(const GlobalFlags& g) {
  RunConfig cfg = load_run_config(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  if (g.jobs) cfg.jobs = *g.jobs;
  if (g.f_new) cfg.f_new = *g.f_new;
  if (g.alpha) cfg.alpha = *g.alpha;
  if (g.tau) cfg.tau = *g.tau;
  if (g.rel_tol) cfg.rel_tol = *g.rel_tol;
  cfg.gen.rel_tol = cfg.rel_tol;
  cfg.validate();
  return cfg;
}

std::vector<Task> parse_tasks(const std::string& csv) {
  if (csv.empty() || csv == "all") return default_gen_tasks();
  std::vector<Task> out;
  std::string cur;
  std::stringstream ss(csv);
  while (std::getline(ss, cur, ',')) {
    if (cur.empty()) continue;
    auto t = task_from_tag(cur);
    if (!t) throw ValidationError("unknown task tag: " + cur);
    out.push_back(*t);
  }
  if (out.empty()) throw ValidationError("no tasks requested");
  return out;
}

int cmd_ingest(const GlobalFlags& g, const std::vector<std::string>& manifests) {
  RunConfig cfg = effective_config(g);
  if (manifests.empty()) throw ValidationError("ingest: no manifest paths given");
  fs::path store = fs::path(g.out_dir) / "store";
  fs::create_directories(store);
  NormalizeOptions opts{cfg.depth_divisor, true, cfg.rel_tol};
  for_each_scene(manifests, cfg.jobs, [&](size_t, const std::string& path) {
    SceneManifest m = load_manifest(path);
    ScenePack pack = normalize(m, opts);
    save_pack(pack, (store / (pack.id + ".json")).string());
  });
  std::cout << "ingested " << manifests.size() << " scene(s) into " << store.string()
            << "\n";
  return 0;
}

int cmd_unify_fov(const GlobalFlags& g, const std::string& store_dir) {
  RunConfig cfg = effective_config(g);
  fs::path out_store = fs::path(g.out_dir) / "store_unified";
  fs::create_directories(out_store);
  auto paths = list_store(store_dir);
  NormalizeOptions opts{cfg.depth_divisor, true};
  for_each_scene(paths, cfg.jobs, [&](size_t, const std::string& path) {
    ScenePack pack = load_pack(path, opts);
    ScenePack unified = unify_pack(pack, cfg.f_new);
    save_pack(unified, (out_store / (unified.id + ".json")).string());
  });
  std::cout << "unified " << paths.size() << " scene(s) at f_new=" << cfg.f_new
            << " into " << out_store.string() << "\n";
  return 0;
}

int cmd_gen(const GlobalFlags& g, const std::string& store_dir) {
  RunConfig cfg = effective_config(g);
  std::vector<Task> tasks = parse_tasks(g.tasks_csv);
  fs::create_directories(g.out_dir);
  auto paths = list_store(store_dir);
  NormalizeOptions opts{cfg.depth_divisor, true};

  std::vector<std::vector<InstructionSample>> per_scene(paths.size());
  std::vector<GenStats> per_stats(paths.size());
  for_each_scene(paths, cfg.jobs, [&](size_t i, const std::string& path) {
    ScenePack pack = load_pack(path, opts);
    per_scene[i] = generate_for_scene(pack, cfg, tasks, &per_stats[i]);
  });

  GenStats stats;
  std::vector<json> records;
  for (size_t i = 0; i < per_scene.size(); ++i) {
    stats.merge(per_stats[i]);
    for (const auto& s : per_scene[i]) records.push_back(s.to_json());
  }
  fs::path samples = fs::path(g.out_dir) / "samples.jsonl";
  write_jsonl(records, samples.string());

  json report = stats.to_json();
  report["config_hash"] = cfg.hash();
  report["seed"] = cfg.seed;
  std::ofstream rep(fs::path(g.out_dir) / "distribution.json");
  rep << report.dump(2) << "\n";
  std::cout << "wrote " << records.size() << " samples to " << samples.string()
            << "\n";
  return 0;
}

int cmd_eval_3dod(const GlobalFlags& g, const std::string& pred_path,
                  const std::string& store_dir, const std::string& report_path) {
  RunConfig cfg = effective_config(g);
  auto paths = list_store(store_dir);
  NormalizeOptions opts{cfg.depth_divisor, false};

  std::map<std::string, std::vector<Box3D>> gt_by_scene;
  for (const auto& p : paths) {
    ScenePack pack = load_pack(p, opts);
    std::vector<Box3D> boxes;
    for (const auto& o : pack.objects) boxes.push_back(o.box);
    gt_by_scene[pack.id] = std::move(boxes);
  }

  std::map<std::string, std::vector<Box3D>> pred_by_scene;
  for (const auto& rec : read_jsonl(pred_path)) {
    if (!rec.contains("scene") || !rec["scene"].is_string())
      throw ValidationError("prediction record without a scene id");
    std::string scene = rec["scene"].get<std::string>();
    std::optional<std::vector<Box3D>> boxes;
    if (rec.contains("boxes"))
      boxes = parse_boxes_response(rec["boxes"].dump());
    else if (rec.contains("response") && rec["response"].is_string())
      boxes = parse_boxes_response(rec["response"].get<std::string>());
    pred_by_scene[scene] = boxes.value_or(std::vector<Box3D>{});
  }

  std::vector<std::vector<Box3D>> gt_sets, pred_sets;
  for (const auto& [scene, gts] : gt_by_scene) {
    gt_sets.push_back(gts);
    auto it = pred_by_scene.find(scene);
    pred_sets.push_back(it == pred_by_scene.end() ? std::vector<Box3D>{}
                                                  : it->second);
  }

  EvalReport rep = evaluate_detections(pred_sets, gt_sets, cfg.iou_thresholds,
                                       cfg.ar_top_k);
  json out = eval_report_to_json(rep, cfg, gt_sets.size());
  std::string dumped = out.dump(2);
  std::cout << dumped << "\n";
  if (!report_path.empty()) {
    std::ofstream f(report_path);
    f << dumped << "\n";
  }
  return 0;
}

int cmd_reward(const GlobalFlags& g, const std::string& task_flag) {
  RunConfig cfg = effective_config(g);
  std::string line;
  size_t lineno = 0;
  while (std::getline(std::cin, line)) {
    ++lineno;
    if (line.empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded()) {
      std::cout << json{{"line", lineno}, {"error", "malformed JSON"}}.dump() << "\n";
      continue;
    }
    try {
      std::string task = rec.value("task", task_flag);
      std::string response = rec.value("response", std::string());
      bool format_ok = check_think_format(response);
      RewardBreakdown rb;
      json out;
      if (task == "3d_detection") {
        std::vector<Box3D> gts;
        if (rec.contains("gt") && rec["gt"].contains("boxes")) {
          auto parsed = parse_boxes_response(rec["gt"]["boxes"].dump());
          if (!parsed) throw ValidationError("gt.boxes not parseable");
          gts = *parsed;
        }
        auto preds = parse_boxes_response(response);
        RewardBreakdown acc = detection_reward(
            preds.value_or(std::vector<Box3D>{}), gts, cfg.alpha, cfg.tau);
        rb = total_reward(acc.accuracy, format_ok);
        out["r_iou"] = acc.r_iou;
        out["r_f1"] = acc.r_f1;
        out["alpha"] = cfg.alpha;
      } else if (task == "multiple_choice") {
        std::string gold = rec.at("gt").value("option", std::string());
        if (gold.empty()) throw ValidationError("gt.option missing");
        rb = total_reward(mcq_accuracy(response, gold[0]), format_ok);
      } else if (task == "open_ended" || task == "ocr") {
        std::string gold = rec.at("gt").value("text", std::string());
        rb = total_reward(exact_match(answer_region(response), gold), format_ok);
      } else {
        throw ValidationError("unknown task type: " + task);
      }
      if (rec.contains("id")) out["id"] = rec["id"];
      out["task"] = task;
      out["accuracy"] = rb.accuracy;
      out["format"] = rb.format;
      out["total"] = rb.total;
      std::cout << out.dump() << "\n";
    } catch (const std::exception& e) {
      json err{{"line", lineno}, {"error", e.what()}};
      if (rec.contains("id")) err["id"] = rec["id"];
      std::cout << err.dump() << "\n";
    }
  }
  return 0;
}

int cmd_render_bev(const GlobalFlags& g, const std::string& store_dir,
                   const std::string& scene_id, const std::string& out_path,
                   double meters_per_pixel) {
  RunConfig cfg = effective_config(g);
  fs::path pack_path = fs::path(store_dir) / (scene_id + ".json");
  if (!fs::exists(pack_path)) throw DataError("no such scene in store: " + scene_id);
  ScenePack pack = load_pack(pack_path.string(), {cfg.depth_divisor, false});
  BevRaster bev = render_bev(pack.objects, meters_per_pixel);
  write_rgb_png(bev.width, bev.height, bev.rgb, out_path);
  std::cout << "wrote " << out_path << " (" << bev.width << "x" << bev.height
            << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spatial data engines and 3D-detection metrics"};
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--config", g.config_path,
                 "config JSON (falls back to $SPATIAL_FORGE_CONFIG)");
  app.add_option("--seed", g.seed, "root seed");
  app.add_option("--jobs", g.jobs, "parallel scene workers");
  app.add_option("--f-new", g.f_new, "unified focal length, pixels");
  app.add_option("--alpha", g.alpha, "IoU/F1 mix for the detection reward");
  app.add_option("--tau", g.tau, "true-positive IoU threshold");
  app.add_option("--rel-tol", g.rel_tol, "relative depth-gap tolerance");
  app.add_option("--tasks", g.tasks_csv, "comma-separated task tags, or 'all'");
  app.add_option("--out", g.out_dir, "output directory");

  std::vector<std::string> manifests;
  auto* ingest = app.add_subcommand("ingest", "normalize scene manifests into a store");
  ingest->add_option("--manifest", manifests, "manifest JSON path(s)")->required();

  std::string store_dir;
  auto* unify = app.add_subcommand("unify-fov", "re-image a store at one focal length");
  unify->add_option("--store", store_dir, "pack store directory")->required();

  auto* gen = app.add_subcommand("gen", "generate instruction samples");
  gen->add_option("--store", store_dir, "pack store directory")->required();

  std::string pred_path, report_path;
  auto* eval = app.add_subcommand("eval-3dod", "AP/AR evaluation of detections");
  eval->add_option("--pred", pred_path, "predictions JSONL")->required();
  eval->add_option("--store", store_dir, "ground-truth pack store")->required();
  eval->add_option("--report", report_path, "also write the report here");

  std::string task_flag = "3d_detection";
  auto* reward = app.add_subcommand(
      "reward", "stream NDJSON rollouts on stdin, rewards on stdout");
  reward->add_option("--task", task_flag, "default task type for records");

  std::string scene_id, bev_out = "bev.png";
  double mpp = 0.01;
  auto* bev = app.add_subcommand("render-bev", "top-down footprint render");
  bev->add_option("--store", store_dir, "pack store directory")->required();
  bev->add_option("--scene", scene_id, "scene id")->required();
  bev->add_option("--out-image", bev_out, "output PNG path");
  bev->add_option("--scale", mpp, "meters per pixel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // help/version exit 0; anything else is a validation failure
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(ingest)) return cmd_ingest(g, manifests);
    if (app.got_subcommand(unify)) return cmd_unify_fov(g, store_dir);
    if (app.got_subcommand(gen)) return cmd_gen(g, store_dir);
    if (app.got_subcommand(eval))
      return cmd_eval_3dod(g, pred_path, store_dir, report_path);
    if (app.got_subcommand(reward)) return cmd_reward(g, task_flag);
    if (app.got_subcommand(bev))
      return cmd_render_bev(g, store_dir, scene_id, bev_out, mpp);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
