#include "spatialforge/config.hpp"

#include <cstdlib>
#include <fstream>

#include "spatialforge/errors.hpp"
#include "spatialforge/rng.hpp"

namespace spatialforge {

using nlohmann::json;

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  c.f_new = j.value("f_new", c.f_new);
  c.alpha = j.value("alpha", c.alpha);
  c.tau = j.value("tau", c.tau);
  if (j.contains("iou_thresholds"))
    c.iou_thresholds = j["iou_thresholds"].get<std::vector<double>>();
  c.ar_top_k = j.value("ar_top_k", c.ar_top_k);
  c.rel_tol = j.value("rel_tol", c.rel_tol);
  c.depth_divisor = j.value("depth_divisor", c.depth_divisor);
  c.seed = j.value("seed", c.seed);
  c.jobs = j.value("jobs", c.jobs);
  c.samples_per_task = j.value("samples_per_task", c.samples_per_task);
  if (j.contains("task_weights"))
    c.task_weights = j["task_weights"].get<std::map<std::string, double>>();
  if (j.contains("gen")) {
    const json& g = j["gen"];
    c.gen.min_depth_gap = g.value("min_depth_gap", c.gen.min_depth_gap);
    c.gen.distance_tie_tol = g.value("distance_tie_tol", c.gen.distance_tie_tol);
    c.gen.rotation_floor_deg = g.value("rotation_floor_deg", c.gen.rotation_floor_deg);
    c.gen.translation_floor_m = g.value("translation_floor_m", c.gen.translation_floor_m);
    c.gen.dominant_ratio = g.value("dominant_ratio", c.gen.dominant_ratio);
    c.gen.compass_boundary_margin_deg =
        g.value("compass_boundary_margin_deg", c.gen.compass_boundary_margin_deg);
    c.gen.correspondence_points =
        g.value("correspondence_points", c.gen.correspondence_points);
    c.gen.count_allow_zero = g.value("count_allow_zero", c.gen.count_allow_zero);
  }
  c.gen.rel_tol = c.rel_tol;
  return c;
}

json RunConfig::to_json() const {
  json g = {{"min_depth_gap", gen.min_depth_gap},
            {"distance_tie_tol", gen.distance_tie_tol},
            {"rotation_floor_deg", gen.rotation_floor_deg},
            {"translation_floor_m", gen.translation_floor_m},
            {"dominant_ratio", gen.dominant_ratio},
            {"compass_boundary_margin_deg", gen.compass_boundary_margin_deg},
            {"correspondence_points", gen.correspondence_points},
            {"count_allow_zero", gen.count_allow_zero}};
  return json{{"f_new", f_new},
              {"alpha", alpha},
              {"tau", tau},
              {"iou_thresholds", iou_thresholds},
              {"ar_top_k", ar_top_k},
              {"rel_tol", rel_tol},
              {"depth_divisor", depth_divisor},
              {"seed", seed},
              {"jobs", jobs},
              {"samples_per_task", samples_per_task},
              {"task_weights", task_weights},
              {"gen", g}};
}

std::string RunConfig::hash() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(to_json().dump())));
  return buf;
}

void RunConfig::validate() const {
  if (!(f_new > 0)) throw ValidationError("config: f_new must be > 0");
  if (alpha < 0 || alpha > 1) throw ValidationError("config: alpha must be in [0, 1]");
  if (!(tau > 0 && tau < 1)) throw ValidationError("config: tau must be in (0, 1)");
  if (iou_thresholds.empty()) throw ValidationError("config: iou_thresholds empty");
  for (double t : iou_thresholds)
    if (!(t > 0 && t < 1))
      throw ValidationError("config: iou thresholds must be in (0, 1)");
  if (rel_tol < 0) throw ValidationError("config: rel_tol must be >= 0");
  if (!(depth_divisor > 0)) throw ValidationError("config: depth_divisor must be > 0");
  if (jobs < 1) throw ValidationError("config: jobs must be >= 1");
  if (ar_top_k < 1) throw ValidationError("config: ar_top_k must be >= 1");
  if (samples_per_task < 1)
    throw ValidationError("config: samples_per_task must be >= 1");
  for (const auto& [tag, w] : task_weights) {
    if (!task_from_tag(tag)) throw ValidationError("config: unknown task '" + tag + "'");
    if (w < 0) throw ValidationError("config: task weight must be >= 0");
  }
}

RunConfig load_run_config(const std::string& path) {
  std::string effective = path;
  if (effective.empty()) {
    const char* env = std::getenv("SPATIAL_FORGE_CONFIG");
    if (env && *env) effective = env;
  }
  if (effective.empty()) return RunConfig{};
  std::ifstream in(effective);
  if (!in) throw DataError("cannot open config: " + effective);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ValidationError("config is not valid JSON: " + effective);
  return RunConfig::from_json(j);
}

}  // namespace spatialforge
