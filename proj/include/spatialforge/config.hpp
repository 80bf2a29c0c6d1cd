#pragma once

#include <json.hpp>
#include <map>
#include <string>
#include <vector>

#include "spatialforge/sample_gen.hpp"

namespace spatialforge {

/// Pipeline configuration. The canonical JSON form is hashed into every
/// output's meta so any artifact can be traced back to its settings.
struct RunConfig {
  double f_new = 500.0;
  double alpha = 0.5;
  double tau = 0.25;
  std::vector<double> iou_thresholds = {0.15, 0.25, 0.50};
  int ar_top_k = 100;
  double rel_tol = 0.05;
  double depth_divisor = 1000.0;
  uint64_t seed = 0;
  int jobs = 1;
  int samples_per_task = 2;  // generation attempts per task per scene
  GenConfig gen;
  std::map<std::string, double> task_weights;  // task tag -> weight, default 1

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  std::string hash() const;  // fnv1a64 hex of the canonical JSON
  void validate() const;     // throws ValidationError outside documented ranges
};

/// Loads the config from `path` if nonempty, else from $SPATIAL_FORGE_CONFIG
/// if set, else returns defaults.
RunConfig load_run_config(const std::string& path);

}  // namespace spatialforge
