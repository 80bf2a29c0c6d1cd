#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "spatialforge/config.hpp"
#include "spatialforge/metrics.hpp"
#include "spatialforge/scene.hpp"

namespace spatialforge {

struct GenStats {
  std::map<std::string, int> generated;
  std::map<std::string, int> skipped;

  void merge(const GenStats& other);
  nlohmann::json to_json() const;
};

/// Runs every applicable generator for `tasks` over one scene. Seeds derive
/// from (config seed, scene id, task, attempt); GenSkip outcomes are counted,
/// not raised. Samples carry the config hash in meta.
std::vector<InstructionSample> generate_for_scene(const ScenePack& pack,
                                                  const RunConfig& cfg,
                                                  const std::vector<Task>& tasks,
                                                  GenStats* stats);

/// Scene ids a generation run covers by default: caption tasks are assembled
/// as teacher prompts, not template samples, so they are excluded here.
std::vector<Task> default_gen_tasks();

/// Sorted pack file paths under a store directory.
std::vector<std::string> list_store(const std::string& dir);

/// Parallel map over scenes with deterministic, id-ordered output. `jobs`
/// threads; results are merged in input order regardless of completion order.
void for_each_scene(const std::vector<std::string>& pack_paths, int jobs,
                    const std::function<void(size_t, const std::string&)>& fn);

nlohmann::json eval_report_to_json(const EvalReport& rep, const RunConfig& cfg,
                                   size_t n_scenes);

}  // namespace spatialforge
