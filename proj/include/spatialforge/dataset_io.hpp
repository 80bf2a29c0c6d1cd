#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "spatialforge/scene.hpp"

namespace spatialforge {

/// Validated manifest: raw JSON plus its location (relative paths inside the
/// manifest resolve against its directory). Unknown fields are preserved in
/// `raw`.
struct SceneManifest {
  nlohmann::json raw;
  std::string dir;
  std::string path;
};

/// Loads and schema-validates a scene manifest. Throws SchemaViolation with
/// a JSON-pointer path on the first offending field, DataError on I/O.
SceneManifest load_manifest(const std::string& path);

struct NormalizeOptions {
  double depth_divisor = 1000.0;
  bool load_depth = true;
  double rel_tol = 0.05;  // occlusion tolerance for computed in_frames flags
};

/// Builds a ScenePack with every box, instance point and pose re-expressed in
/// the first frame's camera coordinates. Manifest-provided in_frames flags
/// are honored; otherwise flags are computed from center visibility (depth
/// occlusion check when a depth map exists, frustum test when not).
ScenePack normalize(const SceneManifest& manifest,
                    const NormalizeOptions& opts = {});

/// Re-images every frame at focal length f_new: cameras and 2D refs rescale,
/// attached depth maps are resampled (nearest), 3D boxes are untouched.
ScenePack unify_pack(const ScenePack& pack, double f_new);

// Pack store round-trip (one JSON document per scene).
nlohmann::json pack_to_json(const ScenePack& pack);
ScenePack pack_from_json(const nlohmann::json& j, const std::string& base_dir,
                         const NormalizeOptions& opts = {});
void save_pack(const ScenePack& pack, const std::string& path);
ScenePack load_pack(const std::string& path, const NormalizeOptions& opts = {});

// JSONL: one record per line, UTF-8, write-then-read identity.
void write_jsonl(const std::vector<nlohmann::json>& records,
                 const std::string& path);
std::vector<nlohmann::json> read_jsonl(const std::string& path);

}  // namespace spatialforge
