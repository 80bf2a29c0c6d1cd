#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "spatialforge/scene.hpp"

namespace spatialforge {

// The task families samples are tagged with (single-image, multi-image and
// video engines plus the teacher-generated caption/CoT families).
enum class Task {
  RelativeDepth,
  DistanceCompare,
  Det3dSingle,
  Det3dMulti,
  Grounding3d,
  MeasurementHeight,
  MeasurementDim,
  SceneCaptionSingle,
  SceneCaptionMulti,
  Correspondence,
  ObjObjDirection,
  ObjObjDistance,
  CamCamPosition,
  CamCamFacing,
  CameraMotionRotation,
  CameraMotionTranslation,
  VideoAppearanceOrder,
  VideoCount,
  VideoObjObj,
};

const char* task_tag(Task t);
std::optional<Task> task_from_tag(const std::string& tag);
std::vector<Task> all_tasks();

struct Turn {
  std::string role;  // system | user | assistant
  std::string content;
};

extern const char* kCotSystemPrompt;

/// One chat-format training record. `answer` is the canonical answer string;
/// when `think` is set the final assistant turn serializes as
/// "<think>...</think> answer" under the usual reasoning format.
struct InstructionSample {
  std::string id;
  Task task = Task::RelativeDepth;
  std::vector<std::string> media;
  std::vector<Turn> turns;
  std::optional<std::string> think;
  std::string answer;
  nlohmann::json meta = nlohmann::json::object();

  nlohmann::json to_json() const;
};

/// Knobs the generators share. Values are conservative defaults that keep
/// generated questions answerable; everything is config-exposed.
struct GenConfig {
  double min_depth_gap = 0.15;          // meters, ordering questions
  double distance_tie_tol = 0.10;       // meters, comparison questions
  double rotation_floor_deg = 5.0;      // camera-motion label floor
  double translation_floor_m = 0.10;
  double dominant_ratio = 0.5;          // axis kept if >= ratio * max component
  double compass_boundary_margin_deg = 0.5;  // skip bearings near sector edges
  double rel_tol = 0.05;                // visibility depth-gap tolerance
  int correspondence_points = 16;
  bool count_allow_zero = false;
};

enum class RefFormat { Text, Point, Box2d, VisualPrompt };
enum class OrderDirection { NearToFar, FarToNear };
enum class MeasureKind { Height, MaxDim };
enum class LengthUnit { Centimeters, Meters };
enum class TurnMode { Single, Multi };
enum class RelationKind { Direction, Distance };
enum class CamCamKind { Position, Facing };
enum class MotionKind { Rotation, Translation };

// ---------------------------------------------------------------------------
// Direction primitives

enum class Compass {
  North, NorthEast, East, SouthEast, South, SouthWest, West, NorthWest
};
const char* compass_name(Compass c);

/// Bearing of c as seen from a, in degrees clockwise (viewed from above in
/// this Y-down frame) from the reference direction a->b, ground plane only.
/// Throws DegenerateReference when a->b or a->c has no ground projection.
double compass_bearing_deg(const Vec3& a, const Vec3& b, const Vec3& c);

/// The bearing binned into 8 sectors of 45 degrees centered on the compass
/// points; exact boundary ties resolve toward the cardinal.
Compass compass_relation(const Vec3& a, const Vec3& b, const Vec3& c);
Compass compass_from_bearing(double bearing_deg);
Compass compass_rotated(Compass base, double clockwise_deg);

enum class EgoSector {
  Front, FrontRight, Right, BackRight, Back, BackLeft, Left, FrontLeft
};
const char* ego_sector_name(EgoSector s, bool hyphen = true);

/// Sector of a camera-frame position (X right, Z forward), front at +Z. The
/// zero vector maps to Front.
EgoSector position_sector(double x, double z);
double position_bearing_deg(double x, double z);

// ---------------------------------------------------------------------------
// Camera motion

struct CameraMotion {
  std::vector<std::string> rotation_labels;     // "panning to the right", ...
  std::vector<std::string> translation_labels;  // "rightward", ...
  EulerAngles relative_rotation;                // normalized units
  Vec3 relative_translation;                    // camera-1 coordinates
};

/// Relative motion from camera 1 to camera 2, decomposed in camera-1
/// coordinates and labeled per the dominant-component rule. Throws
/// NoSignificantMotion when nothing clears the floors.
CameraMotion classify_camera_motion(const Pose& world_from_cam1,
                                    const Pose& world_from_cam2,
                                    const GenConfig& cfg = {});

// ---------------------------------------------------------------------------
// Generators. All are pure in (pack, arguments, seed); template_id = -1 picks
// a phrasing from the pool by seed. Generators throw GenSkip subclasses when
// the scene cannot support the sample.

InstructionSample gen_depth_order(const ScenePack& pack, int k, RefFormat format,
                                  uint64_t seed, const GenConfig& cfg = {},
                                  int template_id = -1);

InstructionSample gen_distance_compare(const ScenePack& pack, int anchor_index,
                                       const std::vector<int>& candidates,
                                       uint64_t seed, const GenConfig& cfg = {},
                                       int template_id = -1);

/// Detection sample over FoV-unified frames: camera-parameter preamble plus
/// one query per label (one user/assistant turn pair each in Multi mode, a
/// single pair in Single mode).
InstructionSample gen_3ddet_sample(const ScenePack& pack,
                                   const std::vector<std::string>& labels,
                                   TurnMode mode, uint64_t seed,
                                   int template_id = -1);

InstructionSample gen_grounding(const ScenePack& pack, const Box3D& box,
                                uint64_t seed, int template_id = -1);

InstructionSample gen_measurement(const ScenePack& pack, int object_index,
                                  MeasureKind kind, LengthUnit unit, uint64_t seed,
                                  int template_id = -1);

struct MeasureQuery {
  int object_index = 0;
  MeasureKind kind = MeasureKind::Height;
  LengthUnit unit = LengthUnit::Centimeters;
};
/// Multi-turn batch over shared media.
InstructionSample gen_measurement_multi(const ScenePack& pack,
                                        const std::vector<MeasureQuery>& queries,
                                        uint64_t seed, int template_id = -1);

InstructionSample gen_objobj_relation(const ScenePack& pack, RelationKind kind,
                                      uint64_t seed, const GenConfig& cfg = {},
                                      int template_id = -1);

InstructionSample gen_camcam_relation(const ScenePack& pack, CamCamKind kind,
                                      uint64_t seed, const GenConfig& cfg = {},
                                      int template_id = -1);

InstructionSample gen_camera_motion(const ScenePack& pack, MotionKind kind,
                                    uint64_t seed, const GenConfig& cfg = {},
                                    int template_id = -1);

InstructionSample gen_video_order(const ScenePack& pack, int k, uint64_t seed,
                                  const GenConfig& cfg = {}, int template_id = -1);

InstructionSample gen_video_count(const ScenePack& pack, const std::string& label,
                                  uint64_t seed, const GenConfig& cfg = {},
                                  int template_id = -1);

InstructionSample gen_video_objobj(const ScenePack& pack, RelationKind kind,
                                   uint64_t seed, const GenConfig& cfg = {},
                                   int template_id = -1);

InstructionSample gen_correspondence_sample(const ScenePack& pack, int object_index,
                                            uint64_t seed, const GenConfig& cfg = {},
                                            int template_id = -1);

// ---------------------------------------------------------------------------
// Naming helpers (shared with prompt assembly)

/// "pillow-A" when the label is ambiguous within the pack, else "pillow".
std::string display_name(const ScenePack& pack, int object_index);
/// display_name plus a reference annotation when 2D refs exist for `frame`:
/// "pillow-A (orange point)".
std::string display_name_with_ref(const ScenePack& pack, int object_index,
                                  int frame);
const char* ref_color(int object_index);

}  // namespace spatialforge
