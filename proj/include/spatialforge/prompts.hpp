#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spatialforge/scene.hpp"

namespace spatialforge {

enum class TeacherPromptKind {
  SceneCaption,         // layout-focused caption from GT boxes + relations
  CotObjectRelation,    // reasoning trace grounded on the top-view render
  CotCameraRotation,
  CotCameraTranslation,
};

/// Caller-supplied slots for the CoT prompts.
struct TeacherQA {
  std::string question_type;
  std::string question;
  std::string answer;
  std::string few_shot_examples;  // may be empty
  std::string calc_process;       // rule-derived calculation text, may be empty
};

/// A fully rendered prompt plus the media attachments it references, in
/// order. For CotObjectRelation the last attachment is the top-view image.
struct PromptDoc {
  std::string text;
  std::vector<std::string> media;
};

/// True when a {snake_case} placeholder token is still present.
bool has_unfilled_placeholder(const std::string& text);

/// Renders the prompt for `kind`, filling every placeholder from the pack
/// and qa. Throws MissingPlaceholder when required content is empty (no
/// objects, empty question, missing top-view attachment).
PromptDoc build_teacher_prompt(TeacherPromptKind kind, const ScenePack& pack,
                               const TeacherQA& qa,
                               const std::optional<std::string>& bev_image = {});

// Rendered object/camera description blocks (exposed for tests).
std::string caption_object_info(const ScenePack& pack);
std::string bev_object_info(const ScenePack& pack);
std::string camera_info(const ScenePack& pack);

/// Boundary to the external VLM that writes captions and reasoning traces.
class TeacherClient {
 public:
  virtual ~TeacherClient() = default;
  virtual std::string complete(const PromptDoc& prompt) = 0;
};

/// Offline stand-in: canned responses keyed by prompt-text hash. Missing
/// entries throw DataError.
class ReplayTeacherClient : public TeacherClient {
 public:
  ReplayTeacherClient() = default;
  explicit ReplayTeacherClient(const std::string& replay_json_path);
  void add(const std::string& prompt_text, const std::string& response);
  std::string complete(const PromptDoc& prompt) override;

 private:
  std::map<uint64_t, std::string> canned_;
};

}  // namespace spatialforge
