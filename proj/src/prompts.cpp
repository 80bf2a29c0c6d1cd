#include "spatialforge/prompts.hpp"

#include <cctype>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "spatialforge/errors.hpp"
#include "spatialforge/rng.hpp"
#include "spatialforge/sample_gen.hpp"

namespace spatialforge {

namespace {

std::string fill_slot(std::string text, const std::string& key, const std::string& value) {
  std::string tok = "{" + key + "}";
  size_t pos = 0;
  while ((pos = text.find(tok, pos)) != std::string::npos) {
    text.replace(pos, tok.size(), value);
    pos += value.size();
  }
  return text;
}

const char* kSceneCaptionPrompt = R"PROMPT(You are a 3D scene understanding expert tasked with generating ego-centric spatial descriptions for the given image.

Coordinate System
- Origin: Camera viewpoint at (0,0,0)
- Axes:
  X (Rightward, horizontal)
  Y (Downward, vertical)
  Z (Depth, forward)

Input Data Specification
For each object:
- name: "object (color point-x)"
- size: [X-width, Y-height, Z-length] in meters
- centroid: (x, y, z) where z is depth from image plane
- distance_to_camera: distance from object center to camera, in meters

Relationships include:
1. Binary relationships: [Object-A, Object-B, spatial_relation] (direct positional relationships)
2. Multi-object relationships: [[Object-A, Object-B, Object-C...], spatial_relation] (group spatial relationships)
3. Distance between two objects in 3D space: [Object-A, Object-B, "distance = X.XX m"] (quantitative supplements)

Scene information
Camera: center_x = 0, center_y = 0, center_z (depth) = 0
{object_info}

Output Guidelines
1. Depth Handling:
- Explicitly state depth comparisons using meter values (e.g., "1.2 m closer")
- Use "closer/farther" for relative depth comparisons

2. Spatial Relations:
- You can refer to "Binary relationships" and "Multi-object relationships"
- You can also summarize from the original data:
  X-axis: absolute delta x > 0.5 m implies clear left/right
  Y-axis: absolute delta y > 0.3 m implies taller/shorter (Y-axis)
  Z-axis: absolute delta z > 1 m implies clear in front of/behind

3. Relationship Coverage:
- 100 percent coverage of provided binary/multi-object relationships
- Include more than 70 percent of distance metrics (prioritize distances less than 3 m)

4. Conflict Resolution:
- Prioritize explicit relationship declarations over coordinate calculations
- Use distance metrics only for quantitative enhancement, not directional correction

5. Viewpoint Consistency:
- All directional descriptions must be strictly from camera perspective
- Never use absolute coordinates except for Z-axis depth values

6. Structural Flow:
- Camera to nearest object to depth progression (describe the depth value if necessary)
- Anchor object (table) to surrounding objects
- Group formations to individual outliers

7. Format Requirements (MUST follow):
- Output 4 to 20 sentences
- Plain text only (no markdown)
- Strictly preserve object names (exact "object (color point-x)" format)
- When making numerical references, specify the name of the numerical relationship, for example, (depth = x m). Unit is required.
- Prohibited phrases: "according to the coordinates", "as shown in the data", axis terminology, "The multi - object relationships show", "Binary relationships:"
- Prohibited raw data regurgitation, relationship lists
- When referring to object quantity, count the objects in the image and text instead of referring to the point index.

Now, generate a caption for this scene based on the reference image and the above information, enclosed in <caption> </caption>)PROMPT";

const char* kBevCotPrompt = R"PROMPT(You are an expert in 3D annotation. Given a set of images, ground-truth camera poses, ground-truth objects, and a specific question-answer pair, your task is to describe the given objects, rewrite the question and generate a chain-of-thought for the answer.

# Basic Information
Coordinate System:
- Origin: The first image's camera viewpoint at (0,0,0)
- Axes:
  → X: Rightward (horizontal)
  ↓ Y: Downward (vertical, perpendicular to the ground)
  ↗ Z: Forward

# Objects:
Each object is annotated with a class name, 3D position (x_center, y_center, z_center), size (x_size, y_size, z_size), and in_frames flag.
* x_center, y_center, z_center: Center position of the object in the frame1 coordinate system, in meters. If x_center is positive, it means the object is to the right of the camera in frame1. If y_center is positive, it means the object is below the camera in frame1. If z_center is positive, it means the object is in front of the camera in frame1.
* x_size, y_size, z_size: The dimensions of the object along the (X Y Z) axes, in meters, when the rotation angles are zero. y_size is the height.
* in_frames: A list indicating whether the object is present in each frame. The length of this list should match the number of frames. For instance, if an object is present in frame1 and frame2, the in_frames list will be [True, True]. If it is only present in frame1, the list will be [True, False].

# Input and Output format
The input is a set of images, ground-truth camera pose and 3D bounding boxes, question type, question and answer.
The output should be a triplet in json format, containing a revised question, a chain-of-thought process, and an answer:

{
  'question': revised_question,
  'thought': generated_thought,
  'answer': given_answer
}

# Requirement
When revising the question, you must describe each object using a concise caption that reflects its spatial position, material, shape, relationship with the environment, and other relevant features. Use these short captions to refer to objects in the question instead of their 'label' directly.
Your reasoning should be presented in the first person perspective, a detailed, step-by-step manner, forming a logical chain of thought that leads to the answer. This process must incorporate visual content from both image-1 and image-2, describing the entire scene.

Structure your response in four parts:
1. Describe the visual content of the first image, providing your initial observations of the scene.
2. Describe the visual content of the second image, emphasizing correspondences with the first image and noting any new elements or changes. If feasible, also describe the second image's camera rotation and translation relative to the first image's camera.
3. Summarize the overall layout of the scene as inferred from the two images and the TOP VIEW image. Then, provide a detailed, logical reasoning process based on your observations.
4. Summarize your answer.

Always use the TOP VIEW image to ensure your spatial descriptions are consistent with the overall scene layout, but do not explicitly reference the TOP VIEW image in your wording.
Ensure all spatial information in your descriptions aligns with what is visualized in the TOP VIEW image.
Do NOT refer to objects using 'color point' or similar terms, as these are not used in real-world visualizations.
Do NOT include any numerical calculations.
Do NOT include any coordinate-related information and their values, such as `x-axis`, `z-axis`.
Do NOT use phrases like `according to ground-truth` or similar expressions.
The question must be clear and free of any thought guidance.

# Examples and question type description
These are examples for reference. You can freely play with them.
{few_shot_examples}

# Input
These two images were taken consecutively, recording information about the same scene:
image-1:<|image_pad|>
image-2:<|image_pad|>
Ground-truth camera poses are: {camera_info}
Ground-truth objects are: {object_info}

The TOP VIEW of the scene described by the two images:<|image_pad|>

Question type is {question_type}:
{question}

The calculation process is for your reference (You don't have to use it):
{calc_process}

Now, generate response following task description, input and output format, and examples. Please strictly follow the json format. Use different phrasings or styles to ask the questions while maintaining consistency with the intent and structure of the examples.)PROMPT";

const char* kCameraCotHeader = R"PROMPT(You are an expert in 3D spatial reasoning and camera motion analysis. Your task is to analyze a pair of images that represent a sequence of camera movements. Given a specific question-answer pair about the camera's motion, you will first rewrite the question to be more precise and then generate a detailed, step-by-step chain-of-thought reasoning to justify the provided answer.

# Coordinate System:
- Origin: The first image's camera viewpoint at (0,0,0)
- Axes:
  → X: Rightward (horizontal)
  ↓ Y: Downward (vertical, perpendicular to the ground)
  ↗ Z: Forward (along the camera's viewing direction)
)PROMPT";

const char* kCameraRotationBody = R"PROMPT(
# Camera Motion Types (Rotations)
1. Pan (Yaw): Rotation around the vertical axis. This is like turning your head from side to side.
* Pan right: The camera rotates to its right. From the camera's perspective, the visual content appears to shift to the left. Objects on the left side of the frame may move out of view, while new objects on the right side may enter the frame.
* Pan left: The camera rotates to its left. The visual content appears to shift to the right.

2. Tilt (Pitch): Rotation around the horizontal axis. This is like nodding your head up or down.
* Tilt Up: The camera points upwards. From the camera's perspective, the scene appears to shift downwards. Objects originally in the center may move towards the bottom of the frame, and new content may appear at the top.
* Tilt Down: The camera points downwards. The scene appears to shift upwards.

3. Roll: Rotation around the forward viewing direction. This is like tilting your head to touch your ear to your shoulder.
* Roll Clockwise: The camera rotates clockwise. From the camera's perspective, the entire scene and all objects within it will appear to rotate counter-clockwise.
* Roll Counter-clockwise: The camera rotates counter-clockwise. The scene will appear to rotate clockwise.
)PROMPT";

const char* kCameraTranslationBody = R"PROMPT(
# Parallax Effect:
The parallax effect is the cornerstone of your analysis. It is the apparent displacement of an object when viewed from different lines of sight.
- Key Insight: Objects closer to the camera (foreground) will appear to move more significantly against the background than objects farther away.

# Camera Motion Types (Translation)

1. Translation along Z-axis (Forward/Backward):
- Moving Forward: All objects appear larger in apparent size. Foreground objects expand significantly more than background objects. Objects appear to move radially outward from the center of the view.
- Moving Backward: All objects appear smaller in apparent object size. Foreground objects shrink significantly more than background objects. Objects appear to move radially inward toward the center of the view.
When referring to 'object size,' it is important to distinguish between 'apparent object size' and 'real object size in 3D space.' This is because the apparent size of an object changes as the camera moves, while its real size in 3D space remains constant.

2. Translation along X-axis (Left/Right):
- Moving Rightward: Foreground objects appear to shift significantly to the LEFT relative to the background.
- Moving Leftward: Foreground objects appear to shift significantly to the RIGHT relative to the background.

3. Translation along Y-axis (Up/Down):
- Moving Upward: Foreground objects appear to shift significantly DOWNWARD relative to the background.
- Moving Downward (+Y): Foreground objects appear to shift significantly UPWARD relative to the background.
)PROMPT";

const char* kCameraCotTail = R"PROMPT(
# Input and Output format
The input is a set of images, question type, question, and answer.
The output should be a triplet in JSON format, containing a revised question, a chain-of-thought process, and an answer:
{
  'question': revised_question,
  'thought': generated_thought,
  'answer': given_answer
}

# Requirement
To generate high-quality Question, Answer, and Reasoning triplets. The generated content must be coherent, logical, and adhere to the specified format and persona.

1. Rewrite the Provided Question
    * Your primary task is to rephrase the original, user-provided question.
    * The rewritten question must be clear, specific, and well-formulated. It should eliminate any ambiguity or vagueness present in the original.
    * The core intent and subject matter of the original question must be preserved. Do not change the topic.

2. For the answer, provide an accurate answer that directly corresponds to the rewritten question. The question and answer should match.

3. Construct a Detailed Reasoning Process
    * This is a critical component. You must articulate the step-by-step thought process that leads from the question to the answer.
    * The reasoning should be logical, transparent, and demonstrate how you arrived at the final answer. It should explain *why* you chose certain information, how you connected different concepts, and the structure of your final response.
    * Your reasoning should be presented from a first-person perspective (e.g., "First, I will examine...", "I can see that...")

4. Embrace Creativity and Expansion
    * You are encouraged to be creative and expand on the given basic knowledge.

Do NOT include markdown format.
Do NOT include any numerical calculations.
Do NOT include any coordinate-related information and their values, such as `x-axis`, `y-axis`, `z-axis`, `X-axis`, `Y-axis`, `Z-axis`.
Do NOT use phrases like `according to ground-truth` or similar expressions.

# Example
These are some examples but don't feel constrained by the few-shot examples; you have creative freedom.
{few_shot_examples}

# Input
{input}

Now, generate response following the task description, input and output format, and examples. Please strictly follow the JSON format. Use different phrasings or styles to ask the questions while maintaining consistency with the intent and structure of the examples.)PROMPT";

std::string fmt2(double v) { return format2(v); }

std::string python_bool(bool b) { return b ? "True" : "False"; }

}  // namespace

bool has_unfilled_placeholder(const std::string& text) {
  for (size_t i = 0; i + 1 < text.size(); ++i) {
    if (text[i] != '{') continue;
    size_t j = i + 1;
    while (j < text.size() && (std::islower(static_cast<unsigned char>(text[j])) ||
                               text[j] == '_'))
      ++j;
    if (j > i + 1 && j < text.size() && text[j] == '}') return true;
  }
  return false;
}

std::string caption_object_info(const ScenePack& pack) {
  std::string out;
  auto point_name = [&](int i) {
    return pack.objects[i].label + " (" + ref_color(i) + " point-" +
           std::to_string(i) + ")";
  };
  for (size_t i = 0; i < pack.objects.size(); ++i) {
    const Box3D& b = pack.objects[i].box;
    out += "- name: \"" + point_name(static_cast<int>(i)) + "\"\n";
    out += "  size: [" + fmt2(b.size.x()) + ", " + fmt2(b.size.y()) + ", " +
           fmt2(b.size.z()) + "]\n";
    out += "  centroid: (" + fmt2(b.center.x()) + ", " + fmt2(b.center.y()) + ", " +
           fmt2(b.center.z()) + ")\n";
    out += "  distance_to_camera: " + fmt2(b.center.norm()) + "\n";
  }
  // relationships from the documented axis thresholds plus close-pair distances
  std::string rels;
  for (size_t i = 0; i < pack.objects.size(); ++i) {
    for (size_t j = i + 1; j < pack.objects.size(); ++j) {
      const Vec3& a = pack.objects[i].box.center;
      const Vec3& b = pack.objects[j].box.center;
      std::string na = point_name(static_cast<int>(i));
      std::string nb = point_name(static_cast<int>(j));
      double dx = b.x() - a.x(), dy = b.y() - a.y(), dz = b.z() - a.z();
      if (std::abs(dx) > 0.5)
        rels += "[" + na + ", " + nb + ", " + (dx > 0 ? "left of" : "right of") + "]\n";
      if (std::abs(dy) > 0.3)
        rels += "[" + na + ", " + nb + ", " + (dy > 0 ? "above" : "below") + "]\n";
      if (std::abs(dz) > 1.0)
        rels += "[" + na + ", " + nb + ", " + (dz > 0 ? "in front of" : "behind") + "]\n";
      double d = (b - a).norm();
      if (d < 3.0)
        rels += "[" + na + ", " + nb + ", \"distance = " + fmt2(d) + " m\"]\n";
    }
  }
  out += rels;
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

std::string bev_object_info(const ScenePack& pack) {
  std::string out;
  for (size_t i = 0; i < pack.objects.size(); ++i) {
    const SceneObject& o = pack.objects[i];
    out += "{'label': '" + o.label + "', 'position': (" + fmt2(o.box.center.x()) +
           ", " + fmt2(o.box.center.y()) + ", " + fmt2(o.box.center.z()) +
           "), 'size': (" + fmt2(o.box.size.x()) + ", " + fmt2(o.box.size.y()) +
           ", " + fmt2(o.box.size.z()) + "), 'in_frames': [";
    for (size_t k = 0; k < o.in_frames.size(); ++k) {
      if (k) out += ", ";
      out += python_bool(o.in_frames[k]);
    }
    out += "]}\n";
  }
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

std::string camera_info(const ScenePack& pack) {
  std::string out = "frame-1: at the origin with identity orientation";
  for (size_t k = 1; k < pack.frames.size(); ++k) {
    const Pose& p = pack.frames[k].world_from_cam;
    EulerAngles a = matrix_to_euler(p.rotation).angles;
    out += "; frame-" + std::to_string(k + 1) + ": rotation (pitch, yaw, roll) = (" +
           fmt2(a.pitch) + ", " + fmt2(a.yaw) + ", " + fmt2(a.roll) +
           ") normalized, translation (x, y, z) = (" + fmt2(p.translation.x()) +
           ", " + fmt2(p.translation.y()) + ", " + fmt2(p.translation.z()) +
           ") meters";
  }
  return out;
}

PromptDoc build_teacher_prompt(TeacherPromptKind kind, const ScenePack& pack,
                               const TeacherQA& qa,
                               const std::optional<std::string>& bev_image) {
  PromptDoc doc;
  switch (kind) {
    case TeacherPromptKind::SceneCaption: {
      if (pack.objects.empty())
        throw MissingPlaceholder("object_info: the pack has no objects");
      doc.text = fill_slot(kSceneCaptionPrompt, "object_info", caption_object_info(pack));
      doc.media.push_back(pack.frames.front().image);
      break;
    }
    case TeacherPromptKind::CotObjectRelation: {
      if (pack.objects.empty())
        throw MissingPlaceholder("object_info: the pack has no objects");
      if (pack.frames.size() < 2)
        throw MissingPlaceholder("image-2: the pack has a single frame");
      if (qa.question.empty()) throw MissingPlaceholder("question");
      if (!bev_image || bev_image->empty())
        throw MissingPlaceholder("top-view image attachment");
      std::string text = kBevCotPrompt;
      text = fill_slot(text, "few_shot_examples",
                  qa.few_shot_examples.empty() ? "(none)" : qa.few_shot_examples);
      text = fill_slot(text, "camera_info", camera_info(pack));
      text = fill_slot(text, "object_info", bev_object_info(pack));
      text = fill_slot(text, "question_type",
                  qa.question_type.empty() ? "object-object orientation"
                                           : qa.question_type);
      text = fill_slot(text, "question", qa.question);
      text = fill_slot(text, "calc_process",
                  qa.calc_process.empty() ? "(not provided)" : qa.calc_process);
      doc.text = std::move(text);
      doc.media = {pack.frames[0].image, pack.frames[1].image, *bev_image};
      break;
    }
    case TeacherPromptKind::CotCameraRotation:
    case TeacherPromptKind::CotCameraTranslation: {
      if (pack.frames.size() < 2)
        throw MissingPlaceholder("image pair: the pack has a single frame");
      if (qa.question.empty()) throw MissingPlaceholder("question");
      std::string text = std::string(kCameraCotHeader) +
                         (kind == TeacherPromptKind::CotCameraRotation
                              ? kCameraRotationBody
                              : kCameraTranslationBody) +
                         kCameraCotTail;
      text = fill_slot(text, "few_shot_examples",
                  qa.few_shot_examples.empty() ? "(none)" : qa.few_shot_examples);
      std::string input = "Question type is " +
                          (qa.question_type.empty() ? "camera motion" : qa.question_type) +
                          ".\nQuestion: " + qa.question;
      if (!qa.answer.empty()) input += "\nAnswer: " + qa.answer;
      text = fill_slot(text, "input", input);
      doc.text = std::move(text);
      doc.media = {pack.frames[0].image, pack.frames[1].image};
      break;
    }
  }
  if (has_unfilled_placeholder(doc.text))
    throw MissingPlaceholder("template retains an unfilled placeholder");
  return doc;
}

ReplayTeacherClient::ReplayTeacherClient(const std::string& replay_json_path) {
  std::ifstream in(replay_json_path);
  if (!in) throw DataError("cannot open replay file: " + replay_json_path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw DataError("replay file must be a JSON object of hash -> response");
  for (const auto& [key, val] : j.items()) {
    if (!val.is_string()) throw DataError("replay responses must be strings");
    try {
      canned_[std::stoull(key, nullptr, 16)] = val.get<std::string>();
    } catch (const std::logic_error&) {
      throw DataError("replay key is not a hex hash: " + key);
    }
  }
}

void ReplayTeacherClient::add(const std::string& prompt_text,
                              const std::string& response) {
  canned_[fnv1a64(prompt_text)] = response;
}

std::string ReplayTeacherClient::complete(const PromptDoc& prompt) {
  auto it = canned_.find(fnv1a64(prompt.text));
  if (it == canned_.end())
    throw DataError("no canned response for this prompt; run the live teacher");
  return it->second;
}

}  // namespace spatialforge
