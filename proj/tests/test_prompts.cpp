#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "spatialforge/dataset_io.hpp"
#include "spatialforge/prompts.hpp"
#include "support/fixtures.hpp"

using namespace spatialforge;
namespace fs = std::filesystem;

namespace {

ScenePack pair_pack() {
  static std::string dir = [] {
    std::string d = (fs::temp_directory_path() / "sf_prompt_fixtures").string();
    fs::remove_all(d);
    fixtures::write_corpus(d);
    return d;
  }();
  return normalize(load_manifest(dir + "/scene_pair.json"));
}

std::string golden_dir() {
  return std::string(SPATIALFORGE_TEST_DIR) + "/golden";
}

// Compare against a checked-in render; regenerate with
// SPATIALFORGE_REGEN_GOLDEN=1 when the template intentionally changes.
void check_golden(const std::string& name, const std::string& text) {
  std::string path = golden_dir() + "/" + name;
  if (std::getenv("SPATIALFORGE_REGEN_GOLDEN")) {
    fs::create_directories(golden_dir());
    std::ofstream f(path, std::ios::binary);
    f << text;
  }
  std::ifstream f(path, std::ios::binary);
  REQUIRE_MESSAGE(f.good(), "missing golden file: " << path);
  std::string want((std::istreambuf_iterator<char>(f)), {});
  CHECK(text == want);
}

TeacherQA sample_qa() {
  TeacherQA qa;
  qa.question_type = "object-object orientation";
  qa.question =
      "If the lamp in the first image is north of the table, what direction "
      "is the chair in the second image from the table? Options: A. "
      "southeast, B. northeast, C. south, D. northwest";
  qa.answer = "C. south";
  qa.few_shot_examples = "Example: ...";
  qa.calc_process =
      "North is the direction from the table to the lamp. The bearing of the "
      "chair from the table is 185.8 degrees, which falls in the south "
      "sector.";
  return qa;
}

}  // namespace

TEST_CASE("scene caption prompt renders byte-stably") {
  ScenePack pack = pair_pack();
  PromptDoc doc = build_teacher_prompt(TeacherPromptKind::SceneCaption, pack, {});
  CHECK_FALSE(has_unfilled_placeholder(doc.text));
  CHECK(doc.media == std::vector<std::string>{"images/pair_0.jpg"});
  CHECK(doc.text.find("You are a 3D scene understanding expert") == 0);
  CHECK(doc.text.find("table (orange point-0)") != std::string::npos);
  check_golden("scene_caption_prompt.txt", doc.text);
}

TEST_CASE("bev cot prompt renders byte-stably with attachments") {
  ScenePack pack = pair_pack();
  PromptDoc doc = build_teacher_prompt(TeacherPromptKind::CotObjectRelation, pack,
                                       sample_qa(), std::string("bev/scene_pair.png"));
  CHECK_FALSE(has_unfilled_placeholder(doc.text));
  REQUIRE(doc.media.size() == 3);
  CHECK(doc.media[2] == "bev/scene_pair.png");
  CHECK(doc.text.find("You are an expert in 3D annotation") == 0);
  CHECK(doc.text.find("'in_frames': [True, True]") != std::string::npos);
  CHECK(doc.text.find("'in_frames': [True, False]") != std::string::npos);
  check_golden("bev_cot_prompt.txt", doc.text);
}

TEST_CASE("camera motion cot prompts render byte-stably") {
  ScenePack pack = pair_pack();
  TeacherQA qa;
  qa.question_type = "camera translation";
  qa.question = "Which way is the camera's perspective moving?";
  qa.answer = "B. moving rightward and forward";

  PromptDoc rot = build_teacher_prompt(TeacherPromptKind::CotCameraRotation, pack, qa);
  CHECK(rot.text.find("# Camera Motion Types (Rotations)") != std::string::npos);
  CHECK(rot.text.find("Pan right: The camera rotates to its right.") !=
        std::string::npos);
  check_golden("camera_rotation_cot_prompt.txt", rot.text);

  PromptDoc tr = build_teacher_prompt(TeacherPromptKind::CotCameraTranslation, pack, qa);
  CHECK(tr.text.find("# Parallax Effect:") != std::string::npos);
  check_golden("camera_translation_cot_prompt.txt", tr.text);
  CHECK(tr.media.size() == 2);
}

TEST_CASE("missing content raises MissingPlaceholder") {
  ScenePack pack = pair_pack();

  SUBCASE("no objects") {
    ScenePack empty = pack;
    empty.objects.clear();
    CHECK_THROWS_AS(build_teacher_prompt(TeacherPromptKind::SceneCaption, empty, {}),
                    MissingPlaceholder);
  }

  SUBCASE("no bev attachment") {
    CHECK_THROWS_AS(
        build_teacher_prompt(TeacherPromptKind::CotObjectRelation, pack, sample_qa()),
        MissingPlaceholder);
  }

  SUBCASE("empty question") {
    TeacherQA qa;
    CHECK_THROWS_AS(build_teacher_prompt(TeacherPromptKind::CotCameraRotation, pack, qa),
                    MissingPlaceholder);
  }
}

TEST_CASE("placeholder detector") {
  CHECK(has_unfilled_placeholder("text {object_info} more"));
  CHECK_FALSE(has_unfilled_placeholder("json { 'question': q }"));
  CHECK_FALSE(has_unfilled_placeholder("brace { \n }"));
  CHECK_FALSE(has_unfilled_placeholder("no braces at all"));
}

TEST_CASE("replay teacher client") {
  ScenePack pack = pair_pack();
  PromptDoc doc = build_teacher_prompt(TeacherPromptKind::SceneCaption, pack, {});

  ReplayTeacherClient client;
  client.add(doc.text, "<caption>A table sits near a sofa.</caption>");
  CHECK(client.complete(doc) == "<caption>A table sits near a sofa.</caption>");

  PromptDoc other;
  other.text = "unseen prompt";
  CHECK_THROWS_AS(client.complete(other), DataError);
}
