#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spatialforge/geometry.hpp"
#include "spatialforge/metrics.hpp"

namespace spatialforge {

/// Reward for one rollout: total = accuracy + format. For 3D detection the
/// accuracy is alpha * mean matched IoU + (1 - alpha) * F1 at the 0.25
/// true-positive threshold.
struct RewardBreakdown {
  double accuracy = 0.0;
  double format = 0.0;
  double total = 0.0;
  double alpha = 0.5;
  double r_iou = 0.0;
  double r_f1 = 0.0;
};

RewardBreakdown detection_reward(const std::vector<Box3D>& preds,
                                 const std::vector<Box3D>& gts,
                                 double alpha = 0.5, double tau = 0.25);

/// The rejected recall-based variant (accuracy = alpha * iou + (1-alpha) *
/// recall). Kept so its false-positive pathology stays testable.
RewardBreakdown detection_reward_recall_variant(const std::vector<Box3D>& preds,
                                                const std::vector<Box3D>& gts,
                                                double alpha = 0.5,
                                                double tau = 0.25);

RewardBreakdown total_reward(double accuracy, bool format_ok);

/// True iff the response has the required reasoning shape: it starts with a
/// single <think>...</think> block followed by a nonempty answer.
bool check_think_format(std::string_view response);

/// The answer region: text after </think> when a think block is present,
/// otherwise the whole response. Trimmed.
std::string answer_region(std::string_view response);

/// Multiple-choice scoring: 1 iff the last standalone option letter in the
/// answer region equals `gold_option` (case-insensitive). Accepted forms:
/// a bare uppercase letter bounded by non-alphanumerics ("A", "A.", "(A)"),
/// or a lowercase letter in decorated form ("(a)", "a)", "a.").
int mcq_accuracy(std::string_view pred_text, char gold_option);

std::optional<char> extract_option_letter(std::string_view answer_text);

/// Pluggable scorer for open-ended / OCR answers; the default is
/// whitespace-trimmed exact match.
using TextScorer = std::function<double(std::string_view pred, std::string_view gold)>;
double exact_match(std::string_view pred, std::string_view gold);

/// Extracts 3D boxes from a model response: finds the JSON array whose
/// entries carry "bbox_3d" (9 numbers) and "label". Returns nullopt when no
/// parseable array exists; an empty array parses to an empty vector.
std::optional<std::vector<Box3D>> parse_boxes_response(std::string_view text);

/// Serializes boxes exactly in the on-wire layout used by detection answers:
/// a JSON list of {"bbox_3d":[9 two-decimal numbers],"label":...}, one entry
/// per line, tab-indented.
std::string boxes_to_answer_json(const std::vector<Box3D>& boxes);

}  // namespace spatialforge
