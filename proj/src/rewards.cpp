#include "spatialforge/rewards.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

namespace spatialforge {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

RewardBreakdown make_3d_reward(const std::vector<Box3D>& preds,
                               const std::vector<Box3D>& gts, double alpha,
                               double tau, bool use_f1) {
  MatchReport rep = match_boxes(preds, gts, tau);
  Prf prf = f1_at(rep, rep.n_preds, rep.n_gts, tau);
  RewardBreakdown out;
  out.alpha = alpha;
  out.r_iou = rep.mean_matched_iou;
  out.r_f1 = prf.f1;
  double second = use_f1 ? prf.f1 : prf.recall;
  out.accuracy = alpha * out.r_iou + (1.0 - alpha) * second;
  out.total = out.accuracy;  // format added by total_reward
  return out;
}

}  // namespace

RewardBreakdown detection_reward(const std::vector<Box3D>& preds,
                                 const std::vector<Box3D>& gts, double alpha,
                                 double tau) {
  return make_3d_reward(preds, gts, alpha, tau, /*use_f1=*/true);
}

RewardBreakdown detection_reward_recall_variant(const std::vector<Box3D>& preds,
                                                const std::vector<Box3D>& gts,
                                                double alpha, double tau) {
  return make_3d_reward(preds, gts, alpha, tau, /*use_f1=*/false);
}

RewardBreakdown total_reward(double accuracy, bool format_ok) {
  RewardBreakdown out;
  out.accuracy = accuracy;
  out.format = format_ok ? 1.0 : 0.0;
  out.total = out.accuracy + out.format;
  return out;
}

bool check_think_format(std::string_view response) {
  std::string_view s = trim(response);
  constexpr std::string_view kOpen = "<think>";
  constexpr std::string_view kClose = "</think>";
  if (s.substr(0, kOpen.size()) != kOpen) return false;
  size_t close = s.find(kClose);
  if (close == std::string_view::npos) return false;
  // exactly one block, then a nonempty answer
  if (s.find(kOpen, kOpen.size()) != std::string_view::npos) return false;
  if (s.find(kClose, close + kClose.size()) != std::string_view::npos) return false;
  std::string_view rest = trim(s.substr(close + kClose.size()));
  return !rest.empty();
}

std::string answer_region(std::string_view response) {
  constexpr std::string_view kClose = "</think>";
  size_t close = response.rfind(kClose);
  std::string_view region =
      close == std::string_view::npos ? response : response.substr(close + kClose.size());
  return std::string(trim(region));
}

std::optional<char> extract_option_letter(std::string_view text) {
  auto is_alnum = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
  };
  std::optional<char> found;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool upper = c >= 'A' && c <= 'H';
    bool lower = c >= 'a' && c <= 'h';
    if (!upper && !lower) continue;
    bool left_free = i == 0 || !is_alnum(text[i - 1]);
    bool right_free = i + 1 == text.size() || !is_alnum(text[i + 1]);
    if (!left_free || !right_free) continue;
    if (upper) {
      found = c;
    } else {
      // lowercase only in decorated form: (a) / a) / a.
      bool paren = i > 0 && text[i - 1] == '(' && i + 1 < text.size() &&
                   text[i + 1] == ')';
      bool mark = i + 1 < text.size() && (text[i + 1] == ')' || text[i + 1] == '.');
      if (paren || mark)
        found = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
  }
  return found;
}

int mcq_accuracy(std::string_view pred_text, char gold_option) {
  auto letter = extract_option_letter(answer_region(pred_text));
  if (!letter) return 0;
  char gold = static_cast<char>(std::toupper(static_cast<unsigned char>(gold_option)));
  return *letter == gold ? 1 : 0;
}

double exact_match(std::string_view pred, std::string_view gold) {
  return trim(pred) == trim(gold) ? 1.0 : 0.0;
}

namespace {

// Span of the first complete bracketed JSON array in `s`, respecting string
// literals and escapes. Returns empty view if unbalanced.
std::string_view first_json_array(std::string_view s) {
  size_t start = s.find('[');
  if (start == std::string_view::npos) return {};
  int depth = 0;
  bool in_str = false;
  for (size_t i = start; i < s.size(); ++i) {
    char c = s[i];
    if (in_str) {
      if (c == '\\')
        ++i;
      else if (c == '"')
        in_str = false;
      continue;
    }
    if (c == '"') in_str = true;
    if (c == '[') ++depth;
    if (c == ']' && --depth == 0) return s.substr(start, i - start + 1);
  }
  return {};
}

}  // namespace

std::optional<std::vector<Box3D>> parse_boxes_response(std::string_view text) {
  std::string region = answer_region(text);
  std::string_view span = first_json_array(region);
  if (span.empty()) return std::nullopt;
  nlohmann::json arr = nlohmann::json::parse(span.begin(), span.end(), nullptr,
                                             /*allow_exceptions=*/false);
  if (arr.is_discarded() || !arr.is_array()) return std::nullopt;

  std::vector<Box3D> out;
  for (const auto& e : arr) {
    if (!e.is_object() || !e.contains("bbox_3d") || !e["bbox_3d"].is_array())
      return std::nullopt;
    const auto& v = e["bbox_3d"];
    if (v.size() != 9) return std::nullopt;
    for (const auto& x : v)
      if (!x.is_number()) return std::nullopt;
    Box3D b;
    b.center = Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
    b.size = Vec3(v[3].get<double>(), v[4].get<double>(), v[5].get<double>());
    b.angles = {v[6].get<double>(), v[7].get<double>(), v[8].get<double>()};
    b.label = e.value("label", "");
    if (!(b.size.x() > 0 && b.size.y() > 0 && b.size.z() > 0)) return std::nullopt;
    out.push_back(std::move(b));
  }
  return out;
}

std::string boxes_to_answer_json(const std::vector<Box3D>& boxes) {
  std::string out = "[";
  for (size_t i = 0; i < boxes.size(); ++i) {
    const Box3D& b = boxes[i];
    out += i == 0 ? "\n\t" : ",\n\t";
    out += "{\"bbox_3d\":[";
    const double vals[9] = {b.center.x(), b.center.y(), b.center.z(),
                            b.size.x(),   b.size.y(),   b.size.z(),
                            b.angles.pitch, b.angles.yaw, b.angles.roll};
    for (int k = 0; k < 9; ++k) {
      if (k) out += ",";
      out += format2(vals[k]);
    }
    out += "],\"label\":";
    out += nlohmann::json(b.label).dump();
    out += "}";
  }
  out += boxes.empty() ? "]" : "\n]";
  return out;
}

}  // namespace spatialforge
