#include "spatialforge/metrics.hpp"

#include <algorithm>
#include <set>

#include "spatialforge/assignment.hpp"
#include "spatialforge/iou3d.hpp"

namespace spatialforge {

MatchReport match_boxes(const std::vector<Box3D>& preds,
                        const std::vector<Box3D>& gts, double tau) {
  const int n = static_cast<int>(preds.size());
  const int m = static_cast<int>(gts.size());
  MatchReport rep;
  rep.n_preds = n;
  rep.n_gts = m;
  rep.threshold = tau;

  if (n > 0 && m > 0) {
    std::vector<std::vector<double>> iou(n, std::vector<double>(m, 0.0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) iou[i][j] = iou3d(preds[i], gts[j]);

    // Hungarian needs rows <= cols; cost = -IoU so the minimum-cost full
    // assignment of the smaller side maximizes total IoU.
    std::vector<int> pred_to_gt(n, -1);
    if (n <= m) {
      std::vector<std::vector<double>> cost(n, std::vector<double>(m));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) cost[i][j] = -iou[i][j];
      pred_to_gt = solve_assignment(cost);
    } else {
      std::vector<std::vector<double>> cost(m, std::vector<double>(n));
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) cost[j][i] = -iou[i][j];
      std::vector<int> gt_to_pred = solve_assignment(cost);
      for (int j = 0; j < m; ++j)
        if (gt_to_pred[j] >= 0) pred_to_gt[gt_to_pred[j]] = j;
    }

    for (int i = 0; i < n; ++i) {
      int j = pred_to_gt[i];
      if (j >= 0 && iou[i][j] > 0.0)
        rep.pairs.push_back({i, j, iou[i][j]});
    }
  }

  std::set<int> used_preds, used_gts;
  double sum = 0.0;
  for (const auto& p : rep.pairs) {
    used_preds.insert(p.pred);
    used_gts.insert(p.gt);
    sum += p.iou;
  }
  for (int i = 0; i < n; ++i)
    if (!used_preds.count(i)) rep.unmatched_preds.push_back(i);
  for (int j = 0; j < m; ++j)
    if (!used_gts.count(j)) rep.unmatched_gts.push_back(j);
  rep.mean_matched_iou = rep.pairs.empty() ? 0.0 : sum / rep.pairs.size();

  Prf prf = f1_at(rep, n, m, tau);
  rep.precision = prf.precision;
  rep.recall = prf.recall;
  rep.f1 = prf.f1;
  return rep;
}

Prf f1_at(const MatchReport& report, int n_preds, int n_gts, double tau) {
  if (n_preds == 0 && n_gts == 0) return {1.0, 1.0, 1.0};
  int tp = 0;
  for (const auto& p : report.pairs)
    if (p.iou > tau) ++tp;
  Prf out;
  out.precision = n_preds > 0 ? static_cast<double>(tp) / n_preds : 0.0;
  out.recall = n_gts > 0 ? static_cast<double>(tp) / n_gts : 0.0;
  out.f1 = (out.precision + out.recall) > 0.0
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  return out;
}

namespace {

struct RankedPred {
  int image = 0;
  int rank = 0;
  const Box3D* box = nullptr;
};

std::vector<std::string> gt_labels(const std::vector<std::vector<Box3D>>& gt_sets) {
  std::set<std::string> labels;
  for (const auto& img : gt_sets)
    for (const auto& b : img) labels.insert(b.label);
  return {labels.begin(), labels.end()};
}

// Ranked sweep for one label. Returns (recall, precision) after each
// prediction, plus the GT count.
struct SweepResult {
  std::vector<std::pair<double, double>> points;  // (recall, precision)
  int n_gt = 0;
};

SweepResult sweep_label(const std::vector<std::vector<Box3D>>& pred_sets,
                        const std::vector<std::vector<Box3D>>& gt_sets,
                        const std::string& label, double tau) {
  SweepResult res;
  std::vector<std::vector<int>> gt_idx(gt_sets.size());
  for (size_t img = 0; img < gt_sets.size(); ++img)
    for (size_t j = 0; j < gt_sets[img].size(); ++j)
      if (gt_sets[img][j].label == label) gt_idx[img].push_back(static_cast<int>(j));
  for (const auto& v : gt_idx) res.n_gt += static_cast<int>(v.size());
  if (res.n_gt == 0) return res;

  std::vector<RankedPred> preds;
  for (size_t img = 0; img < pred_sets.size(); ++img)
    for (size_t i = 0; i < pred_sets[img].size(); ++i)
      if (pred_sets[img][i].label == label)
        preds.push_back({static_cast<int>(img), static_cast<int>(i),
                         &pred_sets[img][i]});
  std::stable_sort(preds.begin(), preds.end(),
                   [](const RankedPred& a, const RankedPred& b) {
                     if (a.rank != b.rank) return a.rank < b.rank;
                     return a.image < b.image;
                   });

  std::vector<std::set<int>> consumed(gt_sets.size());
  int tp = 0, fp = 0;
  for (const auto& p : preds) {
    int best_j = -1;
    double best_iou = tau;
    for (int j : gt_idx[p.image]) {
      if (consumed[p.image].count(j)) continue;
      double v = iou3d(*p.box, gt_sets[p.image][j]);
      if (v > best_iou) {
        best_iou = v;
        best_j = j;
      }
    }
    if (best_j >= 0) {
      consumed[p.image].insert(best_j);
      ++tp;
    } else {
      ++fp;
    }
    res.points.emplace_back(static_cast<double>(tp) / res.n_gt,
                            static_cast<double>(tp) / (tp + fp));
  }
  return res;
}

double interpolate_ap(const std::vector<std::pair<double, double>>& points) {
  double ap = 0.0;
  for (int i = 0; i <= 100; ++i) {
    double r = i / 100.0;
    double best = 0.0;
    for (const auto& [rec, prec] : points)
      if (rec >= r - 1e-12) best = std::max(best, prec);
    ap += best;
  }
  return ap / 101.0;
}

}  // namespace

double ap_at(const std::vector<std::vector<Box3D>>& pred_sets,
             const std::vector<std::vector<Box3D>>& gt_sets, double tau) {
  auto labels = gt_labels(gt_sets);
  if (labels.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& label : labels)
    sum += interpolate_ap(sweep_label(pred_sets, gt_sets, label, tau).points);
  return sum / labels.size();
}

double ar_at_k(const std::vector<std::vector<Box3D>>& pred_sets,
               const std::vector<std::vector<Box3D>>& gt_sets, int k,
               const std::vector<double>& taus) {
  int total_gt = 0;
  for (const auto& img : gt_sets) total_gt += static_cast<int>(img.size());
  if (total_gt == 0 || taus.empty()) return 0.0;

  double sum = 0.0;
  for (double tau : taus) {
    int matched = 0;
    for (size_t img = 0; img < gt_sets.size(); ++img) {
      const auto& gts = gt_sets[img];
      std::set<int> consumed;
      int limit = std::min<int>(k, img < pred_sets.size()
                                       ? static_cast<int>(pred_sets[img].size())
                                       : 0);
      for (int i = 0; i < limit; ++i) {
        const Box3D& p = pred_sets[img][i];
        int best_j = -1;
        double best_iou = tau;
        for (size_t j = 0; j < gts.size(); ++j) {
          if (consumed.count(static_cast<int>(j))) continue;
          if (gts[j].label != p.label) continue;
          double v = iou3d(p, gts[j]);
          if (v > best_iou) {
            best_iou = v;
            best_j = static_cast<int>(j);
          }
        }
        if (best_j >= 0) {
          consumed.insert(best_j);
          ++matched;
        }
      }
    }
    sum += static_cast<double>(matched) / total_gt;
  }
  return sum / taus.size();
}

EvalReport evaluate_detections(const std::vector<std::vector<Box3D>>& pred_sets,
                               const std::vector<std::vector<Box3D>>& gt_sets,
                               const std::vector<double>& taus, int ar_top_k) {
  EvalReport rep;
  rep.taus = taus;
  rep.ar_top_k = ar_top_k;
  for (double tau : taus) rep.ap_by_tau[tau] = ap_at(pred_sets, gt_sets, tau);
  if (!taus.empty()) {
    double s = 0.0;
    for (auto& [t, v] : rep.ap_by_tau) s += v;
    rep.ap = s / taus.size();
  }
  rep.ar = ar_at_k(pred_sets, gt_sets, ar_top_k, taus);

  // Per-label AP averaged over the thresholds.
  for (const auto& label : gt_labels(gt_sets)) {
    double s = 0.0;
    for (double tau : taus)
      s += interpolate_ap(sweep_label(pred_sets, gt_sets, label, tau).points);
    rep.per_label_ap[label] = taus.empty() ? 0.0 : s / taus.size();
  }
  return rep;
}

}  // namespace spatialforge
