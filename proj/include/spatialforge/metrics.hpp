#pragma once

#include <map>
#include <string>
#include <vector>

#include "spatialforge/geometry.hpp"

namespace spatialforge {

struct MatchedPair {
  int pred = -1;
  int gt = -1;
  double iou = 0.0;
};

/// Prediction<->ground-truth assignment. Each pred/gt index appears exactly
/// once, either in `pairs` or the corresponding unmatched list.
struct MatchReport {
  std::vector<MatchedPair> pairs;
  std::vector<int> unmatched_preds;
  std::vector<int> unmatched_gts;
  double mean_matched_iou = 0.0;  // 0 when no pairs
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  double threshold = 0.25;
  int n_preds = 0, n_gts = 0;
};

struct Prf {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

/// Optimal one-to-one assignment maximizing total IoU (Hungarian on -IoU).
/// Pairs with zero IoU are discarded. PRF fields are filled at `tau`.
MatchReport match_boxes(const std::vector<Box3D>& preds,
                        const std::vector<Box3D>& gts, double tau = 0.25);

/// TP = matched pairs with iou > tau; precision = TP/N, recall = TP/M with
/// 0/0 -> 0, except N = M = 0 which is vacuously perfect (1, 1, 1).
Prf f1_at(const MatchReport& report, int n_preds, int n_gts, double tau = 0.25);

// ---------------------------------------------------------------------------
// Dataset-level detection metrics. Model outputs carry no confidence scores;
// rank = generation order of the boxes in the response, lower rank first
// (recorded as "generation_order" in every report).

/// Per-label average precision at IoU threshold `tau` over a set of images,
/// macro-averaged across the labels present in the ground truth. Uses a
/// ranked PR sweep with greedy-by-rank GT consumption and 101-point
/// interpolation. Returns a value in [0, 1].
double ap_at(const std::vector<std::vector<Box3D>>& pred_sets,
             const std::vector<std::vector<Box3D>>& gt_sets, double tau);

/// Recall of GTs matched by the top-k ranked predictions per image, averaged
/// over `taus`.
double ar_at_k(const std::vector<std::vector<Box3D>>& pred_sets,
               const std::vector<std::vector<Box3D>>& gt_sets, int k,
               const std::vector<double>& taus);

struct EvalReport {
  double ap = 0.0;                  // mean of ap_by_tau values
  std::map<double, double> ap_by_tau;
  double ar = 0.0;
  int ar_top_k = 100;
  std::map<std::string, double> per_label_ap;  // averaged over the thresholds
  std::vector<double> taus;
};

EvalReport evaluate_detections(const std::vector<std::vector<Box3D>>& pred_sets,
                               const std::vector<std::vector<Box3D>>& gt_sets,
                               const std::vector<double>& taus = {0.15, 0.25, 0.50},
                               int ar_top_k = 100);

}  // namespace spatialforge
