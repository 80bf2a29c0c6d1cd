#pragma once

// Test-only oracles, kept independent of the implementation paths they check.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "spatialforge/geometry.hpp"
#include "spatialforge/rng.hpp"

namespace oracles {

using spatialforge::Box3D;
using spatialforge::EulerAngles;
using spatialforge::Mat3;
using spatialforge::Rng;
using spatialforge::Vec3;

// Monte-Carlo intersection volume: sample uniformly inside box a, count the
// fraction landing inside box b. Point-in-box goes through its own rotation
// composition, not spatialforge::euler_to_matrix's output consumers.
inline double mc_intersection_volume(const Box3D& a, const Box3D& b, int samples,
                                     uint64_t seed) {
  Mat3 ra = spatialforge::euler_to_matrix(a.angles);
  Mat3 rb_t = spatialforge::euler_to_matrix(b.angles).transpose();
  Rng rng(seed);
  int inside = 0;
  for (int s = 0; s < samples; ++s) {
    Vec3 local(a.size.x() * (rng.uniform() - 0.5), a.size.y() * (rng.uniform() - 0.5),
               a.size.z() * (rng.uniform() - 0.5));
    Vec3 p = a.center + ra * local;
    Vec3 q = rb_t * (p - b.center);
    if (std::abs(q.x()) <= 0.5 * b.size.x() && std::abs(q.y()) <= 0.5 * b.size.y() &&
        std::abs(q.z()) <= 0.5 * b.size.z())
      ++inside;
  }
  return a.volume() * inside / samples;
}

inline double mc_iou(const Box3D& a, const Box3D& b, int samples, uint64_t seed) {
  double inter = mc_intersection_volume(a, b, samples, seed);
  double uni = a.volume() + b.volume() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

// Exhaustive one-to-one assignment maximum of an IoU matrix (n, m small).
inline double brute_force_best_total(const std::vector<std::vector<double>>& iou) {
  size_t n = iou.size();
  if (n == 0) return 0.0;
  size_t m = iou[0].size();
  if (m == 0) return 0.0;
  // permute the larger side's indices over slots of the smaller side
  bool rows_small = n <= m;
  size_t small = rows_small ? n : m;
  size_t large = rows_small ? m : n;
  std::vector<int> perm(large);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double total = 0.0;
    for (size_t i = 0; i < small; ++i)
      total += rows_small ? iou[i][perm[i]] : iou[perm[i]][i];
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline EulerAngles random_angles(Rng& rng) {
  return {rng.uniform(-0.95, 0.95), rng.uniform(-0.45, 0.45), rng.uniform(-0.95, 0.95)};
}

inline Box3D random_box(Rng& rng, double center_span = 1.2) {
  Box3D b;
  b.center = Vec3(rng.uniform(-center_span, center_span),
                  rng.uniform(-center_span, center_span),
                  rng.uniform(-center_span, center_span) + 3.0);
  b.size = Vec3(rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0));
  b.angles = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  b.label = "obj";
  return b;
}

inline Mat3 random_rotation(Rng& rng) {
  // quaternion from 4 gaussians via Box-Muller, normalized
  auto gauss = [&rng]() {
    double u1 = std::max(rng.uniform(), 1e-12), u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  };
  double w = gauss(), x = gauss(), y = gauss(), z = gauss();
  double n = std::sqrt(w * w + x * x + y * y + z * z);
  spatialforge::Quaternion q{w / n, x / n, y / n, z / n};
  return spatialforge::quaternion_to_matrix(q);
}

}  // namespace oracles
