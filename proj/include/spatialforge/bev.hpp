#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "spatialforge/scene.hpp"

namespace spatialforge {

struct Footprint {
  int object_index = -1;
  std::array<Vec2, 4> corners_px;  // pixel-space quad, drawn filled
  std::array<uint8_t, 3> color{0, 0, 0};
};

/// Top-down orthographic raster: +X right, +Z up on the image, white
/// background. Each object contributes the yaw-projected rectangle of its
/// box, filled in a palette color with its index drawn at the center; the
/// frame-1 camera origin is marked with a cross.
struct BevRaster {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;
  double meters_per_pixel = 0.01;
  std::vector<Footprint> footprints;
  Vec2 origin_px;  // pixel of world (0, 0)

  const uint8_t* pixel(int x, int y) const {
    return &rgb[(static_cast<size_t>(y) * width + x) * 3];
  }
};

extern const std::array<std::array<uint8_t, 3>, 12> kBevPalette;

BevRaster render_bev(const std::vector<SceneObject>& objects,
                     double meters_per_pixel = 0.01,
                     const std::vector<std::array<uint8_t, 3>>& palette = {});

}  // namespace spatialforge
