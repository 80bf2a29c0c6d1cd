#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spatialforge/visibility.hpp"

namespace spatialforge {

/// 16-bit single-channel PNG in millimeters (ScanNet-family convention),
/// meters = raw / divisor. Zero raw values stay 0 (invalid).
DepthMap read_depth_png(const std::string& path, double divisor = 1000.0);
void write_depth_png(const DepthMap& depth, const std::string& path,
                     double divisor = 1000.0);

/// 8-bit RGB, row-major, 3 bytes per pixel.
void write_rgb_png(int width, int height, const std::vector<uint8_t>& rgb,
                   const std::string& path);

/// Nearest-neighbor resample (used after FoV unification so depth dimensions
/// keep matching the camera).
DepthMap resample_depth_nearest(const DepthMap& src, int new_width, int new_height);

}  // namespace spatialforge
