#pragma once

#include "spatialforge/geometry.hpp"

namespace spatialforge {

/// Volume of the intersection of two oriented boxes, computed exactly by
/// clipping one box's polytope against the other's six face half-spaces.
double intersection_volume(const Box3D& a, const Box3D& b);

/// Exact 3D IoU for oriented (9-DoF) boxes: |A∩B| / |A∪B|, symmetric in its
/// arguments. Throws DegenerateBox when any size component is < 1e-9.
double iou3d(const Box3D& a, const Box3D& b);

}  // namespace spatialforge
