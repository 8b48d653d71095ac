#pragma once

#include "voxup/types.hpp"

namespace voxup {

/// Centers the axis-aligned bounding box at the origin and scales the longest
/// side to 1, so every coordinate lands in [-0.5, 0.5]. The inverse transform
/// is recorded in the result's normalization metadata.
/// Throws Error("degenerate cloud") when all points coincide.
PointCloud normalize(const PointCloud& cloud);

/// Applies the recorded normalization back, returning a cloud in source units.
PointCloud denormalize(const PointCloud& cloud);

/// Arithmetic mean of the points (double accumulation).
Vec3 centroid(const PointCloud& cloud);

/// True when every coordinate is within [-0.5 - eps, 0.5 + eps].
bool is_normalized(const PointCloud& cloud, double eps = 1e-9);

}  // namespace voxup
