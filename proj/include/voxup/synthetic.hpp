#pragma once

#include <cstdint>

#include "voxup/metrics.hpp"

namespace voxup {

enum class Shape { Sphere, Torus, PlaneWithCrease };

struct SyntheticCloud {
  PointCloud cloud;
  TriangleMesh mesh;
};

struct SyntheticOptions {
  double noise_sigma = 0.0;  // Gaussian noise in source units
  int sphere_subdivisions = 3;
  double torus_major = 1.0;
  double torus_minor = 0.35;
  int torus_segments = 48;  // per ring
  double crease_angle_deg = 90.0;
};

/// Area-uniform samples on an analytic shape's triangle mesh plus the mesh
/// itself. Deterministic in (shape, n, seed).
SyntheticCloud generate_synthetic(Shape shape, int n, std::uint64_t seed,
                                  const SyntheticOptions& options = {});

Shape parse_shape(const std::string& name);

}  // namespace voxup
