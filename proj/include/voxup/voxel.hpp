#pragma once

#include <array>
#include <vector>

#include "voxup/types.hpp"

namespace voxup {

/// Cubic grid over the normalized unit cube [-0.5, 0.5]^3. Cells are indexed
/// row-major as ((i * R) + j) * R + k with 0 <= i,j,k < R.
struct VoxelGrid {
  int resolution = 32;

  explicit VoxelGrid(int r);

  int cell_count() const { return resolution * resolution * resolution; }
  int cell_index(int i, int j, int k) const {
    return (i * resolution + j) * resolution + k;
  }
  std::array<int, 3> cell_coords(int index) const {
    const int r = resolution;
    return {index / (r * r), (index / r) % r, index % r};
  }
  Vec3 cell_center(int index) const {
    const auto c = cell_coords(index);
    const double r = resolution;
    return Vec3(float((c[0] + 0.5) / r - 0.5), float((c[1] + 0.5) / r - 0.5),
                float((c[2] + 0.5) / r - 0.5));
  }
  double cell_side() const { return 1.0 / resolution; }
  double cell_diagonal() const { return 1.7320508075688772935 / resolution; }

  /// Containing cell of a normalized point. Coordinates exactly at +0.5 map
  /// to the last cell along that axis. Throws for |coordinate| > 0.5 + 1e-9.
  int locate(const Vec3& p) const;
};

enum class Provenance { Analytic, GroundTruth, ExternalFile };

/// Per-cell density (fraction of total mass, sums to 1 over occupied cells)
/// plus pre-sigmoid occupancy scores.
struct DensityField {
  VoxelGrid grid{32};
  std::vector<float> density;          // size R^3
  std::vector<float> occupancy_logit;  // size R^3
  Provenance provenance = Provenance::Analytic;
};

/// Hard ground-truth logit magnitude (labels are +/- this value).
inline constexpr float kHardLogit = 10.0f;

/// Per-point displacements to the 8 vertices of the containing cell.
struct GriddingOutput {
  std::vector<std::array<Vec3, 8>> displacements;  // point minus vertex
  std::vector<int> cell;                           // containing cell index
};

/// Displacement encoding for one grid resolution. Vertex order within a cell:
/// (di, dj, dk) in {0,1}^3 enumerated as di*4 + dj*2 + dk.
GriddingOutput grid_displacements(const PointCloud& cloud, const VoxelGrid& grid);

/// Exact per-cell point counts as fractions; occupancy logits hard +/-10.
DensityField density_ground_truth(const PointCloud& cloud, const VoxelGrid& grid);

/// Analytic density backend: trilinear splatting onto cell centers, optional
/// box smoothing over a (2s+1)^3 neighborhood, normalized to sum 1.
DensityField splat_density(const PointCloud& cloud, const VoxelGrid& grid,
                           int smoothing_radius = 0);

}  // namespace voxup
