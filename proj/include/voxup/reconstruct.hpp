#pragma once

#include "voxup/sampler.hpp"

namespace voxup {

/// Analytic refinement settings: projection onto the weighted least-squares
/// plane of the nearest input points, displacement clamped to the cell
/// diagonal.
struct RefineConfig {
  int neighbors = 8;  // k_r, must be >= 3
  bool enabled = true;
};

/// Low-discrepancy 2D parameter for the `rank`-th point of a cell: Halton
/// bases 2/3 with a per-cell Cranley-Patterson rotation, so parameters are
/// unique within a cell and reproducible.
std::array<double, 2> cell_parameter(int cell_index, long rank);

/// Coarse intra-cell placement: per sampled cell, fit a least-squares plane
/// to the `plane_neighbors` input points nearest the cell center, spread the
/// cell's points over that plane via their 2D parameters, clamp to the cell
/// cube expanded by d/2 and to distance d from the cell center. Output is
/// ordered by (cell index, within-cell rank); count equals samples.total().
PointCloud place_coarse(const CellSampleSet& samples, const VoxelGrid& grid,
                        const PointCloud& input, int plane_neighbors = 8);

/// Moves each point to its projection onto the Gaussian-weighted
/// least-squares plane of its k_r nearest input points (bandwidth = mean
/// neighbor distance); displacement clamped to the cell diagonal. Degenerate
/// fits leave the point unchanged.
PointCloud refine(const PointCloud& coarse, const PointCloud& input,
                  const VoxelGrid& grid, const RefineConfig& config);

/// Reads externally produced points (e.g. a trained model's output) from an
/// XYZ or PLY file, in source units.
PointCloud load_external_points(const std::string& path);

}  // namespace voxup
