#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "voxup/voxel.hpp"

namespace voxup {

/// Multiset of grid cells with multiplicities. Entries are sorted by cell
/// index and cell indices are distinct.
struct CellSampleSet {
  std::vector<std::pair<int, long>> entries;  // (cell index, multiplicity >= 1)

  long total() const {
    long t = 0;
    for (const auto& e : entries) t += e.second;
    return t;
  }
};

enum class SampleMethod { ThresholdTopK, Multinomial, MultinomialFps, MultinomialDfps };

struct SamplerConfig {
  double rate = 4.0;        // upsample rate r
  double multiplier = 4.0;  // candidate count = ceil(multiplier * r * N)
  std::uint64_t seed = 0;
  SampleMethod method = SampleMethod::MultinomialDfps;
};

/// Per-point cell ids in output order: entries expanded by multiplicity.
std::vector<int> expanded_cells(const CellSampleSet& samples);

/// density * sigmoid(occupancy_logit), element-wise.
std::vector<double> effective_density(const DensityField& field);

/// `trials` independent categorical draws from weights / sum(weights),
/// aggregated into multiplicities. Deterministic given the seed, regardless
/// of how trials would be partitioned.
CellSampleSet multinomial_sample(std::span<const double> weights, long trials,
                                 std::uint64_t seed);

/// Weighted farthest point sampling over arbitrary positions: the cell-to-set
/// distance of candidate i is scaled by weights[i]. Start = largest weight
/// (ties -> lowest index); distance ties -> lowest index. Returns positions'
/// indices in selection order. Uniform weights reproduce vanilla FPS.
std::vector<int> weighted_fps(std::span<const Vec3> positions,
                              std::span<const double> weights, int m);

/// D-FPS over the distinct candidate cells' centers with per-cell weights.
std::vector<int> dfps_cells(const CellSampleSet& candidates,
                            std::span<const double> weights, const VoxelGrid& grid, int m);

/// Vanilla FPS over the distinct candidate cells' centers.
std::vector<int> fps_cells(const CellSampleSet& candidates, const VoxelGrid& grid, int m);

/// Deterministic baseline: cells with sigmoid(logit) > 0.5 ranked by density
/// (ties -> lowest index), top cells allocated proportionally to density.
CellSampleSet threshold_topk_sample(const DensityField& field, long count);

/// Largest-remainder allocation of `total` points over `cells` proportional
/// to `weights` (one weight per cell), every cell getting at least 1.
CellSampleSet allocate_points(std::span<const int> cells, std::span<const double> weights,
                              long total);

/// Full two-stage sampler: multinomial candidates over the effective density,
/// optional (D-)FPS reduction, then allocation to exactly round(r * N).
CellSampleSet sample_cells(const DensityField& field, const SamplerConfig& config,
                           long input_points);

}  // namespace voxup
