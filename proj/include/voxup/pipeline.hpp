#pragma once

#include <optional>
#include <string>

#include "voxup/reconstruct.hpp"
#include "voxup/sampler.hpp"

namespace voxup {

enum class DensityBackend { Analytic, File };

struct PipelineConfig {
  int patch_size = 256;
  int resolution = 32;
  double rate = 4.0;
  SamplerConfig sampler;        // rate/seed fields are overridden per run
  RefineConfig refinement;
  int smoothing_radius = -1;    // -1: radius 1 for patches under 512 points
  DensityBackend backend = DensityBackend::Analytic;
  std::string density_path;     // used when backend == File
  std::uint64_t seed = 0;
};

/// FPS seed selection plus k-NN grouping; ceil(2N / patch_size) seeds give
/// roughly 2x coverage. Identical patches are deduplicated. Returns per-patch
/// point index sets; a cloud smaller than patch_size yields one whole-cloud
/// patch (with a warning on stderr).
std::vector<std::vector<int>> extract_patches(const PointCloud& cloud, int patch_size);

/// Concatenates upsampled patches (source units), drops exact duplicate
/// coordinates, then FPS-downsamples to exactly `target` points.
PointCloud merge_and_downsample(const std::vector<PointCloud>& patches, long target);

/// Full patch-based upsampling: per patch normalize -> density -> sample ->
/// place -> refine -> denormalize, then merge. Deterministic given the seed,
/// independent of thread count.
PointCloud upsample_cloud(const PointCloud& cloud, const PipelineConfig& config);

struct DiagnosticsRow {
  SampleMethod method;
  double multiplier = 1.0;
  double precision = 0.0;     // ground-truth points in sampled cells (+26-neighborhood)
  double missing_rate = 0.0;  // ground-truth cells with no sampled cell nearby
  double cell_cd = 0.0;       // chamfer(sampled cell centers, ground-truth points)
};

/// Sampling-accuracy statistics of a predicted density field against a
/// normalized ground-truth cloud, per method and resampling multiplier.
std::vector<DiagnosticsRow> sampling_diagnostics(const DensityField& field,
                                                 const PointCloud& ground_truth,
                                                 std::span<const double> multipliers,
                                                 std::span<const SampleMethod> methods,
                                                 const SamplerConfig& base, long target);

const char* method_name(SampleMethod method);
SampleMethod parse_method(const std::string& name);

}  // namespace voxup
