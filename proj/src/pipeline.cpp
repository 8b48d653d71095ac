#include "voxup/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iostream>
#include <set>
#include <unordered_set>

#include "voxup/io.hpp"
#include "voxup/kdtree.hpp"
#include "voxup/metrics.hpp"
#include "voxup/parallel.hpp"
#include "voxup/pointcloud.hpp"
#include "voxup/rng.hpp"
#include "voxup/voxel.hpp"

namespace voxup {

std::vector<std::vector<int>> extract_patches(const PointCloud& cloud, int patch_size) {
  if (patch_size < 1) throw Error("extract_patches: patch size must be positive");
  const int n = int(cloud.size());
  if (n < patch_size) {
    std::cerr << "warning: cloud smaller than patch size, using a single patch\n";
    std::vector<int> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    return {all};
  }

  const int seed_count = int((2L * n + patch_size - 1) / patch_size);
  const auto seeds = farthest_point_sample(cloud, std::min(seed_count, n));
  const NeighborIndex index(cloud);

  std::vector<std::vector<int>> patches;
  std::set<std::vector<int>> seen;
  for (int s : seeds) {
    const auto hits = index.knn(cloud.points[static_cast<std::size_t>(s)], patch_size);
    std::vector<int> patch;
    patch.reserve(hits.size());
    for (const auto& h : hits) patch.push_back(h.index);
    std::vector<int> key = patch;
    std::sort(key.begin(), key.end());
    if (seen.insert(std::move(key)).second) patches.push_back(std::move(patch));
  }
  return patches;
}

PointCloud merge_and_downsample(const std::vector<PointCloud>& patches, long target) {
  PointCloud merged;
  for (const PointCloud& p : patches) {
    merged.points.insert(merged.points.end(), p.points.begin(), p.points.end());
  }
  if (long(merged.size()) < target) throw Error("merge_and_downsample: not enough points");

  // Drop exact duplicate coordinates, keeping first occurrences.
  struct Key {
    std::uint32_t b[3];
    bool operator==(const Key& o) const { return std::memcmp(b, o.b, sizeof(b)) == 0; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = 1469598103934665603ull;
      for (std::uint32_t v : k.b) h = (h ^ v) * 1099511628211ull;
      return h;
    }
  };
  std::unordered_set<Key, KeyHash> seen;
  PointCloud unique;
  unique.points.reserve(merged.size());
  for (const Vec3& p : merged.points) {
    Key k;
    std::memcpy(k.b, &p.x, 4);
    std::memcpy(k.b + 1, &p.y, 4);
    std::memcpy(k.b + 2, &p.z, 4);
    if (seen.insert(k).second) unique.points.push_back(p);
  }
  if (long(unique.size()) < target) throw Error("merge_and_downsample: not enough distinct points");
  if (long(unique.size()) == target) return unique;

  const auto picked = farthest_point_sample(unique, int(target));
  PointCloud out;
  out.points.reserve(static_cast<std::size_t>(target));
  for (int i : picked) out.points.push_back(unique.points[static_cast<std::size_t>(i)]);
  return out;
}

namespace {

PointCloud upsample_patch(const PointCloud& patch, const PipelineConfig& config,
                          std::uint64_t patch_seed) {
  const PointCloud normalized = normalize(patch);
  const VoxelGrid grid(config.resolution);

  DensityField field;
  if (config.backend == DensityBackend::File) {
    field = read_density_grid(config.density_path);
    if (field.grid.resolution != config.resolution) {
      throw Error("density grid resolution does not match configuration");
    }
  } else {
    int radius = config.smoothing_radius;
    if (radius < 0) radius = int(patch.size()) < 512 ? 1 : 0;
    field = splat_density(normalized, grid, radius);
  }

  SamplerConfig sampler = config.sampler;
  sampler.rate = config.rate;
  sampler.seed = patch_seed;
  const CellSampleSet cells = sample_cells(field, sampler, long(patch.size()));

  PointCloud coarse = place_coarse(cells, grid, normalized, config.refinement.neighbors);
  PointCloud refined = refine(coarse, normalized, grid, config.refinement);
  refined.normalization = normalized.normalization;
  return denormalize(refined);
}

}  // namespace

PointCloud upsample_cloud(const PointCloud& cloud, const PipelineConfig& config) {
  if (cloud.empty()) throw Error("upsample_cloud: empty cloud");
  if (config.rate <= 0.0) throw Error("upsample_cloud: rate must be positive");

  const long target = std::llround(config.rate * double(cloud.size()));
  if (target < 1) throw Error("upsample_cloud: target count is zero");

  std::vector<std::vector<int>> patch_indices;
  if (config.backend == DensityBackend::File) {
    // An external density grid describes the whole cloud; no patching.
    std::vector<int> all(cloud.size());
    for (int i = 0; i < int(cloud.size()); ++i) all[static_cast<std::size_t>(i)] = i;
    patch_indices.push_back(std::move(all));
  } else {
    patch_indices = extract_patches(cloud, config.patch_size);
  }

  std::vector<PointCloud> upsampled(patch_indices.size());
  parallel_for(patch_indices.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t pi = begin; pi < end; ++pi) {
      PointCloud patch;
      patch.points.reserve(patch_indices[pi].size());
      for (int idx : patch_indices[pi]) patch.points.push_back(cloud.points[static_cast<std::size_t>(idx)]);
      upsampled[pi] = upsample_patch(patch, config, substream(config.seed, 100 + pi));
    }
  });

  return merge_and_downsample(upsampled, target);
}

std::vector<DiagnosticsRow> sampling_diagnostics(const DensityField& field,
                                                 const PointCloud& ground_truth,
                                                 std::span<const double> multipliers,
                                                 std::span<const SampleMethod> methods,
                                                 const SamplerConfig& base, long target) {
  if (ground_truth.empty()) throw Error("sampling_diagnostics: empty ground truth");
  if (!is_normalized(ground_truth)) {
    throw Error("sampling_diagnostics: ground truth must be normalized");
  }
  const VoxelGrid& grid = field.grid;
  const int r = grid.resolution;

  // Ground-truth occupancy and per-point cells.
  std::vector<char> gt_occupied(std::size_t(grid.cell_count()), 0);
  std::vector<int> gt_cell(ground_truth.size());
  for (std::size_t i = 0; i < ground_truth.size(); ++i) {
    gt_cell[i] = grid.locate(ground_truth.points[i]);
    gt_occupied[std::size_t(gt_cell[i])] = 1;
  }

  auto near_sampled = [&](const std::vector<char>& sampled, int cell) {
    const auto c = grid.cell_coords(cell);
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        for (int dk = -1; dk <= 1; ++dk) {
          const int i = c[0] + di, j = c[1] + dj, k = c[2] + dk;
          if (i < 0 || j < 0 || k < 0 || i >= r || j >= r || k >= r) continue;
          if (sampled[std::size_t(grid.cell_index(i, j, k))]) return true;
        }
      }
    }
    return false;
  };

  std::vector<DiagnosticsRow> rows;
  for (SampleMethod method : methods) {
    for (double multiplier : multipliers) {
      SamplerConfig cfg = base;
      cfg.method = method;
      cfg.multiplier = multiplier;
      const long n = std::llround(double(target) / cfg.rate);
      const CellSampleSet samples = sample_cells(field, cfg, n);

      std::vector<char> sampled(std::size_t(grid.cell_count()), 0);
      PointCloud centers;
      centers.points.reserve(samples.entries.size());
      for (const auto& [cell, mult] : samples.entries) {
        sampled[static_cast<std::size_t>(cell)] = 1;
        centers.points.push_back(grid.cell_center(cell));
      }

      DiagnosticsRow row;
      row.method = method;
      row.multiplier = multiplier;

      long in_cells = 0;
      for (std::size_t i = 0; i < ground_truth.size(); ++i) {
        if (near_sampled(sampled, gt_cell[i])) ++in_cells;
      }
      row.precision = double(in_cells) / double(ground_truth.size());

      long occupied = 0, missed = 0;
      for (int c = 0; c < grid.cell_count(); ++c) {
        if (!gt_occupied[static_cast<std::size_t>(c)]) continue;
        ++occupied;
        if (!near_sampled(sampled, c)) ++missed;
      }
      row.missing_rate = occupied > 0 ? double(missed) / double(occupied) : 0.0;
      row.cell_cd = chamfer(centers, ground_truth);
      rows.push_back(row);
    }
  }
  return rows;
}

const char* method_name(SampleMethod method) {
  switch (method) {
    case SampleMethod::ThresholdTopK: return "topk";
    case SampleMethod::Multinomial: return "multinomial";
    case SampleMethod::MultinomialFps: return "mfps";
    case SampleMethod::MultinomialDfps: return "mdfps";
  }
  return "?";
}

SampleMethod parse_method(const std::string& name) {
  if (name == "topk") return SampleMethod::ThresholdTopK;
  if (name == "multinomial") return SampleMethod::Multinomial;
  if (name == "mfps") return SampleMethod::MultinomialFps;
  if (name == "mdfps") return SampleMethod::MultinomialDfps;
  throw Error("unknown sampler method '" + name + "'");
}

}  // namespace voxup
