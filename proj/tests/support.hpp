#pragma once

// Shared fixtures and independent oracles for the test suite.

#include <algorithm>
#include <cmath>
#include <vector>

#include "voxup/kdtree.hpp"
#include "voxup/rng.hpp"
#include "voxup/types.hpp"
#include "voxup/voxel.hpp"

namespace testsupport {

using voxup::PointCloud;
using voxup::Vec3;

inline PointCloud random_cloud(int n, std::uint64_t seed, float extent = 1.0f) {
  PointCloud cloud;
  cloud.points.reserve(std::size_t(n));
  std::uint64_t c = 0;
  for (int i = 0; i < n; ++i) {
    const float x = float((voxup::counter_uniform(seed, c++) - 0.5) * extent);
    const float y = float((voxup::counter_uniform(seed, c++) - 0.5) * extent);
    const float z = float((voxup::counter_uniform(seed, c++) - 0.5) * extent);
    cloud.points.push_back(Vec3(x, y, z));
  }
  return cloud;
}

// Exhaustive k-NN: sort all (distance, index) pairs lexicographically.
inline std::vector<std::pair<double, int>> brute_knn(const PointCloud& cloud,
                                                     const Vec3& query, int k) {
  std::vector<std::pair<double, int>> all;
  all.reserve(cloud.size());
  for (int i = 0; i < int(cloud.size()); ++i) {
    all.emplace_back(voxup::sqdist(query, cloud.points[std::size_t(i)]), i);
  }
  std::sort(all.begin(), all.end());
  all.resize(std::size_t(k));
  for (auto& [d, i] : all) d = std::sqrt(d);
  return all;
}

// Plain farthest point sampling over arbitrary positions: start at the
// largest-weight candidate (uniform -> index 0), then greedily maximize the
// min distance to the selected set, all ties to the lowest index.
inline std::vector<int> vanilla_fps(const std::vector<Vec3>& positions, int m) {
  const int n = int(positions.size());
  std::vector<int> selected = {0};
  std::vector<double> min_d2(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) min_d2[std::size_t(i)] = voxup::sqdist(positions[std::size_t(i)], positions[0]);
  std::vector<char> taken(std::size_t(n), 0);
  taken[0] = 1;
  while (int(selected.size()) < m) {
    int pick = -1;
    for (int i = 0; i < n; ++i) {
      if (taken[std::size_t(i)]) continue;
      if (pick < 0 || min_d2[std::size_t(i)] > min_d2[std::size_t(pick)]) pick = i;
    }
    selected.push_back(pick);
    taken[std::size_t(pick)] = 1;
    for (int i = 0; i < n; ++i) {
      if (taken[std::size_t(i)]) continue;
      min_d2[std::size_t(i)] =
          std::min(min_d2[std::size_t(i)], voxup::sqdist(positions[std::size_t(i)], positions[std::size_t(pick)]));
    }
  }
  return selected;
}

// O(n*m) chamfer oracle (squared, bidirectional mean).
inline double brute_chamfer(const PointCloud& p, const PointCloud& q) {
  auto dir = [](const PointCloud& a, const PointCloud& b) {
    double sum = 0.0;
    for (const Vec3& x : a.points) {
      double best = 1e300;
      for (const Vec3& y : b.points) best = std::min(best, voxup::sqdist(x, y));
      sum += best;
    }
    return sum / double(a.size());
  };
  return dir(p, q) + dir(q, p);
}

// Synthetic density field with a known planar surface and a sprinkling of
// low-density far-away cells, plus the matching ground truth. Exercises the
// outlier-rejection behavior of the density-guided samplers.
struct PlantedField {
  voxup::DensityField field;
  PointCloud ground_truth;          // the plane-layer cell centers
  std::vector<char> outlier;        // per-cell flag
  int plane_layer = 16;
};

inline PlantedField make_planted_field() {
  PlantedField out;
  const int r = 32;
  out.field.grid = voxup::VoxelGrid(r);
  out.field.density.assign(std::size_t(r * r * r), 0.f);
  out.field.occupancy_logit.assign(std::size_t(r * r * r), -10.f);
  out.outlier.assign(std::size_t(r * r * r), 0);

  const int k0 = out.plane_layer;
  double total = 0.0;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      const int c = out.field.grid.cell_index(i, j, k0);
      out.field.density[std::size_t(c)] = 1.f / float(r * r);
      out.field.occupancy_logit[std::size_t(c)] = 2.f;
      total += 1.0 / double(r * r);
      out.ground_truth.points.push_back(out.field.grid.cell_center(c));
    }
  }
  // ~1% of all cells become far outliers: every 56th cell at least 8 layers
  // away from the plane, in row-major order.
  long eligible = 0;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      for (int k = 0; k < r; ++k) {
        if (std::abs(k - k0) < 8) continue;
        if (eligible++ % 56 != 0) continue;
        const int c = out.field.grid.cell_index(i, j, k);
        out.field.density[std::size_t(c)] = 1e-4f;
        out.field.occupancy_logit[std::size_t(c)] = 2.f;
        out.outlier[std::size_t(c)] = 1;
        total += 1e-4;
      }
    }
  }
  for (float& d : out.field.density) d = float(double(d) / total);
  return out;
}

}  // namespace testsupport
