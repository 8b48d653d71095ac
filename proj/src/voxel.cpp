#include "voxup/voxel.hpp"

#include <algorithm>
#include <cmath>

#include "voxup/pointcloud.hpp"

namespace voxup {

VoxelGrid::VoxelGrid(int r) : resolution(r) {
  if (r < 1 || r > 64) throw Error("VoxelGrid: resolution must be in [1, 64]");
}

int VoxelGrid::locate(const Vec3& p) const {
  int c[3];
  for (int a = 0; a < 3; ++a) {
    const double v = double(p[a]);
    if (std::abs(v) > 0.5 + 1e-9) throw Error("locate: point outside normalized cube");
    int i = int(std::floor((v + 0.5) * resolution));
    // +0.5 boundary (and fp spill) goes to the last cell.
    c[a] = std::clamp(i, 0, resolution - 1);
  }
  return cell_index(c[0], c[1], c[2]);
}

GriddingOutput grid_displacements(const PointCloud& cloud, const VoxelGrid& grid) {
  if (!is_normalized(cloud)) throw Error("grid_displacements: cloud not normalized");
  GriddingOutput out;
  out.displacements.reserve(cloud.size());
  out.cell.reserve(cloud.size());
  const double side = grid.cell_side();
  for (const Vec3& p : cloud.points) {
    const int idx = grid.locate(p);
    const auto c = grid.cell_coords(idx);
    std::array<Vec3, 8> rows;
    for (int v = 0; v < 8; ++v) {
      const int di = (v >> 2) & 1, dj = (v >> 1) & 1, dk = v & 1;
      const double vx = (c[0] + di) * side - 0.5;
      const double vy = (c[1] + dj) * side - 0.5;
      const double vz = (c[2] + dk) * side - 0.5;
      rows[std::size_t(v)] =
          Vec3(float(double(p.x) - vx), float(double(p.y) - vy), float(double(p.z) - vz));
    }
    out.displacements.push_back(rows);
    out.cell.push_back(idx);
  }
  return out;
}

DensityField density_ground_truth(const PointCloud& cloud, const VoxelGrid& grid) {
  if (!is_normalized(cloud)) throw Error("density_ground_truth: cloud not normalized");
  DensityField field;
  field.grid = grid;
  field.provenance = Provenance::GroundTruth;
  field.density.assign(std::size_t(grid.cell_count()), 0.f);
  field.occupancy_logit.assign(std::size_t(grid.cell_count()), -kHardLogit);
  const float inv_n = 1.f / float(cloud.size());
  for (const Vec3& p : cloud.points) {
    field.density[std::size_t(grid.locate(p))] += inv_n;
  }
  for (std::size_t c = 0; c < field.density.size(); ++c) {
    if (field.density[c] > 0.f) field.occupancy_logit[c] = kHardLogit;
  }
  return field;
}

DensityField splat_density(const PointCloud& cloud, const VoxelGrid& grid,
                           int smoothing_radius) {
  if (!is_normalized(cloud)) throw Error("splat_density: cloud not normalized");
  if (smoothing_radius < 0) throw Error("splat_density: negative smoothing radius");
  const int r = grid.resolution;
  std::vector<double> mass(std::size_t(grid.cell_count()), 0.0);

  // Trilinear splat in cell-center coordinates; edge weights clamp onto the
  // boundary cells so each point deposits exactly unit mass.
  for (const Vec3& p : cloud.points) {
    double g[3], frac[3];
    int base[3];
    for (int a = 0; a < 3; ++a) {
      g[a] = (double(p[a]) + 0.5) * r - 0.5;
      base[a] = int(std::floor(g[a]));
      frac[a] = g[a] - base[a];
    }
    for (int v = 0; v < 8; ++v) {
      const int di = (v >> 2) & 1, dj = (v >> 1) & 1, dk = v & 1;
      const double w = (di ? frac[0] : 1.0 - frac[0]) * (dj ? frac[1] : 1.0 - frac[1]) *
                       (dk ? frac[2] : 1.0 - frac[2]);
      const int i = std::clamp(base[0] + di, 0, r - 1);
      const int j = std::clamp(base[1] + dj, 0, r - 1);
      const int k = std::clamp(base[2] + dk, 0, r - 1);
      mass[std::size_t(grid.cell_index(i, j, k))] += w;
    }
  }

  std::vector<double> occupied(mass.size(), 0.0);
  for (std::size_t c = 0; c < mass.size(); ++c) occupied[c] = mass[c] > 0.0 ? 1.0 : 0.0;

  if (smoothing_radius > 0) {
    const int s = smoothing_radius;
    const double inv_vol = 1.0 / double((2 * s + 1) * (2 * s + 1) * (2 * s + 1));
    auto box = [&](const std::vector<double>& in) {
      std::vector<double> out(in.size(), 0.0);
      for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
          for (int k = 0; k < r; ++k) {
            double acc = 0.0;
            for (int di = -s; di <= s; ++di) {
              for (int dj = -s; dj <= s; ++dj) {
                for (int dk = -s; dk <= s; ++dk) {
                  const int ii = i + di, jj = j + dj, kk = k + dk;
                  if (ii < 0 || jj < 0 || kk < 0 || ii >= r || jj >= r || kk >= r) continue;
                  acc += in[std::size_t(grid.cell_index(ii, jj, kk))];
                }
              }
            }
            out[std::size_t(grid.cell_index(i, j, k))] = acc * inv_vol;
          }
        }
      }
      return out;
    };
    mass = box(mass);
    occupied = box(occupied);
  }

  double total = 0.0;
  for (double m : mass) total += m;

  DensityField field;
  field.grid = grid;
  field.provenance = Provenance::Analytic;
  field.density.resize(mass.size());
  field.occupancy_logit.resize(mass.size());
  constexpr double kEps = 1e-4;
  for (std::size_t c = 0; c < mass.size(); ++c) {
    field.density[c] = float(mass[c] / total);
    const double q = std::clamp(occupied[c], kEps, 1.0 - kEps);
    field.occupancy_logit[c] = float(std::log(q / (1.0 - q)));
  }
  return field;
}

}  // namespace voxup
