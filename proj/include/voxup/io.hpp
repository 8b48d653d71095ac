#pragma once

#include <string>

#include "voxup/metrics.hpp"
#include "voxup/types.hpp"
#include "voxup/voxel.hpp"

namespace voxup {

enum class PointFormat { Auto, Xyz, Ply };

/// XYZ (whitespace-separated, '#' comments) or ascii PLY, chosen by extension
/// when format is Auto. Parse errors report the offending line.
PointCloud read_pointcloud(const std::string& path, PointFormat format = PointFormat::Auto);
void write_pointcloud(const std::string& path, const PointCloud& cloud,
                      PointFormat format = PointFormat::Auto);

/// OBJ (ascii, triangles; quads fan-triangulated only when allowed) or ascii
/// PLY with triangular faces. Degenerate faces are dropped at load time.
TriangleMesh read_mesh(const std::string& path, bool triangulate_quads = false);
void write_mesh(const std::string& path, const TriangleMesh& mesh);

/// Density-grid binary: magic "PUVX", version u32 = 1, resolution u32, then
/// R^3 little-endian f32 densities (row-major i,j,k) and R^3 f32 logits.
DensityField read_density_grid(const std::string& path);
void write_density_grid(const std::string& path, const DensityField& field);

}  // namespace voxup
