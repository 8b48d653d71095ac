#pragma once

#include <string>

#include "voxup/sampler.hpp"
#include "voxup/types.hpp"

namespace voxup {

/// Triangle surface for point-to-surface evaluation. Faces index vertices;
/// degenerate (zero-area) faces are rejected by the loaders.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  bool empty() const { return faces.empty(); }
};

/// Bidirectional mean of squared nearest-neighbor distances.
double chamfer(const PointCloud& p, const PointCloud& q);

/// Chamfer with each directional mean replaced by the log-sum-exp smooth
/// maximum at temperature tau; converges to chamfer as tau grows.
double sharp_chamfer(const PointCloud& p, const PointCloud& q, double tau = 1e-2);

/// Max of the two directed max-min Euclidean distances (unsquared).
double hausdorff(const PointCloud& p, const PointCloud& q);

/// Exact distance from a point to a triangle (interior/edge/vertex cases).
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Area-uniform samples on the mesh surface; deterministic in the seed.
PointCloud sample_mesh_surface(const TriangleMesh& mesh, int n, std::uint64_t seed);

struct SurfaceDistance {
  double mean = 0.0;
  double max = 0.0;
};

/// Point-to-surface distance, predicted -> mesh. With `bidirectional`, also
/// samples the mesh densely and measures mesh -> points, folding both
/// directions into the reported mean/max.
SurfaceDistance point_to_mesh(const PointCloud& p, const TriangleMesh& mesh,
                              bool bidirectional = false);

/// Sum of max(dist(p, cell center) - d, 0) with d the cell diagonal. Points
/// are matched to cells by expanding the sample set in output order.
double reg_loss(const PointCloud& p, const CellSampleSet& cells, const VoxelGrid& grid);

/// Mean binary cross-entropy from logits against {0,1} labels, computed via
/// softplus for stability.
double bce_loss(std::span<const float> pred_logits, std::span<const float> truth_labels);

double mse_loss(std::span<const float> pred_density, std::span<const float> truth_density);

/// Balance weights of the total training objective.
struct LossWeights {
  double sharp_cd = 300.0;  // lambda_1
  double gc = 0.01;         // lambda_2
  double reg = 0.3;         // lambda_3
  double bce = 100.0;       // lambda_4
  double mse = 1e10;        // lambda_5
};

struct LossParts {
  double cd_coarse = 0.0;
  double sharp_cd_coarse = 0.0;
  double cd_refined = 0.0;
  double gc = 0.0;
  double reg = 0.0;
  double bce = 0.0;
  double mse = 0.0;
};

/// cd_c + l1*sharp_c + cd_r + l2*gc + l3*reg + l4*bce + l5*mse.
double total_loss(const LossParts& parts, const LossWeights& weights = {});

/// Evaluation summary; values are stored in input units and reported x10^3.
struct MetricsReport {
  double cd = 0.0;
  double hd = 0.0;
  double p2f_mean = 0.0;
  double p2f_max = 0.0;
  bool has_p2f = false;

  std::string to_table() const;
  std::string to_keyvalue() const;
};

MetricsReport evaluate_metrics(const PointCloud& predicted, const PointCloud& truth,
                               const TriangleMesh* mesh = nullptr);

}  // namespace voxup
