#include "voxup/reconstruct.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "voxup/io.hpp"
#include "voxup/kdtree.hpp"
#include "voxup/rng.hpp"

namespace voxup {

namespace {

double halton(long index, int base) {
  double f = 1.0, result = 0.0;
  long i = index;
  while (i > 0) {
    f /= base;
    result += f * double(i % base);
    i /= base;
  }
  return result;
}

struct PlaneFit {
  bool valid = false;
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();  // smallest-variance axis
  Eigen::Vector3d e1 = Eigen::Vector3d::Zero();      // largest-variance axis
  Eigen::Vector3d e2 = Eigen::Vector3d::Zero();
};

Eigen::Vector3d to_eigen(const Vec3& p) {
  return Eigen::Vector3d(double(p.x), double(p.y), double(p.z));
}

Vec3 to_vec3(const Eigen::Vector3d& p) {
  return Vec3(float(p.x()), float(p.y()), float(p.z()));
}

// Fixes the eigenvector sign so results do not depend on solver internals.
Eigen::Vector3d canonical_sign(Eigen::Vector3d v) {
  int arg = 0;
  for (int a = 1; a < 3; ++a) {
    if (std::abs(v[a]) > std::abs(v[arg])) arg = a;
  }
  return v[arg] < 0.0 ? Eigen::Vector3d(-v) : v;
}

PlaneFit fit_plane(const std::vector<Eigen::Vector3d>& pts,
                   const std::vector<double>& weights) {
  PlaneFit fit;
  double wsum = 0.0;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    mean += weights[i] * pts[i];
    wsum += weights[i];
  }
  if (wsum <= 0.0) return fit;
  mean /= wsum;

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Eigen::Vector3d d = pts[i] - mean;
    cov += weights[i] * d * d.transpose();
  }
  cov /= wsum;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  if (solver.info() != Eigen::Success) return fit;
  const Eigen::Vector3d evals = solver.eigenvalues();  // ascending
  if (evals[2] <= 0.0 || evals[1] <= 1e-12 * evals[2]) return fit;  // rank < 2

  fit.valid = true;
  fit.centroid = mean;
  fit.normal = canonical_sign(solver.eigenvectors().col(0));
  fit.e1 = canonical_sign(solver.eigenvectors().col(2));
  fit.e2 = canonical_sign(solver.eigenvectors().col(1));
  return fit;
}

}  // namespace

std::array<double, 2> cell_parameter(int cell_index, long rank) {
  const std::uint64_t key = splitmix64(std::uint64_t(cell_index) + 0x51ED270B9ull);
  const double off1 = double(key >> 40) * 0x1.0p-24;
  const double off2 = double((key >> 16) & 0xFFFFFF) * 0x1.0p-24;
  auto frac = [](double v) { return v - std::floor(v); };
  return {frac(halton(rank + 1, 2) + off1), frac(halton(rank + 1, 3) + off2)};
}

PointCloud place_coarse(const CellSampleSet& samples, const VoxelGrid& grid,
                        const PointCloud& input, int plane_neighbors) {
  if (samples.entries.empty()) throw Error("place_coarse: empty sample set");
  if (input.empty()) throw Error("place_coarse: empty input cloud");
  if (plane_neighbors < 3) throw Error("place_coarse: need at least 3 plane neighbors");

  const NeighborIndex index(input);
  const double side = grid.cell_side();
  const double diag = grid.cell_diagonal();
  const int k = std::min(plane_neighbors, index.size());

  PointCloud out;
  out.points.reserve(std::size_t(samples.total()));
  out.normalization = input.normalization;

  for (const auto& [cell, mult] : samples.entries) {
    const Vec3 center = grid.cell_center(cell);
    const auto c = grid.cell_coords(cell);

    PlaneFit fit;
    if (k >= 3) {
      const auto hits = index.knn(center, k);
      std::vector<Eigen::Vector3d> pts;
      std::vector<double> w(hits.size(), 1.0);
      pts.reserve(hits.size());
      for (const auto& h : hits) pts.push_back(to_eigen(index.point(h.index)));
      fit = fit_plane(pts, w);
    }

    const Eigen::Vector3d co = to_eigen(center);
    for (long rank = 0; rank < mult; ++rank) {
      Eigen::Vector3d p;
      if (fit.valid) {
        const auto u = cell_parameter(cell, rank);
        const Eigen::Vector3d anchor =
            co - fit.normal * fit.normal.dot(co - fit.centroid);
        p = anchor + (u[0] - 0.5) * side * fit.e1 + (u[1] - 0.5) * side * fit.e2;
      } else {
        // Degenerate neighborhood: cell center plus a small deterministic jitter.
        const std::uint64_t s = substream(std::uint64_t(cell), std::uint64_t(rank));
        Eigen::Vector3d dir(counter_normal(s, 0), counter_normal(s, 1), counter_normal(s, 2));
        if (dir.norm() > 0.0) dir.normalize();
        p = co + 0.05 * side * dir;
      }

      // Clamp to the cell cube expanded by d/2, then radially to distance d.
      for (int a = 0; a < 3; ++a) {
        const double lo = double(c[std::size_t(a)]) * side - 0.5 - 0.5 * diag;
        const double hi = double(c[std::size_t(a)] + 1) * side - 0.5 + 0.5 * diag;
        p[a] = std::clamp(p[a], lo, hi);
      }
      const Eigen::Vector3d delta = p - co;
      const double r = delta.norm();
      if (r > diag) p = co + delta * (diag / r);

      out.points.push_back(to_vec3(p));
    }
  }
  return out;
}

PointCloud refine(const PointCloud& coarse, const PointCloud& input,
                  const VoxelGrid& grid, const RefineConfig& config) {
  if (config.neighbors < 3) throw Error("refine: neighbors must be >= 3");
  if (!config.enabled || int(input.size()) < config.neighbors) return coarse;

  const NeighborIndex index(input);
  const double diag = grid.cell_diagonal();

  PointCloud out = coarse;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const Vec3& p0 = coarse.points[i];
    const auto hits = index.knn(p0, config.neighbors);

    double mean_d = 0.0;
    for (const auto& h : hits) mean_d += h.distance;
    mean_d /= double(hits.size());
    if (mean_d <= 0.0) continue;

    std::vector<Eigen::Vector3d> pts;
    std::vector<double> w;
    pts.reserve(hits.size());
    w.reserve(hits.size());
    for (const auto& h : hits) {
      pts.push_back(to_eigen(index.point(h.index)));
      const double t = h.distance / mean_d;
      w.push_back(std::exp(-0.5 * t * t));
    }
    const PlaneFit fit = fit_plane(pts, w);
    if (!fit.valid) continue;

    const Eigen::Vector3d p = to_eigen(p0);
    Eigen::Vector3d proj = p - fit.normal * fit.normal.dot(p - fit.centroid);
    const Eigen::Vector3d step = proj - p;
    const double len = step.norm();
    if (len > diag) proj = p + step * (diag / len);
    out.points[i] = to_vec3(proj);
  }
  return out;
}

PointCloud load_external_points(const std::string& path) {
  return read_pointcloud(path);
}

}  // namespace voxup
