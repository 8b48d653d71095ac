#include "voxup/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "voxup/kdtree.hpp"
#include "voxup/parallel.hpp"
#include "voxup/rng.hpp"

namespace voxup {

namespace {

// Squared nearest-neighbor distance from every point of `from` into `to`.
std::vector<double> nearest_sq(const PointCloud& from, const PointCloud& to) {
  const NeighborIndex index(to);
  std::vector<double> d2(from.size());
  parallel_for(from.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto hit = index.knn(from.points[i], 1);
      d2[i] = hit[0].distance * hit[0].distance;
    }
  });
  return d2;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

// Smooth maximum: tau * log(mean(exp(x / tau))). Approaches max(x) for small
// tau and mean(x) for large tau.
double smooth_max(const std::vector<double>& v, double tau) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double x : v) peak = std::max(peak, x);
  double acc = 0.0;
  for (double x : v) acc += std::exp((x - peak) / tau);
  return peak + tau * std::log(acc / double(v.size()));
}

}  // namespace

double chamfer(const PointCloud& p, const PointCloud& q) {
  if (p.empty() || q.empty()) throw Error("chamfer: empty point set");
  return mean_of(nearest_sq(p, q)) + mean_of(nearest_sq(q, p));
}

double sharp_chamfer(const PointCloud& p, const PointCloud& q, double tau) {
  if (p.empty() || q.empty()) throw Error("sharp_chamfer: empty point set");
  if (tau <= 0.0) throw Error("sharp_chamfer: tau must be positive");
  return smooth_max(nearest_sq(p, q), tau) + smooth_max(nearest_sq(q, p), tau);
}

double hausdorff(const PointCloud& p, const PointCloud& q) {
  if (p.empty() || q.empty()) throw Error("hausdorff: empty point set");
  auto directed = [](const PointCloud& a, const PointCloud& b) {
    double worst = 0.0;
    for (double d2 : nearest_sq(a, b)) worst = std::max(worst, d2);
    return std::sqrt(worst);
  };
  return std::max(directed(p, q), directed(q, p));
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Ericson, "Real-Time Collision Detection", closest point on triangle.
  const double abx = double(b.x) - a.x, aby = double(b.y) - a.y, abz = double(b.z) - a.z;
  const double acx = double(c.x) - a.x, acy = double(c.y) - a.y, acz = double(c.z) - a.z;
  const double apx = double(p.x) - a.x, apy = double(p.y) - a.y, apz = double(p.z) - a.z;

  const double d1 = abx * apx + aby * apy + abz * apz;
  const double d2 = acx * apx + acy * apy + acz * apz;
  if (d1 <= 0.0 && d2 <= 0.0) return dist(p, a);

  const double bpx = double(p.x) - b.x, bpy = double(p.y) - b.y, bpz = double(p.z) - b.z;
  const double d3 = abx * bpx + aby * bpy + abz * bpz;
  const double d4 = acx * bpx + acy * bpy + acz * bpz;
  if (d3 >= 0.0 && d4 <= d3) return dist(p, b);

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double t = d1 / (d1 - d3);
    return dist(p, Vec3(float(a.x + t * abx), float(a.y + t * aby), float(a.z + t * abz)));
  }

  const double cpx = double(p.x) - c.x, cpy = double(p.y) - c.y, cpz = double(p.z) - c.z;
  const double d5 = abx * cpx + aby * cpy + abz * cpz;
  const double d6 = acx * cpx + acy * cpy + acz * cpz;
  if (d6 >= 0.0 && d5 <= d6) return dist(p, c);

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double t = d2 / (d2 - d6);
    return dist(p, Vec3(float(a.x + t * acx), float(a.y + t * acy), float(a.z + t * acz)));
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return dist(p, Vec3(float(b.x + t * (double(c.x) - b.x)), float(b.y + t * (double(c.y) - b.y)),
                        float(b.z + t * (double(c.z) - b.z))));
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return dist(p, Vec3(float(a.x + abx * v + acx * w), float(a.y + aby * v + acy * w),
                      float(a.z + abz * v + acz * w)));
}

namespace {

std::vector<double> point_mesh_distances(const PointCloud& p, const TriangleMesh& mesh) {
  std::vector<double> d(p.size());
  parallel_for(p.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& f : mesh.faces) {
        best = std::min(best, point_triangle_distance(p.points[i], mesh.vertices[std::size_t(f[0])],
                                                      mesh.vertices[std::size_t(f[1])],
                                                      mesh.vertices[std::size_t(f[2])]));
      }
      d[i] = best;
    }
  });
  return d;
}

}  // namespace

SurfaceDistance point_to_mesh(const PointCloud& p, const TriangleMesh& mesh,
                              bool bidirectional) {
  if (p.empty()) throw Error("point_to_mesh: empty point set");
  if (mesh.empty()) throw Error("point_to_mesh: empty mesh");

  const auto forward = point_mesh_distances(p, mesh);
  SurfaceDistance out;
  out.mean = mean_of(forward);
  for (double d : forward) out.max = std::max(out.max, d);

  if (bidirectional) {
    const PointCloud samples = sample_mesh_surface(mesh, 20000, 0);
    const NeighborIndex index(p);
    std::vector<double> back(samples.size());
    parallel_for(samples.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        back[i] = index.knn(samples.points[i], 1)[0].distance;
      }
    });
    double back_max = 0.0;
    for (double d : back) back_max = std::max(back_max, d);
    out.mean = 0.5 * (out.mean + mean_of(back));
    out.max = std::max(out.max, back_max);
  }
  return out;
}

PointCloud sample_mesh_surface(const TriangleMesh& mesh, int n, std::uint64_t seed) {
  std::vector<double> cum_area;
  cum_area.reserve(mesh.faces.size());
  double acc = 0.0;
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[std::size_t(f[0])];
    const Vec3& b = mesh.vertices[std::size_t(f[1])];
    const Vec3& c = mesh.vertices[std::size_t(f[2])];
    const double ux = double(b.x) - a.x, uy = double(b.y) - a.y, uz = double(b.z) - a.z;
    const double vx = double(c.x) - a.x, vy = double(c.y) - a.y, vz = double(c.z) - a.z;
    const double cx = uy * vz - uz * vy, cy = uz * vx - ux * vz, cz = ux * vy - uy * vx;
    acc += 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
    cum_area.push_back(acc);
  }
  if (acc <= 0.0) throw Error("sample_mesh_surface: degenerate mesh");

  PointCloud out;
  out.points.reserve(std::size_t(n));
  for (int i = 0; i < n; ++i) {
    const double u = counter_uniform(seed, std::uint64_t(3 * i)) * acc;
    const std::size_t face =
        std::size_t(std::upper_bound(cum_area.begin(), cum_area.end(), u) - cum_area.begin());
    const auto& f = mesh.faces[std::min(face, mesh.faces.size() - 1)];
    double r1 = counter_uniform(seed, std::uint64_t(3 * i + 1));
    double r2 = counter_uniform(seed, std::uint64_t(3 * i + 2));
    const double s = std::sqrt(r1);
    const double wa = 1.0 - s, wb = s * (1.0 - r2), wc = s * r2;
    const Vec3& a = mesh.vertices[std::size_t(f[0])];
    const Vec3& b = mesh.vertices[std::size_t(f[1])];
    const Vec3& c = mesh.vertices[std::size_t(f[2])];
    out.points.push_back(Vec3(float(wa * a.x + wb * b.x + wc * c.x),
                              float(wa * a.y + wb * b.y + wc * c.y),
                              float(wa * a.z + wb * b.z + wc * c.z)));
  }
  return out;
}

double reg_loss(const PointCloud& p, const CellSampleSet& cells, const VoxelGrid& grid) {
  const auto cell_of = expanded_cells(cells);
  if (cell_of.size() != p.size()) throw Error("reg_loss: point/cell count mismatch");
  const double d = grid.cell_diagonal();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double r = dist(p.points[i], grid.cell_center(cell_of[i]));
    sum += std::max(r - d, 0.0);
  }
  return sum;
}

double bce_loss(std::span<const float> pred_logits, std::span<const float> truth_labels) {
  if (pred_logits.size() != truth_labels.size() || pred_logits.empty()) {
    throw Error("bce_loss: length mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < pred_logits.size(); ++i) {
    const double x = double(pred_logits[i]);
    const double y = double(truth_labels[i]);
    // softplus(x) - y*x, with softplus evaluated stably.
    const double softplus = x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    sum += softplus - y * x;
  }
  return sum / double(pred_logits.size());
}

double mse_loss(std::span<const float> pred_density, std::span<const float> truth_density) {
  if (pred_density.size() != truth_density.size() || pred_density.empty()) {
    throw Error("mse_loss: length mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < pred_density.size(); ++i) {
    const double d = double(pred_density[i]) - double(truth_density[i]);
    sum += d * d;
  }
  return sum / double(pred_density.size());
}

double total_loss(const LossParts& parts, const LossWeights& weights) {
  const double terms[] = {parts.cd_coarse, parts.sharp_cd_coarse, parts.cd_refined,
                          parts.gc,        parts.reg,             parts.bce,
                          parts.mse};
  for (double t : terms) {
    if (!std::isfinite(t)) throw Error("total_loss: non-finite loss part");
  }
  return parts.cd_coarse + weights.sharp_cd * parts.sharp_cd_coarse + parts.cd_refined +
         weights.gc * parts.gc + weights.reg * parts.reg + weights.bce * parts.bce +
         weights.mse * parts.mse;
}

std::string MetricsReport::to_table() const {
  std::ostringstream os;
  os << "metric        value (x10^3)\n";
  os << "CD            " << cd * 1e3 << "\n";
  os << "HD            " << hd * 1e3 << "\n";
  if (has_p2f) {
    os << "P2F mean      " << p2f_mean * 1e3 << "\n";
    os << "P2F max       " << p2f_max * 1e3 << "\n";
  }
  return os.str();
}

std::string MetricsReport::to_keyvalue() const {
  std::ostringstream os;
  os.precision(12);
  os << "cd=" << cd * 1e3 << "\n";
  os << "hd=" << hd * 1e3 << "\n";
  if (has_p2f) {
    os << "p2f_mean=" << p2f_mean * 1e3 << "\n";
    os << "p2f_max=" << p2f_max * 1e3 << "\n";
  }
  return os.str();
}

MetricsReport evaluate_metrics(const PointCloud& predicted, const PointCloud& truth,
                               const TriangleMesh* mesh) {
  MetricsReport report;
  report.cd = chamfer(predicted, truth);
  report.hd = hausdorff(predicted, truth);
  if (mesh != nullptr) {
    const auto p2f = point_to_mesh(predicted, *mesh);
    report.p2f_mean = p2f.mean;
    report.p2f_max = p2f.max;
    report.has_p2f = true;
  }
  return report;
}

}  // namespace voxup
