#include "voxup/pointcloud.hpp"

#include <algorithm>
#include <limits>

namespace voxup {

PointCloud normalize(const PointCloud& cloud) {
  if (cloud.empty()) throw Error("normalize: empty cloud");

  double lo[3], hi[3];
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::numeric_limits<double>::infinity();
    hi[a] = -std::numeric_limits<double>::infinity();
  }
  for (const Vec3& p : cloud.points) {
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], double(p[a]));
      hi[a] = std::max(hi[a], double(p[a]));
    }
  }

  double longest = 0.0;
  for (int a = 0; a < 3; ++a) longest = std::max(longest, hi[a] - lo[a]);
  if (longest <= 0.0) throw Error("degenerate cloud");

  PointCloud out;
  out.points.reserve(cloud.size());
  Normalization n;
  for (int a = 0; a < 3; ++a) n.center[a] = 0.5 * (lo[a] + hi[a]);
  n.scale = longest;
  for (const Vec3& p : cloud.points) {
    out.points.push_back(Vec3(float((double(p.x) - n.center[0]) / n.scale),
                              float((double(p.y) - n.center[1]) / n.scale),
                              float((double(p.z) - n.center[2]) / n.scale)));
  }
  out.normalization = n;
  return out;
}

PointCloud denormalize(const PointCloud& cloud) {
  PointCloud out;
  out.points.reserve(cloud.size());
  const Normalization& n = cloud.normalization;
  for (const Vec3& p : cloud.points) {
    out.points.push_back(Vec3(float(double(p.x) * n.scale + n.center[0]),
                              float(double(p.y) * n.scale + n.center[1]),
                              float(double(p.z) * n.scale + n.center[2])));
  }
  return out;
}

Vec3 centroid(const PointCloud& cloud) {
  if (cloud.empty()) throw Error("centroid: empty cloud");
  double s[3] = {0, 0, 0};
  for (const Vec3& p : cloud.points) {
    s[0] += p.x;
    s[1] += p.y;
    s[2] += p.z;
  }
  const double inv = 1.0 / double(cloud.size());
  return Vec3(float(s[0] * inv), float(s[1] * inv), float(s[2] * inv));
}

bool is_normalized(const PointCloud& cloud, double eps) {
  for (const Vec3& p : cloud.points) {
    for (int a = 0; a < 3; ++a) {
      if (std::abs(double(p[a])) > 0.5 + eps) return false;
    }
  }
  return true;
}

}  // namespace voxup
