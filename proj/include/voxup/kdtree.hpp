#pragma once

#include <vector>

#include "voxup/types.hpp"

namespace voxup {

/// Exact k-NN / radius queries over a fixed point set.
///
/// Results match brute-force search: hits sorted by ascending distance,
/// ties broken by the lower point index.
class NeighborIndex {
 public:
  struct Hit {
    int index;
    double distance;
  };

  explicit NeighborIndex(const PointCloud& cloud);

  /// The k exactly-nearest points to `query`. Throws if k < 1 or k > size().
  std::vector<Hit> knn(const Vec3& query, int k) const;

  /// All points within `radius` (inclusive), sorted like knn results.
  std::vector<Hit> radius(const Vec3& query, double r) const;

  int size() const { return int(points_.size()); }
  const Vec3& point(int i) const { return points_[std::size_t(i)]; }

 private:
  struct Node {
    int left = -1, right = -1;
    int begin = 0, end = 0;  // leaf range into order_
    int axis = 0;
    float split = 0.f;
  };

  int build(int begin, int end);
  void search_knn(int node, const Vec3& q, int k, std::vector<Hit>& heap) const;
  void search_radius(int node, const Vec3& q, double r2, std::vector<Hit>& out) const;

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

/// Farthest point sampling. Starts at the point nearest the centroid, then
/// greedily maximizes the minimum distance to the selected set; all ties go
/// to the lowest index. Returns indices in selection order.
std::vector<int> farthest_point_sample(const PointCloud& cloud, int m);

}  // namespace voxup
