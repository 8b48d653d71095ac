#include "voxup/kdtree.hpp"

#include <algorithm>
#include <numeric>

#include "voxup/pointcloud.hpp"

namespace voxup {

namespace {

constexpr int kLeafSize = 16;

// Lexicographic (distance, index) order gives deterministic ties.
inline bool hit_less(const NeighborIndex::Hit& a, const NeighborIndex::Hit& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  return a.index < b.index;
}

}  // namespace

NeighborIndex::NeighborIndex(const PointCloud& cloud) : points_(cloud.points) {
  if (points_.empty()) throw Error("NeighborIndex: empty cloud");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  root_ = build(0, int(points_.size()));
}

int NeighborIndex::build(int begin, int end) {
  Node node;
  node.begin = begin;
  node.end = end;
  if (end - begin <= kLeafSize) {
    nodes_.push_back(node);
    return int(nodes_.size()) - 1;
  }

  // Split on the widest axis at the median.
  float lo[3], hi[3];
  for (int a = 0; a < 3; ++a) {
    lo[a] = points_[std::size_t(order_[static_cast<std::size_t>(begin)])][a];
    hi[a] = lo[a];
  }
  for (int i = begin; i < end; ++i) {
    const Vec3& p = points_[std::size_t(order_[static_cast<std::size_t>(i)])];
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  int axis = 0;
  for (int a = 1; a < 3; ++a) {
    if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
  }

  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int ia, int ib) {
                     const float va = points_[static_cast<std::size_t>(ia)][axis];
                     const float vb = points_[static_cast<std::size_t>(ib)][axis];
                     if (va != vb) return va < vb;
                     return ia < ib;
                   });
  node.axis = axis;
  node.split = points_[std::size_t(order_[static_cast<std::size_t>(mid)])][axis];

  const int self = int(nodes_.size());
  nodes_.push_back(node);
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[static_cast<std::size_t>(self)].left = left;
  nodes_[static_cast<std::size_t>(self)].right = right;
  return self;
}

void NeighborIndex::search_knn(int node_id, const Vec3& q, int k,
                               std::vector<Hit>& heap) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  if (node.left < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const int idx = order_[static_cast<std::size_t>(i)];
      Hit h{idx, sqdist(q, points_[static_cast<std::size_t>(idx)])};
      if (int(heap.size()) < k) {
        heap.push_back(h);
        std::push_heap(heap.begin(), heap.end(), hit_less);
      } else if (hit_less(h, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), hit_less);
        heap.back() = h;
        std::push_heap(heap.begin(), heap.end(), hit_less);
      }
    }
    return;
  }

  const double delta = double(q[node.axis]) - double(node.split);
  const int near = delta < 0.0 ? node.left : node.right;
  const int far = delta < 0.0 ? node.right : node.left;
  search_knn(near, q, k, heap);
  // Equal plane distance may still hold an index tie, so use <=.
  if (int(heap.size()) < k || delta * delta <= heap.front().distance) {
    search_knn(far, q, k, heap);
  }
}

std::vector<NeighborIndex::Hit> NeighborIndex::knn(const Vec3& query, int k) const {
  if (k < 1) throw Error("knn: k must be positive");
  if (k > size()) throw Error("knn: k exceeds point count");
  std::vector<Hit> heap;
  heap.reserve(static_cast<std::size_t>(k) + 1);
  search_knn(root_, query, k, heap);
  std::sort(heap.begin(), heap.end(), hit_less);
  for (Hit& h : heap) h.distance = std::sqrt(h.distance);
  return heap;
}

void NeighborIndex::search_radius(int node_id, const Vec3& q, double r2,
                                  std::vector<Hit>& out) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  if (node.left < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const int idx = order_[static_cast<std::size_t>(i)];
      const double d2 = sqdist(q, points_[static_cast<std::size_t>(idx)]);
      if (d2 <= r2) out.push_back(Hit{idx, d2});
    }
    return;
  }
  const double delta = double(q[node.axis]) - double(node.split);
  const int near = delta < 0.0 ? node.left : node.right;
  const int far = delta < 0.0 ? node.right : node.left;
  search_radius(near, q, r2, out);
  if (delta * delta <= r2) search_radius(far, q, r2, out);
}

std::vector<NeighborIndex::Hit> NeighborIndex::radius(const Vec3& query, double r) const {
  if (r < 0.0) throw Error("radius: negative radius");
  std::vector<Hit> out;
  search_radius(root_, query, r * r, out);
  std::sort(out.begin(), out.end(), hit_less);
  for (Hit& h : out) h.distance = std::sqrt(h.distance);
  return out;
}

std::vector<int> farthest_point_sample(const PointCloud& cloud, int m) {
  const int n = int(cloud.size());
  if (m < 1 || m > n) throw Error("fps: m out of range");

  const Vec3 c = centroid(cloud);
  int start = 0;
  double best = sqdist(cloud.points[0], c);
  for (int i = 1; i < n; ++i) {
    const double d = sqdist(cloud.points[static_cast<std::size_t>(i)], c);
    if (d < best) {
      best = d;
      start = i;
    }
  }

  std::vector<int> selected;
  selected.reserve(static_cast<std::size_t>(m));
  selected.push_back(start);
  // Selected entries drop to -1 so duplicate coordinates cannot be re-picked.
  std::vector<double> min_d2(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    min_d2[static_cast<std::size_t>(i)] = sqdist(cloud.points[static_cast<std::size_t>(i)], cloud.points[static_cast<std::size_t>(start)]);
  }
  min_d2[static_cast<std::size_t>(start)] = -1.0;

  while (int(selected.size()) < m) {
    int pick = -1;
    double pick_d2 = -1.0;
    for (int i = 0; i < n; ++i) {
      if (min_d2[static_cast<std::size_t>(i)] > pick_d2) {
        pick_d2 = min_d2[static_cast<std::size_t>(i)];
        pick = i;
      }
    }
    selected.push_back(pick);
    const Vec3& p = cloud.points[static_cast<std::size_t>(pick)];
    for (int i = 0; i < n; ++i) {
      if (min_d2[static_cast<std::size_t>(i)] < 0.0) continue;
      const double d2 = sqdist(cloud.points[static_cast<std::size_t>(i)], p);
      if (d2 < min_d2[static_cast<std::size_t>(i)]) min_d2[static_cast<std::size_t>(i)] = d2;
    }
    min_d2[static_cast<std::size_t>(pick)] = -1.0;
  }
  return selected;
}

}  // namespace voxup
