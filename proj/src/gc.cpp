#include "voxup/gc.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <limits>

#include "voxup/parallel.hpp"
#include "voxup/rng.hpp"

namespace voxup {

SurfacePatchPair build_patch_pair(const Vec3& seed, const NeighborIndex& target_index,
                                  int k) {
  if (k < 2) throw Error("build_patch_pair: k must be >= 2");
  SurfacePatchPair pair;
  pair.seed = seed;
  const int avail = std::min(k, target_index.size());
  const auto hits = target_index.knn(seed, avail);
  pair.real.reserve(static_cast<std::size_t>(k));
  for (const auto& h : hits) pair.real.push_back(target_index.point(h.index));
  while (int(pair.real.size()) < k) pair.real.push_back(pair.real.front());
  pair.mimic = pair.real;
  pair.mimic[0] = seed;
  return pair;
}

SurfaceEncoder::SurfaceEncoder(std::uint64_t seed, int dim, int hidden) {
  if (dim < 1 || hidden < 1) throw Error("SurfaceEncoder: invalid dimensions");
  w1_.resize(hidden, 6);
  w2_.resize(dim, 2 * hidden);
  std::uint64_t counter = 0;
  const std::uint64_t s1 = substream(seed, 1);
  const float scale1 = 1.f / std::sqrt(6.f);
  for (int r = 0; r < hidden; ++r) {
    for (int c = 0; c < 6; ++c) w1_(r, c) = float(counter_normal(s1, counter++)) * scale1;
  }
  counter = 0;
  const std::uint64_t s2 = substream(seed, 2);
  const float scale2 = 1.f / std::sqrt(float(2 * hidden));
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < 2 * hidden; ++c) w2_(r, c) = float(counter_normal(s2, counter++)) * scale2;
  }
}

Eigen::VectorXf SurfaceEncoder::encode(const std::vector<Vec3>& patch) const {
  if (patch.empty()) throw Error("encode: empty patch");
  const int n = int(patch.size());
  const int n_neighbors = std::max(1, std::min(n - 1, 8));

  // Center on the centroid for translation invariance.
  double cx = 0, cy = 0, cz = 0;
  for (const Vec3& p : patch) {
    cx += p.x;
    cy += p.y;
    cz += p.z;
  }
  cx /= n;
  cy /= n;
  cz /= n;
  Eigen::MatrixXf x(3, n);
  for (int i = 0; i < n; ++i) {
    x(0, i) = float(double(patch[static_cast<std::size_t>(i)].x) - cx);
    x(1, i) = float(double(patch[static_cast<std::size_t>(i)].y) - cy);
    x(2, i) = float(double(patch[static_cast<std::size_t>(i)].z) - cz);
  }

  // Neighbor lists within the patch: nearest first, index ties to the lower.
  std::vector<std::vector<int>> nbr(static_cast<std::size_t>(n));
  {
    std::vector<std::pair<double, int>> cand(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        cand[static_cast<std::size_t>(j)] = {sqdist(patch[static_cast<std::size_t>(i)], patch[static_cast<std::size_t>(j)]), j};
      }
      cand[static_cast<std::size_t>(i)].first = std::numeric_limits<double>::infinity();  // exclude self
      std::sort(cand.begin(), cand.end());
      nbr[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(n_neighbors));
      for (int t = 0; t < n_neighbors && t < n; ++t) {
        if (std::isinf(cand[static_cast<std::size_t>(t)].first)) break;
        nbr[static_cast<std::size_t>(i)].push_back(cand[static_cast<std::size_t>(t)].second);
      }
      if (nbr[static_cast<std::size_t>(i)].empty()) nbr[static_cast<std::size_t>(i)].push_back(i);
    }
  }

  const int hidden = int(w1_.rows());
  Eigen::MatrixXf h = Eigen::MatrixXf::Constant(hidden, n, -std::numeric_limits<float>::infinity());
  Eigen::VectorXf edge1(6);
  for (int i = 0; i < n; ++i) {
    for (int j : nbr[static_cast<std::size_t>(i)]) {
      edge1.head<3>() = x.col(i);
      edge1.tail<3>() = x.col(j) - x.col(i);
      h.col(i) = h.col(i).cwiseMax((w1_ * edge1).cwiseMax(0.f));
    }
  }

  const int dim = int(w2_.rows());
  Eigen::VectorXf code = Eigen::VectorXf::Constant(dim, -std::numeric_limits<float>::infinity());
  Eigen::VectorXf edge2(2 * hidden);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXf g = Eigen::VectorXf::Constant(dim, -std::numeric_limits<float>::infinity());
    for (int j : nbr[static_cast<std::size_t>(i)]) {
      edge2.head(hidden) = h.col(i);
      edge2.tail(hidden) = h.col(j) - h.col(i);
      g = g.cwiseMax((w2_ * edge2).cwiseMax(0.f));
    }
    code = code.cwiseMax(g);
  }
  return code;
}

namespace {

constexpr char kMagic[4] = {'P', 'U', 'G', 'C'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ofstream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t read_u32(std::ifstream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

}  // namespace

void SurfaceEncoder::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("SurfaceEncoder::save: cannot open " + path);
  os.write(kMagic, 4);
  write_u32(os, kVersion);
  write_u32(os, std::uint32_t(dim()));
  write_u32(os, 2);  // layer count
  write_u32(os, std::uint32_t(w1_.rows()));
  write_u32(os, std::uint32_t(w1_.cols()));
  write_u32(os, std::uint32_t(w2_.rows()));
  write_u32(os, std::uint32_t(w2_.cols()));
  os.write(reinterpret_cast<const char*>(w1_.data()), std::streamsize(w1_.size() * 4));
  os.write(reinterpret_cast<const char*>(w2_.data()), std::streamsize(w2_.size() * 4));
  if (!os) throw Error("SurfaceEncoder::save: write failed");
}

SurfaceEncoder SurfaceEncoder::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("SurfaceEncoder::load: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw Error("SurfaceEncoder::load: bad magic");
  }
  if (read_u32(is) != kVersion) throw Error("SurfaceEncoder::load: unsupported version");
  const std::uint32_t dim = read_u32(is);
  const std::uint32_t layers = read_u32(is);
  if (layers != 2) throw Error("SurfaceEncoder::load: unsupported layer count");
  const std::uint32_t r1 = read_u32(is), c1 = read_u32(is);
  const std::uint32_t r2 = read_u32(is), c2 = read_u32(is);
  if (c1 != 6 || c2 != 2 * r1 || r2 != dim) throw Error("SurfaceEncoder::load: bad layer sizes");

  SurfaceEncoder enc{Uninitialized{}};
  enc.w1_.resize(int(r1), int(c1));
  enc.w2_.resize(int(r2), int(c2));
  is.read(reinterpret_cast<char*>(enc.w1_.data()), std::streamsize(enc.w1_.size() * 4));
  is.read(reinterpret_cast<char*>(enc.w2_.data()), std::streamsize(enc.w2_.size() * 4));
  if (!is) throw Error("SurfaceEncoder::load: truncated file");
  return enc;
}

double gc_loss(const PointCloud& p, const PointCloud& q, const SurfaceEncoder& encoder,
               int k) {
  if (p.empty() || q.empty()) throw Error("gc_loss: empty point set");
  const NeighborIndex index(q);
  std::vector<double> diffs(p.size());
  parallel_for(p.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto pair = build_patch_pair(p.points[i], index, k);
      if (pair.real[0] == pair.seed) {
        diffs[i] = 0.0;  // identical patches encode identically
        continue;
      }
      const Eigen::VectorXf real = encoder.encode(pair.real);
      const Eigen::VectorXf mimic = encoder.encode(pair.mimic);
      diffs[i] = double((real - mimic).norm());
    }
  });
  double sum = 0.0;
  for (double d : diffs) sum += d;
  return sum / double(p.size());
}

}  // namespace voxup
