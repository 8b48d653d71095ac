#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "voxup/kdtree.hpp"
#include "voxup/types.hpp"

namespace voxup {

/// Real surface patch (k nearest target points, nearest-first) and its mimic
/// counterpart with the nearest point replaced by the seed.
struct SurfacePatchPair {
  std::vector<Vec3> real;
  std::vector<Vec3> mimic;
  Vec3 seed;
};

/// S(p, Q) and S'(p, Q). When |Q| < k the nearest point is repeated to pad.
SurfacePatchPair build_patch_pair(const Vec3& seed, const NeighborIndex& target_index,
                                  int k);

/// Deterministic permutation- and translation-invariant patch encoder: two
/// rounds of edge-feature aggregation with fixed seeded random linear maps,
/// ReLU, per-point max over neighbors, then a global max-pool. A stand-in
/// for a trained encoder; trained weights can be imported via load().
class SurfaceEncoder {
 public:
  static constexpr std::uint64_t kDefaultSeed = 0x9D0C0FFEEull;

  explicit SurfaceEncoder(std::uint64_t seed = kDefaultSeed, int dim = 128,
                          int hidden = 64);

  /// Encodes a patch into a D-vector. Neighbor count = min(|patch|-1, 8).
  Eigen::VectorXf encode(const std::vector<Vec3>& patch) const;

  int dim() const { return int(w2_.rows()); }
  int hidden() const { return int(w1_.rows()); }

  /// Flat binary weight file: magic "PUGC", version, D, layer sizes, then
  /// little-endian f32 weights.
  void save(const std::string& path) const;
  static SurfaceEncoder load(const std::string& path);

 private:
  struct Uninitialized {};
  explicit SurfaceEncoder(Uninitialized) {}

  Eigen::MatrixXf w1_;  // hidden x 6
  Eigen::MatrixXf w2_;  // dim x 2*hidden
};

/// Mean over p in P of || phi(S(p,Q)) - phi(S'(p,Q)) ||_2.
double gc_loss(const PointCloud& p, const PointCloud& q, const SurfaceEncoder& encoder,
               int k = 16);

}  // namespace voxup
