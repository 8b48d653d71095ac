#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "support.hpp"
#include "voxup/gc.hpp"
#include "voxup/pointcloud.hpp"

using namespace voxup;
using testsupport::random_cloud;

TEST_CASE("patch pair replaces the nearest point by the seed") {
  PointCloud q;
  q.points = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
  const NeighborIndex index(q);
  const Vec3 seed(0.1f, 0, 0);
  const auto pair = build_patch_pair(seed, index, 2);
  REQUIRE(pair.real.size() == 2);
  REQUIRE(pair.mimic.size() == 2);
  CHECK(pair.real[0] == Vec3(0, 0, 0));
  CHECK(pair.real[1] == Vec3(1, 0, 0));
  CHECK(pair.mimic[0] == seed);
  CHECK(pair.mimic[1] == Vec3(1, 0, 0));
}

TEST_CASE("patch pair is identical when the seed is in the target set") {
  const PointCloud q = random_cloud(100, 70);
  const NeighborIndex index(q);
  const auto pair = build_patch_pair(q.points[13], index, 16);
  CHECK(pair.real == pair.mimic);
}

TEST_CASE("patch pair pads by repeating the nearest point") {
  PointCloud q;
  q.points = {Vec3(2, 2, 2)};
  const NeighborIndex index(q);
  const auto pair = build_patch_pair(Vec3(0, 0, 0), index, 4);
  REQUIRE(pair.real.size() == 4);
  for (const Vec3& p : pair.real) CHECK(p == Vec3(2, 2, 2));
  CHECK(pair.mimic[0] == Vec3(0, 0, 0));
}

TEST_CASE("patch pair orders the real patch nearest-first") {
  const PointCloud q = random_cloud(200, 71);
  const NeighborIndex index(q);
  const Vec3 seed(0.1f, -0.2f, 0.05f);
  const auto pair = build_patch_pair(seed, index, 16);
  for (std::size_t i = 1; i < pair.real.size(); ++i) {
    CHECK(dist(seed, pair.real[i - 1]) <= dist(seed, pair.real[i]) + 1e-12);
  }
}

TEST_CASE("encoder output is permutation invariant") {
  const SurfaceEncoder encoder;
  std::vector<Vec3> patch;
  for (int i = 0; i < 16; ++i) {
    patch.push_back(Vec3(float(counter_uniform(80, 3 * std::uint64_t(i))),
                         float(counter_uniform(80, 3 * std::uint64_t(i) + 1)),
                         float(counter_uniform(80, 3 * std::uint64_t(i) + 2))));
  }
  const auto code = encoder.encode(patch);
  CHECK(code.size() == 128);
  std::vector<Vec3> shuffled = patch;
  std::reverse(shuffled.begin(), shuffled.end());
  std::swap(shuffled[2], shuffled[9]);
  CHECK((encoder.encode(shuffled) - code).norm() == 0.f);
}

TEST_CASE("encoder output is translation invariant but not rotation invariant") {
  const SurfaceEncoder encoder;
  std::vector<Vec3> patch;
  for (int i = 0; i < 12; ++i) {
    patch.push_back(Vec3(float(counter_uniform(81, 3 * std::uint64_t(i))),
                         float(counter_uniform(81, 3 * std::uint64_t(i) + 1)),
                         float(counter_uniform(81, 3 * std::uint64_t(i) + 2))));
  }
  const auto code = encoder.encode(patch);

  std::vector<Vec3> translated = patch;
  for (Vec3& p : translated) p = p + Vec3(4.5f, -1.25f, 0.75f);
  const auto tcode = encoder.encode(translated);
  for (int i = 0; i < code.size(); ++i) CHECK(std::abs(tcode[i] - code[i]) < 1e-4);

  std::vector<Vec3> rotated = patch;
  for (Vec3& p : rotated) p = Vec3(p.y, -p.x, p.z);  // 90 degrees about z
  CHECK((encoder.encode(rotated) - code).norm() > 0.f);
}

TEST_CASE("encoder is deterministic in its seed") {
  std::vector<Vec3> patch = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  const SurfaceEncoder a, b;
  CHECK((a.encode(patch) - b.encode(patch)).norm() == 0.f);
  const SurfaceEncoder other(12345);
  CHECK((other.encode(patch) - a.encode(patch)).norm() > 0.f);
}

TEST_CASE("encoder weights survive a save/load round trip") {
  const SurfaceEncoder encoder(777);
  const std::string path = "encoder_roundtrip.bin";
  encoder.save(path);
  const SurfaceEncoder loaded = SurfaceEncoder::load(path);
  std::vector<Vec3> patch = {Vec3(0.1f, 0.2f, 0.3f), Vec3(-0.5f, 0.1f, 0.f), Vec3(0.2f, -0.3f, 0.4f),
                             Vec3(0.f, 0.f, 0.f), Vec3(0.4f, 0.4f, -0.2f)};
  CHECK((loaded.encode(patch) - encoder.encode(patch)).norm() == 0.f);
  CHECK(loaded.dim() == encoder.dim());
  std::remove(path.c_str());
  CHECK_THROWS_AS(SurfaceEncoder::load("does_not_exist.bin"), Error);
}

TEST_CASE("gc loss is exactly zero when every seed coincides with a target point") {
  const PointCloud q = random_cloud(500, 82);
  PointCloud p;
  for (int i = 0; i < 100; ++i) p.points.push_back(q.points[std::size_t(i * 5)]);
  const SurfaceEncoder encoder;
  CHECK(gc_loss(p, q, encoder, 16) == 0.0);
}

TEST_CASE("gc loss is positive for perturbed seeds and grows with the perturbation") {
  const PointCloud q = random_cloud(400, 83);
  const SurfaceEncoder encoder;
  double prev = 0.0;
  for (double sigma : {0.005, 0.02, 0.08}) {
    PointCloud p;
    std::uint64_t c = 0;
    for (int i = 0; i < 60; ++i) {
      Vec3 v = q.points[std::size_t(i * 6)];
      for (int a = 0; a < 3; ++a) v[a] += float(sigma * counter_normal(84, c++));
      p.points.push_back(v);
    }
    const double loss = gc_loss(p, q, encoder, 16);
    CHECK(loss > prev);
    prev = loss;
  }
}

TEST_CASE("gc loss rejects empty point sets") {
  const SurfaceEncoder encoder;
  const PointCloud q = random_cloud(10, 85);
  CHECK_THROWS_AS(gc_loss(PointCloud{}, q, encoder, 8), Error);
  CHECK_THROWS_AS(gc_loss(q, PointCloud{}, encoder, 8), Error);
}
