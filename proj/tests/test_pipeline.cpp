#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <set>

#include "support.hpp"
#include "voxup/io.hpp"
#include "voxup/metrics.hpp"
#include "voxup/pipeline.hpp"
#include "voxup/pointcloud.hpp"
#include "voxup/synthetic.hpp"

using namespace voxup;
using testsupport::random_cloud;

TEST_CASE("a cloud of exactly patch size yields a single full patch") {
  const PointCloud cloud = random_cloud(128, 100);
  const auto patches = extract_patches(cloud, 128);
  REQUIRE(patches.size() == 1);
  std::set<int> unique(patches[0].begin(), patches[0].end());
  CHECK(unique.size() == 128);
}

TEST_CASE("every patch has exactly patch_size points and patches cover the cloud") {
  for (std::uint64_t seed = 101; seed < 104; ++seed) {
    const PointCloud cloud = random_cloud(700, seed);
    const auto patches = extract_patches(cloud, 128);
    std::set<int> covered;
    for (const auto& patch : patches) {
      CHECK(patch.size() == 128);
      covered.insert(patch.begin(), patch.end());
    }
    CHECK(covered.size() == cloud.size());
  }
}

TEST_CASE("a cloud smaller than the patch size becomes one whole-cloud patch") {
  const PointCloud cloud = random_cloud(50, 105);
  const auto patches = extract_patches(cloud, 256);
  REQUIRE(patches.size() == 1);
  CHECK(patches[0].size() == 50);
}

TEST_CASE("merge keeps the coordinate set when a duplicate patch is merged with itself") {
  PointCloud patch = random_cloud(100, 106);
  const PointCloud merged = merge_and_downsample({patch, patch}, 100);
  REQUIRE(merged.size() == 100);
  std::set<std::array<float, 3>> a, b;
  for (const Vec3& p : patch.points) a.insert({p.x, p.y, p.z});
  for (const Vec3& p : merged.points) b.insert({p.x, p.y, p.z});
  CHECK(a == b);
}

TEST_CASE("merge downsamples to the exact target and rejects deficits") {
  const PointCloud a = random_cloud(120, 107);
  const PointCloud b = random_cloud(140, 108);
  for (long target : {100L, 200L, 260L}) {
    CHECK(long(merge_and_downsample({a, b}, target).size()) == target);
  }
  CHECK_THROWS_AS(merge_and_downsample({a}, 200), Error);
}

TEST_CASE("upsampling yields exact counts for fractional rates") {
  const SyntheticCloud shape = generate_synthetic(Shape::Sphere, 300, 1);
  for (double rate : {2.0, 3.5, 7.0}) {
    PipelineConfig config;
    config.rate = rate;
    config.patch_size = 128;
    const PointCloud out = upsample_cloud(shape.cloud, config);
    CHECK(long(out.size()) == std::llround(rate * 300));
  }
}

TEST_CASE("rate-1 upsampling stays close to the input") {
  const SyntheticCloud shape = generate_synthetic(Shape::Torus, 400, 2);
  PipelineConfig config;
  config.rate = 1.0;
  config.patch_size = 128;
  const PointCloud out = upsample_cloud(shape.cloud, config);
  REQUIRE(out.size() == 400);
  const PointCloud noise = random_cloud(400, 3, 2.5f);
  const double cd_self = chamfer(out, shape.cloud);
  const double cd_noise = chamfer(noise, shape.cloud);
  CHECK(cd_self * 10.0 < cd_noise);
}

TEST_CASE("upsampling through a density file matches the grid it was given") {
  const SyntheticCloud shape = generate_synthetic(Shape::Sphere, 256, 4);
  const PointCloud normalized = normalize(shape.cloud);
  const VoxelGrid grid(32);
  write_density_grid("pipeline_density.bin", splat_density(normalized, grid, 1));

  PipelineConfig config;
  config.rate = 4.0;
  config.backend = DensityBackend::File;
  config.density_path = "pipeline_density.bin";
  const PointCloud out = upsample_cloud(shape.cloud, config);
  CHECK(out.size() == 1024);

  config.resolution = 16;  // mismatch with the stored 32^3 grid
  CHECK_THROWS_AS(upsample_cloud(shape.cloud, config), Error);
  std::remove("pipeline_density.bin");
}

TEST_CASE("diagnostics hit the trivial extremes") {
  // Field that samples exactly the occupied cells.
  const VoxelGrid grid(8);
  DensityField field;
  field.grid = grid;
  field.density.assign(std::size_t(grid.cell_count()), 0.f);
  field.occupancy_logit.assign(std::size_t(grid.cell_count()), -10.f);
  PointCloud gt;
  for (int i = 0; i < 8; i += 2) {
    const int c = grid.cell_index(i, 4, 4);
    field.density[std::size_t(c)] = 0.25f;
    field.occupancy_logit[std::size_t(c)] = 10.f;
    gt.points.push_back(grid.cell_center(c));
  }
  SamplerConfig base;
  base.rate = 1.0;
  const double multipliers[] = {1.0};
  const SampleMethod methods[] = {SampleMethod::ThresholdTopK};
  const auto rows = sampling_diagnostics(field, gt, multipliers, methods, base, 4);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].precision == 1.0);
  CHECK(rows[0].missing_rate == 0.0);

  // Ground truth far away from anything sampled.
  PointCloud far_gt;
  far_gt.points.push_back(grid.cell_center(grid.cell_index(7, 0, 0)));
  const auto far_rows = sampling_diagnostics(field, far_gt, multipliers, methods, base, 4);
  CHECK(far_rows[0].precision == 0.0);
  CHECK(far_rows[0].missing_rate == 1.0);
}

TEST_CASE("diagnostics at multiplier 4 miss less with density-guided fps than multinomial") {
  const auto planted = testsupport::make_planted_field();
  const double multipliers[] = {4.0};
  const SampleMethod methods[] = {SampleMethod::Multinomial, SampleMethod::MultinomialDfps};
  double missing[2] = {0, 0};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SamplerConfig base;
    base.rate = 4.0;
    base.seed = seed;
    const auto rows = sampling_diagnostics(planted.field, planted.ground_truth, multipliers,
                                           methods, base, 64);
    REQUIRE(rows.size() == 2);
    missing[0] += rows[0].missing_rate;
    missing[1] += rows[1].missing_rate;
  }
  CHECK(missing[1] < missing[0]);
}

TEST_CASE("method names round trip through the parser") {
  for (SampleMethod m : {SampleMethod::ThresholdTopK, SampleMethod::Multinomial,
                         SampleMethod::MultinomialFps, SampleMethod::MultinomialDfps}) {
    CHECK(parse_method(method_name(m)) == m);
  }
  CHECK_THROWS_AS(parse_method("bogus"), Error);
}

TEST_CASE("synthetic sphere samples lie on the unit sphere") {
  const SyntheticCloud shape = generate_synthetic(Shape::Sphere, 500, 5);
  REQUIRE(shape.cloud.size() == 500);
  for (const Vec3& p : shape.cloud.points) {
    CHECK(std::abs(dist(p, Vec3(0, 0, 0)) - 1.0) < 1e-6);
  }
}

TEST_CASE("synthetic torus and crease samples sit on their meshes") {
  for (Shape s : {Shape::Torus, Shape::PlaneWithCrease}) {
    const SyntheticCloud shape = generate_synthetic(s, 400, 6);
    REQUIRE(shape.cloud.size() == 400);
    const auto d = point_to_mesh(shape.cloud, shape.mesh);
    CHECK(d.mean < 1e-6);
  }
}

TEST_CASE("synthetic generation is deterministic and noise spreads the samples") {
  const SyntheticCloud a = generate_synthetic(Shape::Torus, 200, 7);
  const SyntheticCloud b = generate_synthetic(Shape::Torus, 200, 7);
  CHECK(a.cloud.points == b.cloud.points);
  SyntheticOptions options;
  options.noise_sigma = 0.05;
  const SyntheticCloud noisy = generate_synthetic(Shape::Torus, 200, 7, options);
  CHECK(point_to_mesh(noisy.cloud, a.mesh).mean > 1e-4);
}

TEST_CASE("end-to-end upsampling is byte-stable across thread counts") {
  const SyntheticCloud shape = generate_synthetic(Shape::Sphere, 512, 8);
  PipelineConfig config;
  config.rate = 4.0;
  config.seed = 9;
  setenv("VOXUP_THREADS", "1", 1);
  const PointCloud a = upsample_cloud(shape.cloud, config);
  setenv("VOXUP_THREADS", "5", 1);
  const PointCloud b = upsample_cloud(shape.cloud, config);
  unsetenv("VOXUP_THREADS");
  CHECK(a.points == b.points);
}
