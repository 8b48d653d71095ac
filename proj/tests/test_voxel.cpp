#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "support.hpp"
#include "voxup/pointcloud.hpp"
#include "voxup/voxel.hpp"

using namespace voxup;
using testsupport::random_cloud;

TEST_CASE("cell indexing is a row-major bijection") {
  const VoxelGrid grid(8);
  std::vector<char> seen(std::size_t(grid.cell_count()), 0);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      for (int k = 0; k < 8; ++k) {
        const int c = grid.cell_index(i, j, k);
        REQUIRE(c >= 0);
        REQUIRE(c < grid.cell_count());
        CHECK(!seen[std::size_t(c)]);
        seen[std::size_t(c)] = 1;
        const auto back = grid.cell_coords(c);
        CHECK(back[0] == i);
        CHECK(back[1] == j);
        CHECK(back[2] == k);
      }
    }
  }
}

TEST_CASE("cell centers follow the lattice formula") {
  const VoxelGrid grid(4);
  const Vec3 c = grid.cell_center(grid.cell_index(0, 1, 3));
  CHECK(double(c.x) == doctest::Approx((0 + 0.5) / 4.0 - 0.5));
  CHECK(double(c.y) == doctest::Approx((1 + 0.5) / 4.0 - 0.5));
  CHECK(double(c.z) == doctest::Approx((3 + 0.5) / 4.0 - 0.5));
  CHECK(grid.cell_diagonal() == doctest::Approx(std::sqrt(3.0) / 4.0));
}

TEST_CASE("locate maps the +0.5 boundary to the last cell") {
  const VoxelGrid grid(4);
  CHECK(grid.locate(Vec3(0.5f, 0.5f, 0.5f)) == grid.cell_index(3, 3, 3));
  CHECK(grid.locate(Vec3(-0.5f, -0.5f, -0.5f)) == grid.cell_index(0, 0, 0));
  CHECK_THROWS_AS(grid.locate(Vec3(0.6f, 0.f, 0.f)), Error);
}

TEST_CASE("grid resolution bounds are enforced") {
  CHECK_THROWS_AS(VoxelGrid(0), Error);
  CHECK_THROWS_AS(VoxelGrid(65), Error);
  CHECK_NOTHROW(VoxelGrid(4));
  CHECK_NOTHROW(VoxelGrid(64));
}

TEST_CASE("a point at a grid vertex has one zero displacement row entry") {
  PointCloud cloud;
  cloud.points = {Vec3(0, 0, 0), Vec3(-0.4f, 0.3f, 0.1f)};
  const VoxelGrid grid(2);
  const auto out = grid_displacements(cloud, grid);
  REQUIRE(out.displacements.size() == 2);
  bool found_zero = false;
  for (const Vec3& d : out.displacements[0]) {
    if (d == Vec3(0, 0, 0)) found_zero = true;
  }
  CHECK(found_zero);
}

TEST_CASE("a point at a cell center has displacements of magnitude 1/(2R) per axis") {
  const VoxelGrid grid(4);
  PointCloud cloud;
  cloud.points = {grid.cell_center(grid.cell_index(1, 2, 0))};
  const auto out = grid_displacements(cloud, grid);
  for (const Vec3& d : out.displacements[0]) {
    CHECK(std::abs(std::abs(double(d.x)) - 0.125) < 1e-6);
    CHECK(std::abs(std::abs(double(d.y)) - 0.125) < 1e-6);
    CHECK(std::abs(std::abs(double(d.z)) - 0.125) < 1e-6);
  }
}

TEST_CASE("displacement output has one 8-vertex row per point") {
  const PointCloud cloud = normalize(random_cloud(37, 21));
  const auto out = grid_displacements(cloud, VoxelGrid(8));
  CHECK(out.displacements.size() == 37);
  CHECK(out.cell.size() == 37);
}

TEST_CASE("displacement components never exceed one cell side") {
  const PointCloud cloud = normalize(random_cloud(400, 22));
  const VoxelGrid grid(16);
  const auto out = grid_displacements(cloud, grid);
  for (const auto& row : out.displacements) {
    for (const Vec3& d : row) {
      CHECK(std::abs(double(d.x)) <= grid.cell_side() + 1e-9);
      CHECK(std::abs(double(d.y)) <= grid.cell_side() + 1e-9);
      CHECK(std::abs(double(d.z)) <= grid.cell_side() + 1e-9);
    }
  }
}

TEST_CASE("vertex plus displacement reproduces the point exactly") {
  const PointCloud cloud = normalize(random_cloud(100, 23));
  const VoxelGrid grid(8);
  const auto out = grid_displacements(cloud, grid);
  for (std::size_t p = 0; p < cloud.size(); ++p) {
    const auto c = grid.cell_coords(out.cell[p]);
    for (int v = 0; v < 8; ++v) {
      const int di = v >> 2, dj = (v >> 1) & 1, dk = v & 1;
      const Vec3 vertex(float(double(c[0] + di) / 8.0 - 0.5), float(double(c[1] + dj) / 8.0 - 0.5),
                        float(double(c[2] + dk) / 8.0 - 0.5));
      const Vec3 rebuilt = vertex + out.displacements[p][std::size_t(v)];
      CHECK(std::abs(double(rebuilt.x) - double(cloud.points[p].x)) < 1e-6);
      CHECK(std::abs(double(rebuilt.y) - double(cloud.points[p].y)) < 1e-6);
      CHECK(std::abs(double(rebuilt.z) - double(cloud.points[p].z)) < 1e-6);
    }
  }
}

TEST_CASE("grid_displacements rejects unnormalized input") {
  PointCloud cloud;
  cloud.points = {Vec3(1.5f, 0, 0)};
  CHECK_THROWS_AS(grid_displacements(cloud, VoxelGrid(4)), Error);
}

TEST_CASE("ground-truth density of a single point concentrates in one cell") {
  PointCloud cloud;
  cloud.points = {Vec3(0.1f, -0.2f, 0.3f)};
  const VoxelGrid grid(8);
  const auto field = density_ground_truth(cloud, grid);
  const int c = grid.locate(cloud.points[0]);
  for (int i = 0; i < grid.cell_count(); ++i) {
    if (i == c) {
      CHECK(field.density[std::size_t(i)] == 1.0f);
      CHECK(field.occupancy_logit[std::size_t(i)] == kHardLogit);
    } else {
      CHECK(field.density[std::size_t(i)] == 0.0f);
      CHECK(field.occupancy_logit[std::size_t(i)] == -kHardLogit);
    }
  }
}

TEST_CASE("ground-truth density sums to one on random clouds") {
  const auto field = density_ground_truth(normalize(random_cloud(333, 24)), VoxelGrid(16));
  const double sum = std::accumulate(field.density.begin(), field.density.end(), 0.0);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("ground-truth density splits 3/1 across two cells as 0.75/0.25") {
  const VoxelGrid grid(4);
  const Vec3 a = grid.cell_center(grid.cell_index(0, 0, 0));
  const Vec3 b = grid.cell_center(grid.cell_index(3, 3, 3));
  PointCloud cloud;
  cloud.points = {a, a, a, b};
  const auto field = density_ground_truth(cloud, grid);
  CHECK(field.density[std::size_t(grid.locate(a))] == doctest::Approx(0.75));
  CHECK(field.density[std::size_t(grid.locate(b))] == doctest::Approx(0.25));
  CHECK(field.provenance == Provenance::GroundTruth);
}

TEST_CASE("splat puts all mass in one cell for a point at its center") {
  const VoxelGrid grid(8);
  PointCloud cloud;
  cloud.points = {grid.cell_center(grid.cell_index(2, 5, 1))};
  const auto field = splat_density(cloud, grid, 0);
  CHECK(field.density[std::size_t(grid.cell_index(2, 5, 1))] == doctest::Approx(1.0));
}

TEST_CASE("splat spreads 1/8 mass to each of 8 cells for an equidistant point") {
  const VoxelGrid grid(8);
  // Corner shared by cells (3..4)^3: the normalized origin.
  PointCloud cloud;
  cloud.points = {Vec3(0, 0, 0)};
  const auto field = splat_density(cloud, grid, 0);
  for (int di = 3; di <= 4; ++di) {
    for (int dj = 3; dj <= 4; ++dj) {
      for (int dk = 3; dk <= 4; ++dk) {
        CHECK(field.density[std::size_t(grid.cell_index(di, dj, dk))] == doctest::Approx(0.125));
      }
    }
  }
}

TEST_CASE("splat is invariant to point order and sums to one") {
  const PointCloud cloud = normalize(random_cloud(250, 25));
  PointCloud reversed = cloud;
  std::reverse(reversed.points.begin(), reversed.points.end());
  const VoxelGrid grid(16);
  const auto a = splat_density(cloud, grid, 1);
  const auto b = splat_density(reversed, grid, 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.density.size(); ++i) {
    CHECK(a.density[i] == doctest::Approx(double(b.density[i])).epsilon(1e-6));
    sum += double(a.density[i]);
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("splat and ground truth agree on occupancy for cell-center points") {
  const VoxelGrid grid(8);
  PointCloud cloud;
  for (int i = 0; i < 8; i += 2) cloud.points.push_back(grid.cell_center(grid.cell_index(i, i, i)));
  const auto gt = density_ground_truth(cloud, grid);
  const auto sp = splat_density(cloud, grid, 0);
  for (int c = 0; c < grid.cell_count(); ++c) {
    CHECK((gt.density[std::size_t(c)] > 0) == (sp.density[std::size_t(c)] > 0));
  }
}
