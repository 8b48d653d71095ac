#include "voxup/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "voxup/rng.hpp"

namespace voxup {

namespace {

constexpr double kPi = 3.14159265358979323846;

TriangleMesh icosphere(int subdivisions, double radius) {
  // Icosahedron base.
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<std::array<double, 3>> verts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},
      {5, 11, 4}, {11, 10, 2}, {10, 7, 6},  {7, 1, 8},  {3, 9, 4},   {3, 4, 2},
      {3, 2, 6},  {3, 6, 8},  {3, 8, 9},   {4, 9, 5},  {2, 4, 11},  {6, 2, 10},
      {8, 6, 7},  {9, 8, 1}};

  auto project = [&](std::array<double, 3>& v) {
    const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    for (double& c : v) c = c / len * radius;
  };
  for (auto& v : verts) project(v);

  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      const auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      std::array<double, 3> m = {(verts[std::size_t(a)][0] + verts[std::size_t(b)][0]) / 2,
                                 (verts[std::size_t(a)][1] + verts[std::size_t(b)][1]) / 2,
                                 (verts[std::size_t(a)][2] + verts[std::size_t(b)][2]) / 2};
      project(m);
      verts.push_back(m);
      const int idx = int(verts.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  TriangleMesh mesh;
  mesh.vertices.reserve(verts.size());
  for (const auto& v : verts) mesh.vertices.push_back(Vec3(float(v[0]), float(v[1]), float(v[2])));
  mesh.faces = faces;
  return mesh;
}

TriangleMesh torus_mesh(double major, double minor, int segments) {
  TriangleMesh mesh;
  const int nu = segments, nv = std::max(8, segments / 2);
  mesh.vertices.reserve(std::size_t(nu) * std::size_t(nv));
  for (int i = 0; i < nu; ++i) {
    const double u = 2.0 * kPi * i / nu;
    for (int j = 0; j < nv; ++j) {
      const double v = 2.0 * kPi * j / nv;
      const double x = (major + minor * std::cos(v)) * std::cos(u);
      const double y = (major + minor * std::cos(v)) * std::sin(u);
      const double z = minor * std::sin(v);
      mesh.vertices.push_back(Vec3(float(x), float(y), float(z)));
    }
  }
  auto vid = [&](int i, int j) { return (i % nu) * nv + (j % nv); };
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      mesh.faces.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      mesh.faces.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }
  return mesh;
}

// Two unit squares sharing the y-axis edge, folded by the crease angle.
TriangleMesh crease_mesh(double angle_deg) {
  const double a = angle_deg * kPi / 180.0;
  const double cx = std::cos(a), cz = std::sin(a);
  TriangleMesh mesh;
  mesh.vertices = {
      Vec3(-1.f, -0.5f, 0.f), Vec3(0.f, -0.5f, 0.f), Vec3(-1.f, 0.5f, 0.f),
      Vec3(0.f, 0.5f, 0.f),   Vec3(float(cx), -0.5f, float(cz)), Vec3(float(cx), 0.5f, float(cz))};
  mesh.faces = {{0, 1, 3}, {0, 3, 2}, {1, 4, 5}, {1, 5, 3}};
  return mesh;
}

}  // namespace

SyntheticCloud generate_synthetic(Shape shape, int n, std::uint64_t seed,
                                  const SyntheticOptions& options) {
  if (n < 4) throw Error("generate_synthetic: n must be >= 4");

  SyntheticCloud out;
  switch (shape) {
    case Shape::Sphere:
      out.mesh = icosphere(options.sphere_subdivisions, 1.0);
      break;
    case Shape::Torus:
      out.mesh = torus_mesh(options.torus_major, options.torus_minor, options.torus_segments);
      break;
    case Shape::PlaneWithCrease:
      out.mesh = crease_mesh(options.crease_angle_deg);
      break;
  }

  out.cloud = sample_mesh_surface(out.mesh, n, substream(seed, 11));
  if (shape == Shape::Sphere) {
    // Push samples from the chordal mesh onto the true sphere.
    for (Vec3& p : out.cloud.points) {
      const double len = std::sqrt(sqdist(p, Vec3(0, 0, 0)));
      if (len > 0.0) p = p * float(1.0 / len);
    }
  }

  if (options.noise_sigma > 0.0) {
    const std::uint64_t s = substream(seed, 12);
    std::uint64_t counter = 0;
    for (Vec3& p : out.cloud.points) {
      for (int a = 0; a < 3; ++a) {
        p[a] += float(options.noise_sigma * counter_normal(s, counter++));
      }
    }
  }
  return out;
}

Shape parse_shape(const std::string& name) {
  if (name == "sphere") return Shape::Sphere;
  if (name == "torus") return Shape::Torus;
  if (name == "plane-with-crease" || name == "crease") return Shape::PlaneWithCrease;
  throw Error("unknown shape '" + name + "'");
}

}  // namespace voxup
