#include "voxup/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace voxup {

namespace {

std::string lowercase_ext(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  return ext;
}

PointFormat resolve_format(const std::string& path, PointFormat format) {
  if (format != PointFormat::Auto) return format;
  const std::string ext = lowercase_ext(path);
  if (ext == "ply") return PointFormat::Ply;
  return PointFormat::Xyz;
}

[[noreturn]] void parse_fail(const std::string& path, long line, const std::string& msg) {
  throw Error(path + ":" + std::to_string(line) + ": " + msg);
}

bool parse_float(const std::string& tok, float& out) {
  char* end = nullptr;
  out = std::strtof(tok.c_str(), &end);
  return end != tok.c_str() && *end == '\0';
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream is(line);
  std::string t;
  while (is >> t) toks.push_back(t);
  return toks;
}

PointCloud read_xyz(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  PointCloud cloud;
  std::string line;
  long lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks.size() < 3) parse_fail(path, lineno, "expected 3 coordinates");
    Vec3 p;
    for (int a = 0; a < 3; ++a) {
      if (!parse_float(toks[std::size_t(a)], p[a])) {
        parse_fail(path, lineno, "invalid number '" + toks[std::size_t(a)] + "'");
      }
    }
    cloud.points.push_back(p);
  }
  if (cloud.empty()) throw Error(path + ": no points");
  return cloud;
}

void write_xyz(const std::string& path, const PointCloud& cloud) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  char buf[96];
  for (const Vec3& p : cloud.points) {
    // %.9g round-trips IEEE f32 exactly.
    std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", double(p.x), double(p.y), double(p.z));
    os << buf;
  }
  if (!os) throw Error("write failed: " + path);
}

struct PlyElement {
  std::string name;
  long count = 0;
  std::vector<std::string> properties;  // scalar property names, "" for lists
  bool has_list = false;
};

struct PlyData {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<std::array<int, 4>> quads;
};

PlyData read_ply(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  std::string line;
  long lineno = 0;

  auto next_line = [&]() -> bool {
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };

  if (!next_line() || tokenize(line) != std::vector<std::string>{"ply"}) {
    parse_fail(path, lineno, "missing ply magic");
  }

  std::vector<PlyElement> elements;
  bool ascii = false;
  while (next_line()) {
    auto toks = tokenize(line);
    if (toks.empty() || toks[0] == "comment") continue;
    if (toks[0] == "format") {
      if (toks.size() < 2 || toks[1] != "ascii") parse_fail(path, lineno, "only ascii PLY supported");
      ascii = true;
    } else if (toks[0] == "element") {
      if (toks.size() < 3) parse_fail(path, lineno, "malformed element");
      elements.push_back(PlyElement{toks[1], std::stol(toks[2]), {}, false});
    } else if (toks[0] == "property") {
      if (elements.empty() || toks.size() < 3) parse_fail(path, lineno, "property outside element");
      if (toks[1] == "list") {
        elements.back().has_list = true;
        elements.back().properties.push_back("");
      } else {
        elements.back().properties.push_back(toks.back());
      }
    } else if (toks[0] == "end_header") {
      break;
    }
  }
  if (!ascii) parse_fail(path, lineno, "missing format line");

  PlyData data;
  for (const PlyElement& elem : elements) {
    if (elem.name == "vertex") {
      int ix = -1, iy = -1, iz = -1;
      for (int i = 0; i < int(elem.properties.size()); ++i) {
        if (elem.properties[std::size_t(i)] == "x") ix = i;
        if (elem.properties[std::size_t(i)] == "y") iy = i;
        if (elem.properties[std::size_t(i)] == "z") iz = i;
      }
      if (ix < 0 || iy < 0 || iz < 0) parse_fail(path, lineno, "vertex element lacks x/y/z");
      for (long v = 0; v < elem.count; ++v) {
        if (!next_line()) parse_fail(path, lineno, "truncated vertex data");
        const auto toks = tokenize(line);
        if (int(toks.size()) < int(elem.properties.size())) {
          parse_fail(path, lineno, "short vertex row");
        }
        Vec3 p;
        if (!parse_float(toks[std::size_t(ix)], p.x) || !parse_float(toks[std::size_t(iy)], p.y) ||
            !parse_float(toks[std::size_t(iz)], p.z)) {
          parse_fail(path, lineno, "invalid vertex coordinate");
        }
        data.vertices.push_back(p);
      }
    } else if (elem.name == "face") {
      for (long f = 0; f < elem.count; ++f) {
        if (!next_line()) parse_fail(path, lineno, "truncated face data");
        const auto toks = tokenize(line);
        if (toks.empty()) parse_fail(path, lineno, "empty face row");
        const int n = std::stoi(toks[0]);
        if (int(toks.size()) < n + 1) parse_fail(path, lineno, "short face row");
        if (n == 3) {
          data.faces.push_back({std::stoi(toks[1]), std::stoi(toks[2]), std::stoi(toks[3])});
        } else if (n == 4) {
          data.quads.push_back(
              {std::stoi(toks[1]), std::stoi(toks[2]), std::stoi(toks[3]), std::stoi(toks[4])});
        } else {
          parse_fail(path, lineno, "unsupported face arity " + std::to_string(n));
        }
      }
    } else {
      for (long v = 0; v < elem.count; ++v) {
        if (!next_line()) parse_fail(path, lineno, "truncated element data");
      }
    }
  }
  return data;
}

void write_ply_points(const std::string& path, const PointCloud& cloud) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << "ply\nformat ascii 1.0\n";
  os << "element vertex " << cloud.size() << "\n";
  os << "property float x\nproperty float y\nproperty float z\n";
  os << "end_header\n";
  char buf[96];
  for (const Vec3& p : cloud.points) {
    std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", double(p.x), double(p.y), double(p.z));
    os << buf;
  }
  if (!os) throw Error("write failed: " + path);
}

double face_area(const TriangleMesh& mesh, const std::array<int, 3>& f) {
  const Vec3& a = mesh.vertices[std::size_t(f[0])];
  const Vec3& b = mesh.vertices[std::size_t(f[1])];
  const Vec3& c = mesh.vertices[std::size_t(f[2])];
  const double ux = double(b.x) - a.x, uy = double(b.y) - a.y, uz = double(b.z) - a.z;
  const double vx = double(c.x) - a.x, vy = double(c.y) - a.y, vz = double(c.z) - a.z;
  const double cx = uy * vz - uz * vy, cy = uz * vx - ux * vz, cz = ux * vy - uy * vx;
  return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
}

void finalize_mesh(TriangleMesh& mesh, const std::string& path) {
  const int nv = int(mesh.vertices.size());
  std::vector<std::array<int, 3>> kept;
  kept.reserve(mesh.faces.size());
  for (const auto& f : mesh.faces) {
    for (int idx : f) {
      if (idx < 0 || idx >= nv) throw Error(path + ": face index out of range");
    }
    if (face_area(mesh, f) > 0.0) kept.push_back(f);
  }
  mesh.faces = std::move(kept);
  if (mesh.faces.empty()) throw Error(path + ": mesh has no non-degenerate triangles");
}

TriangleMesh read_obj(const std::string& path, bool triangulate_quads) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  TriangleMesh mesh;
  std::string line;
  long lineno = 0;

  auto vertex_index = [&](const std::string& tok) {
    const auto slash = tok.find('/');
    const std::string head = slash == std::string::npos ? tok : tok.substr(0, slash);
    long idx = std::stol(head);
    if (idx < 0) idx = long(mesh.vertices.size()) + idx + 1;
    if (idx < 1 || idx > long(mesh.vertices.size())) {
      parse_fail(path, lineno, "face index out of range");
    }
    return int(idx - 1);
  };

  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks[0] == "v") {
      if (toks.size() < 4) parse_fail(path, lineno, "short vertex line");
      Vec3 p;
      for (int a = 0; a < 3; ++a) {
        if (!parse_float(toks[std::size_t(a + 1)], p[a])) {
          parse_fail(path, lineno, "invalid vertex coordinate");
        }
      }
      mesh.vertices.push_back(p);
    } else if (toks[0] == "f") {
      const int n = int(toks.size()) - 1;
      if (n < 3) parse_fail(path, lineno, "face with fewer than 3 vertices");
      if (n > 3 && !triangulate_quads) parse_fail(path, lineno, "triangles only");
      std::vector<int> idx;
      idx.reserve(std::size_t(n));
      for (int i = 0; i < n; ++i) idx.push_back(vertex_index(toks[std::size_t(i + 1)]));
      for (int i = 1; i + 1 < n; ++i) mesh.faces.push_back({idx[0], idx[std::size_t(i)], idx[std::size_t(i + 1)]});
    }
    // Other directives (vn, vt, o, g, usemtl, ...) are ignored.
  }
  finalize_mesh(mesh, path);
  return mesh;
}

}  // namespace

PointCloud read_pointcloud(const std::string& path, PointFormat format) {
  if (resolve_format(path, format) == PointFormat::Xyz) return read_xyz(path);
  const PlyData data = read_ply(path);
  if (data.vertices.empty()) throw Error(path + ": no points");
  PointCloud cloud;
  cloud.points = data.vertices;
  return cloud;
}

void write_pointcloud(const std::string& path, const PointCloud& cloud, PointFormat format) {
  if (cloud.empty()) throw Error("write_pointcloud: empty cloud");
  if (resolve_format(path, format) == PointFormat::Xyz) {
    write_xyz(path, cloud);
  } else {
    write_ply_points(path, cloud);
  }
}

TriangleMesh read_mesh(const std::string& path, bool triangulate_quads) {
  const std::string ext = lowercase_ext(path);
  if (ext == "obj") return read_obj(path, triangulate_quads);
  if (ext == "ply") {
    const PlyData data = read_ply(path);
    TriangleMesh mesh;
    mesh.vertices = data.vertices;
    mesh.faces = data.faces;
    if (!data.quads.empty()) {
      if (!triangulate_quads) throw Error(path + ": triangles only");
      for (const auto& q : data.quads) {
        mesh.faces.push_back({q[0], q[1], q[2]});
        mesh.faces.push_back({q[0], q[2], q[3]});
      }
    }
    finalize_mesh(mesh, path);
    return mesh;
  }
  throw Error("read_mesh: unsupported extension ." + ext);
}

void write_mesh(const std::string& path, const TriangleMesh& mesh) {
  const std::string ext = lowercase_ext(path);
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  char buf[96];
  if (ext == "obj") {
    for (const Vec3& v : mesh.vertices) {
      std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", double(v.x), double(v.y), double(v.z));
      os << buf;
    }
    for (const auto& f : mesh.faces) {
      os << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
    }
  } else if (ext == "ply") {
    os << "ply\nformat ascii 1.0\n";
    os << "element vertex " << mesh.vertices.size() << "\n";
    os << "property float x\nproperty float y\nproperty float z\n";
    os << "element face " << mesh.faces.size() << "\n";
    os << "property list uchar int vertex_indices\n";
    os << "end_header\n";
    for (const Vec3& v : mesh.vertices) {
      std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", double(v.x), double(v.y), double(v.z));
      os << buf;
    }
    for (const auto& f : mesh.faces) {
      os << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
    }
  } else {
    throw Error("write_mesh: unsupported extension ." + ext);
  }
  if (!os) throw Error("write failed: " + path);
}

namespace {

constexpr char kGridMagic[4] = {'P', 'U', 'V', 'X'};
constexpr std::uint32_t kGridVersion = 1;

}  // namespace

DensityField read_density_grid(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kGridMagic, 4) != 0) throw Error(path + ": bad magic");
  std::uint32_t version = 0, resolution = 0;
  is.read(reinterpret_cast<char*>(&version), 4);
  is.read(reinterpret_cast<char*>(&resolution), 4);
  if (!is || version != kGridVersion) throw Error(path + ": unsupported version");
  if (resolution < 1 || resolution > 64) throw Error(path + ": invalid resolution");

  DensityField field;
  field.grid = VoxelGrid(int(resolution));
  field.provenance = Provenance::ExternalFile;
  const std::size_t n = std::size_t(field.grid.cell_count());
  field.density.resize(n);
  field.occupancy_logit.resize(n);
  is.read(reinterpret_cast<char*>(field.density.data()), std::streamsize(n * 4));
  is.read(reinterpret_cast<char*>(field.occupancy_logit.data()), std::streamsize(n * 4));
  if (!is) throw Error(path + ": truncated density grid");
  return field;
}

void write_density_grid(const std::string& path, const DensityField& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os.write(kGridMagic, 4);
  os.write(reinterpret_cast<const char*>(&kGridVersion), 4);
  const std::uint32_t resolution = std::uint32_t(field.grid.resolution);
  os.write(reinterpret_cast<const char*>(&resolution), 4);
  os.write(reinterpret_cast<const char*>(field.density.data()),
           std::streamsize(field.density.size() * 4));
  os.write(reinterpret_cast<const char*>(field.occupancy_logit.data()),
           std::streamsize(field.occupancy_logit.size() * 4));
  if (!os) throw Error("write failed: " + path);
}

}  // namespace voxup
