#include "vtrecon/mesh_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "vtrecon/errors.hpp"

namespace vtrecon {

namespace {

long parse_index(const std::string& token, std::size_t vertex_count, std::size_t line_no) {
  const std::string head = token.substr(0, token.find('/'));
  long idx = 0;
  try {
    std::size_t used = 0;
    idx = std::stol(head, &used);
    if (used != head.size()) {
      throw std::invalid_argument(head);
    }
  } catch (const std::exception&) {
    throw IoError("obj line " + std::to_string(line_no) + ": bad face index '" + token + "'");
  }
  if (idx < 0) {
    idx = static_cast<long>(vertex_count) + idx;
  } else {
    idx -= 1;
  }
  if (idx < 0 || static_cast<std::size_t>(idx) >= vertex_count) {
    throw IoError("obj line " + std::to_string(line_no) + ": face index out of range");
  }
  return idx;
}

}  // namespace

TriangleMesh read_obj(std::istream& in) {
  std::vector<Vec3> verts;
  std::vector<Face> faces;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') {
      continue;
    }
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) {
        throw IoError("obj line " + std::to_string(line_no) + ": malformed vertex");
      }
      verts.push_back(p);
    } else if (tag == "f") {
      std::vector<VertexIndex> poly;
      std::string tok;
      while (ls >> tok) {
        poly.push_back(static_cast<VertexIndex>(parse_index(tok, verts.size(), line_no)));
      }
      if (poly.size() < 3) {
        throw IoError("obj line " + std::to_string(line_no) + ": face with fewer than 3 vertices");
      }
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
        faces.push_back({poly[0], poly[k], poly[k + 1]});
      }
    }
  }
  TriangleMesh mesh(std::move(verts), std::move(faces));
  mesh.validate();
  return mesh;
}

TriangleMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open mesh file " + path.string());
  }
  return read_obj(in);
}

void write_obj(std::ostream& out, const TriangleMesh& mesh) {
  out << std::setprecision(17);
  for (const Vec3& v : mesh.vertices()) {
    out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  }
  for (const Face& f : mesh.faces()) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
}

void save_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  write_obj(out, mesh);
  if (!out) {
    throw IoError("write failed for " + path.string());
  }
}

std::array<int, 3> uncertainty_color(double u) {
  const double c = std::clamp(u, 0.0, 1.0);
  const int red = static_cast<int>(std::lround(255.0 * c));
  return {red, 255 - red, 0};
}

void write_ply(std::ostream& out, const TriangleMesh& mesh, std::span<const double> uncertainty) {
  if (uncertainty.size() != mesh.vertex_count()) {
    throw ParameterError("uncertainty array does not match vertex count");
  }
  out << "ply\nformat ascii 1.0\n"
      << "element vertex " << mesh.vertex_count() << '\n'
      << "property float x\nproperty float y\nproperty float z\n"
      << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
      << "property float uncertainty\n"
      << "element face " << mesh.face_count() << '\n'
      << "property list uchar int vertex_indices\nend_header\n";
  out << std::setprecision(9);
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    const Vec3& v = mesh.vertex(i);
    const auto rgb = uncertainty_color(uncertainty[i]);
    out << v.x() << ' ' << v.y() << ' ' << v.z() << ' ' << rgb[0] << ' ' << rgb[1] << ' ' << rgb[2] << ' '
        << uncertainty[i] << '\n';
  }
  for (const Face& f : mesh.faces()) {
    out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  }
}

void save_ply(const std::filesystem::path& path, const TriangleMesh& mesh, std::span<const double> uncertainty) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  write_ply(out, mesh, uncertainty);
  if (!out) {
    throw IoError("write failed for " + path.string());
  }
}

}  // namespace vtrecon
