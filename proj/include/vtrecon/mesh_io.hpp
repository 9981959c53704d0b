#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>

#include "vtrecon/mesh.hpp"

namespace vtrecon {

/// ASCII Wavefront OBJ: `v` and `f` records only. Polygons are fan
/// triangulated; `f a/b/c` style references use the position index; negative
/// indices count back from the last vertex. Throws IoError on malformed
/// input and GeometryError when the result is not a valid connected mesh.
TriangleMesh read_obj(std::istream& in);
TriangleMesh load_obj(const std::filesystem::path& path);

void write_obj(std::ostream& out, const TriangleMesh& mesh);
void save_obj(const std::filesystem::path& path, const TriangleMesh& mesh);

/// ASCII PLY with per-vertex `uncertainty` and a red/green color ramp
/// (red = 1, green = 0). `uncertainty` must match the vertex count.
void write_ply(std::ostream& out, const TriangleMesh& mesh, std::span<const double> uncertainty);
void save_ply(const std::filesystem::path& path, const TriangleMesh& mesh, std::span<const double> uncertainty);

/// 8-bit (red, green, blue) for an uncertainty value clamped to [0, 1].
std::array<int, 3> uncertainty_color(double u);

}  // namespace vtrecon
