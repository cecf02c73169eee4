#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mc/mesh.hpp"

namespace mc {

/// Reads a Gmsh MSH 2.2 ASCII file. Physical groups 1/2/3 on boundary lines
/// map to Inlet/Outlet/Wall; triangles with physical surface group 2 are
/// flagged as the subdomain (group 1 or untagged triangles are bulk).
/// z-coordinates of 0 are accepted and dropped. Inverted cells are repaired
/// by a vertex swap; a note is appended to `warnings` if given.
Mesh load_msh(const std::string& path, std::vector<std::string>* warnings = nullptr);
Mesh load_msh(std::istream& in, std::vector<std::string>* warnings = nullptr);

/// Debug helper; load_msh(write_msh(mesh)) round-trips bit-exactly.
void write_msh(const Mesh& mesh, const std::string& path);
void write_msh(const Mesh& mesh, std::ostream& out);

} // namespace mc
