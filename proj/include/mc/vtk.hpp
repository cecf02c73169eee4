#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mc/fem.hpp"

namespace mc {

/// Legacy ASCII VTK (UNSTRUCTURED_GRID) snapshot: the triangulation, the
/// subdomain flag as cell data, and the given fields sampled at vertices.
/// Scalar entries expect P1/P2 fields, vector entries P2Vec fields.
void write_vtk(const std::string& path, const Mesh& mesh,
               const std::vector<std::pair<std::string, const DiscreteField*>>& scalars = {},
               const std::vector<std::pair<std::string, const DiscreteField*>>& vectors = {});

} // namespace mc
