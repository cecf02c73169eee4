#include "mc/vtk.hpp"

#include <cstdio>
#include <fstream>

namespace mc {

void write_vtk(const std::string& path, const Mesh& mesh,
               const std::vector<std::pair<std::string, const DiscreteField*>>& scalars,
               const std::vector<std::pair<std::string, const DiscreteField*>>& vectors) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    char buf[128];

    out << "# vtk DataFile Version 3.0\n";
    out << "microchannel snapshot\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.n_vertices() << " double\n";
    for (const auto& v : mesh.vertices()) {
        std::snprintf(buf, sizeof(buf), "%.12g %.12g 0\n", v.x(), v.y());
        out << buf;
    }
    out << "CELLS " << mesh.n_cells() << " " << 4 * mesh.n_cells() << "\n";
    for (const auto& c : mesh.cells()) out << "3 " << c[0] << " " << c[1] << " " << c[2] << "\n";
    out << "CELL_TYPES " << mesh.n_cells() << "\n";
    for (int i = 0; i < mesh.n_cells(); ++i) out << "5\n";

    out << "CELL_DATA " << mesh.n_cells() << "\n";
    out << "SCALARS subdomain int 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < mesh.n_cells(); ++i) out << (mesh.subdomain_flags()[i] ? 1 : 0) << "\n";

    if (scalars.empty() && vectors.empty()) return;
    out << "POINT_DATA " << mesh.n_vertices() << "\n";
    for (const auto& [name, field] : scalars) {
        out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        // P1 and P2 scalar dofs both enumerate vertices first
        for (int v = 0; v < mesh.n_vertices(); ++v) {
            std::snprintf(buf, sizeof(buf), "%.12g\n", field->coeffs[v]);
            out << buf;
        }
    }
    for (const auto& [name, field] : vectors) {
        out << "VECTORS " << name << " double\n";
        for (int v = 0; v < mesh.n_vertices(); ++v) {
            std::snprintf(buf, sizeof(buf), "%.12g %.12g 0\n", field->coeffs[2 * v],
                          field->coeffs[2 * v + 1]);
            out << buf;
        }
    }
}

} // namespace mc
