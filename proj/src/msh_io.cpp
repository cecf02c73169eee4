#include "mc/msh_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace mc {

namespace {

std::string next_line(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        // strip \r and skip blank lines
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (!line.empty()) return line;
    }
    throw FormatError("unexpected end of MSH file");
}

void expect(std::istream& in, const std::string& token) {
    std::string line = next_line(in);
    if (line != token) throw FormatError("expected '" + token + "', got '" + line + "'");
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

Mesh load_msh(const std::string& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path + "'");
    return load_msh(in, warnings);
}

Mesh load_msh(std::istream& in, std::vector<std::string>* warnings) {
    expect(in, "$MeshFormat");
    {
        std::istringstream ls(next_line(in));
        std::string version;
        int file_type = -1, data_size = -1;
        ls >> version >> file_type >> data_size;
        if (version != "2.2" || file_type != 0)
            throw FormatError("unsupported MSH format '" + version + "' (need 2.2 ASCII)");
    }
    expect(in, "$EndMeshFormat");

    // skip optional $PhysicalNames section
    std::string section = next_line(in);
    if (section == "$PhysicalNames") {
        while (next_line(in) != "$EndPhysicalNames") {}
        section = next_line(in);
    }
    if (section != "$Nodes") throw FormatError("expected $Nodes");

    int n_nodes = std::stoi(next_line(in));
    std::vector<Vec2> verts(n_nodes);
    std::map<long, int> node_id; // file id -> index
    for (int i = 0; i < n_nodes; ++i) {
        std::istringstream ls(next_line(in));
        long id;
        double x, y, z;
        ls >> id >> x >> y >> z;
        if (!ls) throw FormatError("malformed node line");
        node_id[id] = i;
        verts[i] = Vec2(x, y);
    }
    expect(in, "$EndNodes");
    expect(in, "$Elements");

    int n_elems = std::stoi(next_line(in));
    std::vector<std::array<int, 3>> cells;
    std::vector<int> cell_groups;
    std::map<std::pair<int, int>, BoundaryTag> tags;
    for (int i = 0; i < n_elems; ++i) {
        std::istringstream ls(next_line(in));
        long id;
        int type, ntags;
        ls >> id >> type >> ntags;
        std::vector<int> etags(ntags);
        for (int k = 0; k < ntags; ++k) ls >> etags[k];
        int physical = ntags > 0 ? etags[0] : 0;
        if (type == 1) { // 2-node line
            long a, b;
            ls >> a >> b;
            if (physical < 1 || physical > 3)
                throw TaggingError("boundary line without physical group 1/2/3");
            int va = node_id.at(a), vb = node_id.at(b);
            auto key = va < vb ? std::make_pair(va, vb) : std::make_pair(vb, va);
            tags[key] = static_cast<BoundaryTag>(physical);
        } else if (type == 2) { // 3-node triangle
            long a, b, c;
            ls >> a >> b >> c;
            cells.push_back({node_id.at(a), node_id.at(b), node_id.at(c)});
            cell_groups.push_back(physical);
        } else if (type == 15) {
            // point element, ignore
        } else {
            throw FormatError("unsupported element type " + std::to_string(type));
        }
    }
    expect(in, "$EndElements");

    // orientation repair
    for (size_t ci = 0; ci < cells.size(); ++ci) {
        auto& c = cells[ci];
        const Vec2 &a = verts[c[0]], &b = verts[c[1]], &d = verts[c[2]];
        double area2 = (b.x() - a.x()) * (d.y() - a.y()) - (d.x() - a.x()) * (b.y() - a.y());
        if (area2 < 0) {
            std::swap(c[1], c[2]);
            if (warnings)
                warnings->push_back("repaired orientation of cell " + std::to_string(ci));
        }
    }

    std::vector<bool> flags(cells.size(), false);
    for (size_t ci = 0; ci < cells.size(); ++ci) flags[ci] = cell_groups[ci] == 2;

    return Mesh::create(std::move(verts), std::move(cells), tags, std::move(flags));
}

void write_msh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write '" + path + "'");
    write_msh(mesh, out);
}

void write_msh(const Mesh& mesh, std::ostream& out) {
    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
    out << "$Nodes\n" << mesh.n_vertices() << "\n";
    for (int i = 0; i < mesh.n_vertices(); ++i) {
        const Vec2& v = mesh.vertices()[i];
        out << (i + 1) << " " << format_double(v.x()) << " " << format_double(v.y()) << " 0\n";
    }
    out << "$EndNodes\n$Elements\n";
    out << mesh.boundary_edges().size() + mesh.cells().size() << "\n";
    long id = 1;
    for (const auto& be : mesh.boundary_edges())
        out << id++ << " 1 2 " << static_cast<int>(be.tag) << " " << static_cast<int>(be.tag)
            << " " << (be.a + 1) << " " << (be.b + 1) << "\n";
    for (int ci = 0; ci < mesh.n_cells(); ++ci) {
        const auto& c = mesh.cells()[ci];
        int group = mesh.subdomain_flags()[ci] ? 2 : 1;
        out << id++ << " 2 2 " << group << " " << group << " " << (c[0] + 1) << " " << (c[1] + 1)
            << " " << (c[2] + 1) << "\n";
    }
    out << "$EndElements\n";
}

} // namespace mc
