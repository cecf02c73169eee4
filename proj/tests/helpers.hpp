#pragma once

#include <map>

#include "mc/state.hpp"

namespace mc::testing {

// Copy of a mesh with the subdomain flag set on every cell whose centroid
// lies in [x0,x1]x[y0,y1].
inline Mesh with_subdomain(const Mesh& m, double x0, double x1, double y0, double y1) {
    std::map<std::pair<int, int>, BoundaryTag> tags;
    for (const auto& be : m.boundary_edges())
        tags[{std::min(be.a, be.b), std::max(be.a, be.b)}] = be.tag;
    std::vector<bool> flags(m.n_cells(), false);
    for (int c = 0; c < m.n_cells(); ++c) {
        const auto& cell = m.cells()[c];
        Vec2 cen = (m.vertices()[cell[0]] + m.vertices()[cell[1]] + m.vertices()[cell[2]]) / 3.0;
        flags[c] = cen.x() > x0 && cen.x() < x1 && cen.y() > y0 && cen.y() < y1;
    }
    return Mesh::create(m.vertices(), m.cells(), tags, std::move(flags));
}

// Parabolic inflow on the unit-square channel (left inlet, right outlet,
// top/bottom walls); the exact Taylor-Hood solution is u = (y(1-y), 0),
// p = 2(1-x).
inline BoundaryData poiseuille_data() {
    BoundaryData data;
    data.u_in = VectorData::parse("y*(1-y)", "0");
    data.T_in = ScalarData::parse("0");
    data.T_wall = ScalarData::parse("2");
    return data;
}

// Rectangle with a one-dimensional temperature solution T = y: Dirichlet
// T = 0 on the bottom (inlet), Robin on the top (wall), natural sides
// (outlet), zero velocity.
inline Mesh robin_square(int n) {
    return generate_rectangle(0, 0, 1, 1, n, n, [](const Vec2& mid) {
        if (mid.y() < 1e-12) return BoundaryTag::Inlet;
        if (mid.y() > 1 - 1e-12) return BoundaryTag::Wall;
        return BoundaryTag::Outlet;
    });
}

inline BoundaryData robin_data() {
    BoundaryData data; // zero inflow: pure diffusion
    data.T_wall = ScalarData::parse("2");
    return data;
}

// Wall-moving direction for derivative tests: vertical displacement growing
// with y, so the bottom wall stays put and the shape actually changes.
inline AdmissibleField top_wall_field() {
    return AdmissibleField::from_expr(VectorData::parse("0", "y*y*cut((x-0.5)/0.35)"));
}

} // namespace mc::testing
