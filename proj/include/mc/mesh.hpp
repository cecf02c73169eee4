#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mc/errors.hpp"

namespace mc {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Boundary tag codes are part of the MSH wire format and must not change.
enum class BoundaryTag : int { Inlet = 1, Outlet = 2, Wall = 3 };

inline const char* to_string(BoundaryTag t) {
    switch (t) {
        case BoundaryTag::Inlet: return "inlet";
        case BoundaryTag::Outlet: return "outlet";
        case BoundaryTag::Wall: return "wall";
    }
    return "?";
}

/// Oriented boundary edge: a -> b counterclockwise around the domain,
/// so the outward unit normal is (d.y, -d.x)/|d| with d = b - a.
struct BoundaryEdge {
    int a = -1;
    int b = -1;
    BoundaryTag tag = BoundaryTag::Wall;
    int cell = -1; // adjacent cell
};

struct QualityReport {
    double min_angle = 0.0;      // degrees, over all cells
    double min_area_ratio = 0.0; // min cell area / mean cell area
    int worst_cell = -1;         // cell attaining min_angle
};

/// Immutable triangulated 2D domain with inlet/outlet/wall facet tags and a
/// per-cell microchannel-subdomain flag. Construction validates conformity,
/// orientation, and boundary tagging; afterwards the mesh is safe for
/// concurrent read access.
class Mesh {
public:
    /// Validating constructor. `facet_tags` maps sorted vertex pairs of
    /// boundary edges to tags; every boundary edge must be covered and no
    /// interior edge may appear.
    static Mesh create(std::vector<Vec2> vertices,
                       std::vector<std::array<int, 3>> cells,
                       const std::map<std::pair<int, int>, BoundaryTag>& facet_tags,
                       std::vector<bool> subdomain_flags);

    const std::vector<Vec2>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& cells() const { return cells_; }
    const std::vector<bool>& subdomain_flags() const { return subdomain_flags_; }
    const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }

    int n_vertices() const { return static_cast<int>(vertices_.size()); }
    int n_cells() const { return static_cast<int>(cells_.size()); }

    /// Unique undirected edges (for P2 dof layout).
    int n_edges() const { return static_cast<int>(edges_.size()); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    /// Global edge index for the local edge (v_i, v_{i+1 mod 3}) of a cell.
    int cell_edge(int cell, int local_edge) const { return cell_edges_[cell][local_edge]; }
    /// Global edge index for a vertex pair; -1 if no such edge.
    int edge_index(int va, int vb) const;

    double cell_area(int cell) const;
    double total_area() const;
    /// Sum of boundary edge lengths for one tag (or all, if tag < 0).
    double boundary_length(int tag = -1) const;

    QualityReport quality() const;

    /// Realizes the transported domain: vertex i moves to x_i + t * d_i.
    /// Tags, flags, and connectivity are carried over unchanged. Throws
    /// InversionError if any resulting cell has signed area <= 0.
    Mesh deformed(const std::vector<Vec2>& displacement, double t = 1.0) const;

    /// Vertices lying on edges of the given tag.
    std::vector<int> tagged_vertices(BoundaryTag tag) const;

private:
    Mesh() = default;
    void build_topology(const std::map<std::pair<int, int>, BoundaryTag>& facet_tags);

    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> cells_;
    std::vector<bool> subdomain_flags_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::array<int, 3>> cell_edges_;
    std::vector<BoundaryEdge> boundary_edges_;
    std::map<std::pair<int, int>, int> edge_lookup_;
};

/// Rectangle [0,L]x[0,H] with `n_fins` rectangular fins attached to the top
/// wall, evenly spaced; the gaps between fins are the channels and the band
/// below the top wall (fin-height deep) minus the fins is flagged as the
/// subdomain. Left edge is Inlet, right edge Outlet, everything else Wall.
Mesh generate_channel_array(double length, double height, int n_fins,
                            double fin_width, double fin_height, double h_target);

/// Structured rectangle mesh with a caller-supplied boundary tagger
/// (midpoint of each boundary edge -> tag). Handy for manufactured cases
/// whose inlet is not the left edge.
Mesh generate_rectangle(double x0, double y0, double x1, double y1, int nx, int ny,
                        const std::function<BoundaryTag(const Vec2&)>& tagger);

/// Unit square, left = Inlet, right = Outlet, top/bottom = Wall.
Mesh unit_square_mesh(int n);

} // namespace mc
