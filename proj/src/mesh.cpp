#include "mc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace mc {

namespace {

std::pair<int, int> sorted_pair(int a, int b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

} // namespace

Mesh Mesh::create(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells,
                  const std::map<std::pair<int, int>, BoundaryTag>& facet_tags,
                  std::vector<bool> subdomain_flags) {
    Mesh m;
    m.vertices_ = std::move(vertices);
    m.cells_ = std::move(cells);
    if (subdomain_flags.empty())
        subdomain_flags.assign(m.cells_.size(), false);
    if (subdomain_flags.size() != m.cells_.size())
        throw GeometryError("subdomain flag count does not match cell count");
    m.subdomain_flags_ = std::move(subdomain_flags);

    const int nv = m.n_vertices();
    for (const auto& c : m.cells_) {
        for (int v : c)
            if (v < 0 || v >= nv) throw GeometryError("cell references unknown vertex");
        double area = signed_area(m.vertices_[c[0]], m.vertices_[c[1]], m.vertices_[c[2]]);
        if (area <= 0.0) throw GeometryError("cell with non-positive signed area");
    }

    m.build_topology(facet_tags);
    return m;
}

void Mesh::build_topology(const std::map<std::pair<int, int>, BoundaryTag>& facet_tags) {
    edges_.clear();
    edge_lookup_.clear();
    cell_edges_.assign(cells_.size(), {-1, -1, -1});
    // edge -> (count, owning cell of the ccw orientation, oriented pair)
    std::map<std::pair<int, int>, int> edge_count;
    std::map<std::pair<int, int>, std::tuple<int, int, int>> edge_owner; // cell, a, b

    for (int ci = 0; ci < n_cells(); ++ci) {
        const auto& c = cells_[ci];
        for (int e = 0; e < 3; ++e) {
            int a = c[e], b = c[(e + 1) % 3];
            auto key = sorted_pair(a, b);
            auto it = edge_lookup_.find(key);
            int idx;
            if (it == edge_lookup_.end()) {
                idx = static_cast<int>(edges_.size());
                edges_.push_back(key);
                edge_lookup_[key] = idx;
            } else {
                idx = it->second;
            }
            cell_edges_[ci][e] = idx;
            edge_count[key]++;
            edge_owner[key] = {ci, a, b};
        }
    }
    for (const auto& [key, cnt] : edge_count)
        if (cnt > 2) throw GeometryError("non-conforming mesh: edge shared by more than two cells");

    boundary_edges_.clear();
    std::set<std::pair<int, int>> boundary_keys;
    for (const auto& [key, cnt] : edge_count) {
        if (cnt != 1) continue;
        boundary_keys.insert(key);
        auto it = facet_tags.find(key);
        if (it == facet_tags.end())
            throw TaggingError("boundary edge (" + std::to_string(key.first) + "," +
                               std::to_string(key.second) + ") carries no tag");
        auto [cell, a, b] = edge_owner[key];
        boundary_edges_.push_back({a, b, it->second, cell});
    }
    for (const auto& [key, tag] : facet_tags) {
        (void)tag;
        if (!boundary_keys.count(key))
            throw TaggingError("tag on non-boundary edge (" + std::to_string(key.first) + "," +
                               std::to_string(key.second) + ")");
    }

    bool has[4] = {false, false, false, false};
    for (const auto& be : boundary_edges_) has[static_cast<int>(be.tag)] = true;
    if (!has[1] || !has[2] || !has[3])
        throw TaggingError("each of Inlet, Outlet, Wall must be nonempty");
}

int Mesh::edge_index(int va, int vb) const {
    auto it = edge_lookup_.find(sorted_pair(va, vb));
    return it == edge_lookup_.end() ? -1 : it->second;
}

double Mesh::cell_area(int cell) const {
    const auto& c = cells_[cell];
    return signed_area(vertices_[c[0]], vertices_[c[1]], vertices_[c[2]]);
}

double Mesh::total_area() const {
    double s = 0.0;
    for (int i = 0; i < n_cells(); ++i) s += cell_area(i);
    return s;
}

double Mesh::boundary_length(int tag) const {
    double s = 0.0;
    for (const auto& be : boundary_edges_) {
        if (tag >= 0 && static_cast<int>(be.tag) != tag) continue;
        s += (vertices_[be.b] - vertices_[be.a]).norm();
    }
    return s;
}

QualityReport Mesh::quality() const {
    QualityReport r;
    r.min_angle = 180.0;
    double min_area = std::numeric_limits<double>::max();
    double mean_area = total_area() / std::max(1, n_cells());
    for (int ci = 0; ci < n_cells(); ++ci) {
        const auto& c = cells_[ci];
        min_area = std::min(min_area, cell_area(ci));
        for (int k = 0; k < 3; ++k) {
            Vec2 p = vertices_[c[k]];
            Vec2 u = vertices_[c[(k + 1) % 3]] - p;
            Vec2 v = vertices_[c[(k + 2) % 3]] - p;
            double ang = std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
            ang *= 180.0 / M_PI;
            if (ang < r.min_angle) {
                r.min_angle = ang;
                r.worst_cell = ci;
            }
        }
    }
    r.min_area_ratio = n_cells() > 0 ? min_area / mean_area : 0.0;
    return r;
}

Mesh Mesh::deformed(const std::vector<Vec2>& displacement, double t) const {
    if (displacement.size() != vertices_.size())
        throw GeometryError("displacement must be defined at every vertex");
    Mesh m(*this);
    for (int i = 0; i < n_vertices(); ++i) m.vertices_[i] += t * displacement[i];
    int worst = -1;
    double worst_area = std::numeric_limits<double>::max();
    for (int ci = 0; ci < m.n_cells(); ++ci) {
        double a = m.cell_area(ci);
        if (a < worst_area) {
            worst_area = a;
            worst = ci;
        }
    }
    if (worst_area <= 0.0)
        throw InversionError("deformation inverts cell " + std::to_string(worst), worst);
    return m;
}

std::vector<int> Mesh::tagged_vertices(BoundaryTag tag) const {
    std::set<int> s;
    for (const auto& be : boundary_edges_)
        if (be.tag == tag) {
            s.insert(be.a);
            s.insert(be.b);
        }
    return {s.begin(), s.end()};
}

namespace {

// Break [lo, hi] at the given interior coordinates, then subdivide each span
// to meet h_target.
std::vector<double> graded_axis(double lo, double hi, std::vector<double> breaks, double h_target) {
    breaks.push_back(lo);
    breaks.push_back(hi);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                 breaks.end());
    std::vector<double> coords;
    for (size_t i = 0; i + 1 < breaks.size(); ++i) {
        double a = breaks[i], b = breaks[i + 1];
        int n = std::max(1, static_cast<int>(std::ceil((b - a) / h_target - 1e-12)));
        for (int k = 0; k < n; ++k) coords.push_back(a + (b - a) * k / n);
    }
    coords.push_back(hi);
    return coords;
}

} // namespace

Mesh generate_rectangle(double x0, double y0, double x1, double y1, int nx, int ny,
                        const std::function<BoundaryTag(const Vec2&)>& tagger) {
    std::vector<double> xs(nx + 1), ys(ny + 1);
    for (int i = 0; i <= nx; ++i) xs[i] = x0 + (x1 - x0) * i / nx;
    for (int j = 0; j <= ny; ++j) ys[j] = y0 + (y1 - y0) * j / ny;

    std::vector<Vec2> verts;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) verts.emplace_back(xs[i], ys[j]);
    auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };

    std::vector<std::array<int, 3>> cells;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            cells.push_back({v00, v10, v11});
            cells.push_back({v00, v11, v01});
        }

    // tag outer boundary
    std::map<std::pair<int, int>, BoundaryTag> tags;
    auto tag_edge = [&](int a, int b) {
        Vec2 mid = 0.5 * (verts[a] + verts[b]);
        tags[a < b ? std::make_pair(a, b) : std::make_pair(b, a)] = tagger(mid);
    };
    for (int i = 0; i < nx; ++i) {
        tag_edge(vid(i, 0), vid(i + 1, 0));
        tag_edge(vid(i, ny), vid(i + 1, ny));
    }
    for (int j = 0; j < ny; ++j) {
        tag_edge(vid(0, j), vid(0, j + 1));
        tag_edge(vid(nx, j), vid(nx, j + 1));
    }
    return Mesh::create(std::move(verts), std::move(cells), tags, {});
}

Mesh unit_square_mesh(int n) {
    return generate_rectangle(0, 0, 1, 1, n, n, [](const Vec2& m) {
        if (m.x() < 1e-12) return BoundaryTag::Inlet;
        if (m.x() > 1 - 1e-12) return BoundaryTag::Outlet;
        return BoundaryTag::Wall;
    });
}

Mesh generate_channel_array(double length, double height, int n_fins, double fin_width,
                            double fin_height, double h_target) {
    if (length <= 0 || height <= 0 || h_target <= 0)
        throw GeometryError("rectangle dimensions and h_target must be positive");
    if (n_fins < 0) throw GeometryError("n_fins must be non-negative");

    struct Fin {
        double x0, x1; // horizontal extent; vertical extent is [height-fin_height, height]
    };
    std::vector<Fin> fins;
    if (n_fins > 0) {
        if (fin_width <= 0 || fin_height <= 0)
            throw GeometryError("fin dimensions must be positive");
        if (fin_height >= height)
            throw GeometryError("fins touch the bottom boundary");
        for (int i = 0; i < n_fins; ++i) {
            double c = length * (i + 1) / (n_fins + 1);
            fins.push_back({c - fin_width / 2, c + fin_width / 2});
        }
        for (size_t i = 0; i < fins.size(); ++i) {
            if (fins[i].x0 <= 0 || fins[i].x1 >= length)
                throw GeometryError("fins touch the outer boundary");
            if (i > 0 && fins[i].x0 <= fins[i - 1].x1)
                throw GeometryError("fins overlap or touch");
        }
    }

    std::vector<double> xbreaks, ybreaks;
    for (const auto& f : fins) {
        xbreaks.push_back(f.x0);
        xbreaks.push_back(f.x1);
    }
    double band_y = height - (n_fins > 0 ? fin_height : 0.0);
    if (n_fins > 0) ybreaks.push_back(band_y);
    auto xs = graded_axis(0, length, xbreaks, h_target);
    auto ys = graded_axis(0, height, ybreaks, h_target);
    const int nx = static_cast<int>(xs.size()) - 1;
    const int ny = static_cast<int>(ys.size()) - 1;

    auto in_fin = [&](const Vec2& p) {
        if (p.y() < band_y) return false;
        for (const auto& f : fins)
            if (p.x() > f.x0 && p.x() < f.x1) return true;
        return false;
    };
    auto in_band = [&](const Vec2& p) { return n_fins > 0 && p.y() > band_y; };

    std::vector<Vec2> grid;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) grid.emplace_back(xs[i], ys[j]);
    auto gid = [nx](int i, int j) { return j * (nx + 1) + i; };

    std::vector<std::array<int, 3>> cells;
    std::vector<bool> flags;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            Vec2 center(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]));
            if (in_fin(center)) continue;
            int v00 = gid(i, j), v10 = gid(i + 1, j), v01 = gid(i, j + 1), v11 = gid(i + 1, j + 1);
            cells.push_back({v00, v10, v11});
            cells.push_back({v00, v11, v01});
            bool sub = in_band(center);
            flags.push_back(sub);
            flags.push_back(sub);
        }

    // drop unused vertices
    std::vector<int> remap(grid.size(), -1);
    std::vector<Vec2> verts;
    for (auto& c : cells)
        for (int& v : c) {
            if (remap[v] < 0) {
                remap[v] = static_cast<int>(verts.size());
                verts.push_back(grid[v]);
            }
            v = remap[v];
        }

    // tag all boundary edges: left edge inlet, right edge outlet, rest wall
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& c : cells)
        for (int e = 0; e < 3; ++e) {
            int a = c[e], b = c[(e + 1) % 3];
            edge_count[a < b ? std::make_pair(a, b) : std::make_pair(b, a)]++;
        }
    std::map<std::pair<int, int>, BoundaryTag> tags;
    for (const auto& [key, cnt] : edge_count) {
        if (cnt != 1) continue;
        Vec2 mid = 0.5 * (verts[key.first] + verts[key.second]);
        BoundaryTag t = BoundaryTag::Wall;
        if (mid.x() < 1e-12) t = BoundaryTag::Inlet;
        else if (mid.x() > length - 1e-12) t = BoundaryTag::Outlet;
        tags[key] = t;
    }
    return Mesh::create(std::move(verts), std::move(cells), tags, std::move(flags));
}

} // namespace mc
