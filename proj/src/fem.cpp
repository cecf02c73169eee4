#include "mc/fem.hpp"

#include <cmath>
#include <set>

#include <Eigen/SparseLU>

namespace mc {

// ---- Space ---------------------------------------------------------------

Space Space::build(const Mesh& mesh, Family family) {
    Space s;
    s.mesh_ = &mesh;
    s.family_ = family;
    switch (family) {
        case Family::P1: s.n_scalar_ = mesh.n_vertices(); break;
        case Family::P2:
        case Family::P2Vec: s.n_scalar_ = mesh.n_vertices() + mesh.n_edges(); break;
    }
    s.ndofs_ = family == Family::P2Vec ? 2 * s.n_scalar_ : s.n_scalar_;
    return s;
}

int Space::local_size() const {
    switch (family_) {
        case Family::P1: return 3;
        case Family::P2: return 6;
        case Family::P2Vec: return 12;
    }
    return 0;
}

int Space::cell_scalar_dof(int cell, int local) const {
    const auto& c = mesh_->cells()[cell];
    if (local < 3) return c[local];
    return mesh_->n_vertices() + mesh_->cell_edge(cell, local - 3);
}

int Space::cell_dof(int cell, int local) const {
    if (family_ != Family::P2Vec) return cell_scalar_dof(cell, local);
    return 2 * cell_scalar_dof(cell, local / 2) + local % 2;
}

Vec2 Space::scalar_dof_point(int scalar_dof) const {
    int nv = mesh_->n_vertices();
    if (scalar_dof < nv) return mesh_->vertices()[scalar_dof];
    auto [a, b] = mesh_->edges()[scalar_dof - nv];
    return 0.5 * (mesh_->vertices()[a] + mesh_->vertices()[b]);
}

std::vector<int> Space::boundary_scalar_dofs(std::initializer_list<BoundaryTag> tags) const {
    std::set<int> out;
    for (const auto& be : mesh_->boundary_edges()) {
        bool match = false;
        for (auto t : tags) match |= be.tag == t;
        if (!match) continue;
        out.insert(be.a);
        out.insert(be.b);
        if (family_ != Family::P1)
            out.insert(mesh_->n_vertices() + mesh_->edge_index(be.a, be.b));
    }
    return {out.begin(), out.end()};
}

std::vector<int> Space::boundary_dofs(std::initializer_list<BoundaryTag> tags) const {
    auto scal = boundary_scalar_dofs(tags);
    if (family_ != Family::P2Vec) return scal;
    std::vector<int> out;
    out.reserve(2 * scal.size());
    for (int d : scal) {
        out.push_back(2 * d);
        out.push_back(2 * d + 1);
    }
    return out;
}

// ---- reference elements --------------------------------------------------

void basis_values(Family family, const Vec2& ref, double* out) {
    double x = ref.x(), y = ref.y(), l0 = 1 - x - y;
    if (family == Family::P1) {
        out[0] = l0;
        out[1] = x;
        out[2] = y;
        return;
    }
    out[0] = l0 * (2 * l0 - 1);
    out[1] = x * (2 * x - 1);
    out[2] = y * (2 * y - 1);
    out[3] = 4 * l0 * x; // edge (0,1)
    out[4] = 4 * x * y;  // edge (1,2)
    out[5] = 4 * y * l0; // edge (2,0)
}

void basis_gradients(Family family, const Vec2& ref, Vec2* out) {
    double x = ref.x(), y = ref.y(), l0 = 1 - x - y;
    if (family == Family::P1) {
        out[0] = {-1, -1};
        out[1] = {1, 0};
        out[2] = {0, 1};
        return;
    }
    out[0] = Vec2(-1, -1) * (4 * l0 - 1);
    out[1] = Vec2(4 * x - 1, 0);
    out[2] = Vec2(0, 4 * y - 1);
    out[3] = 4.0 * (l0 * Vec2(1, 0) + x * Vec2(-1, -1));
    out[4] = 4.0 * (x * Vec2(0, 1) + y * Vec2(1, 0));
    out[5] = 4.0 * (y * Vec2(-1, -1) + l0 * Vec2(0, 1));
}

CellGeometry cell_geometry(const Mesh& mesh, int cell) {
    const auto& c = mesh.cells()[cell];
    CellGeometry g;
    g.x0 = mesh.vertices()[c[0]];
    g.J.col(0) = mesh.vertices()[c[1]] - g.x0;
    g.J.col(1) = mesh.vertices()[c[2]] - g.x0;
    g.detJ = g.J.determinant();
    Mat2 inv;
    inv << g.J(1, 1), -g.J(0, 1), -g.J(1, 0), g.J(0, 0);
    inv /= g.detJ;
    g.JinvT = inv.transpose();
    return g;
}

// ---- quadrature ----------------------------------------------------------

const std::vector<QPoint>& cell_quadrature() {
    // Dunavant degree-4, 6 points; weights sum to 1/2
    static const std::vector<QPoint> rule = [] {
        const double a1 = 0.445948490915965, w1 = 0.223381589678011;
        const double a2 = 0.091576213509771, w2 = 0.109951743655322;
        std::vector<QPoint> r;
        r.push_back({{a1, a1}, w1 / 2});
        r.push_back({{1 - 2 * a1, a1}, w1 / 2});
        r.push_back({{a1, 1 - 2 * a1}, w1 / 2});
        r.push_back({{a2, a2}, w2 / 2});
        r.push_back({{1 - 2 * a2, a2}, w2 / 2});
        r.push_back({{a2, 1 - 2 * a2}, w2 / 2});
        return r;
    }();
    return rule;
}

const std::vector<EdgeQPoint>& edge_quadrature() {
    static const std::vector<EdgeQPoint> rule = [] {
        const double g = std::sqrt(3.0 / 5.0);
        return std::vector<EdgeQPoint>{
            {0.5 * (1 - g), 5.0 / 18.0}, {0.5, 8.0 / 18.0}, {0.5 * (1 + g), 5.0 / 18.0}};
    }();
    return rule;
}

Vec2 boundary_ref_point(const Mesh& mesh, const BoundaryEdge& edge, const CellGeometry& geo,
                        double s) {
    Vec2 p = mesh.vertices()[edge.a] + s * (mesh.vertices()[edge.b] - mesh.vertices()[edge.a]);
    return geo.JinvT.transpose() * (p - geo.x0);
}

// ---- field evaluation ----------------------------------------------------

double eval_scalar(const DiscreteField& f, int cell, const Vec2& ref) {
    const Space& sp = *f.space;
    double phi[6];
    basis_values(sp.family(), ref, phi);
    double v = 0;
    int n = sp.family() == Family::P1 ? 3 : 6;
    for (int k = 0; k < n; ++k) v += f.coeffs[sp.cell_scalar_dof(cell, k)] * phi[k];
    return v;
}

Vec2 eval_scalar_gradient(const DiscreteField& f, int cell, const CellGeometry& geo,
                          const Vec2& ref) {
    const Space& sp = *f.space;
    Vec2 g[6];
    basis_gradients(sp.family(), ref, g);
    Vec2 grad = Vec2::Zero();
    int n = sp.family() == Family::P1 ? 3 : 6;
    for (int k = 0; k < n; ++k)
        grad += f.coeffs[sp.cell_scalar_dof(cell, k)] * (geo.JinvT * g[k]);
    return grad;
}

Vec2 eval_vector(const DiscreteField& f, int cell, const Vec2& ref) {
    const Space& sp = *f.space;
    double phi[6];
    basis_values(Family::P2, ref, phi);
    Vec2 v = Vec2::Zero();
    for (int k = 0; k < 6; ++k) {
        int d = sp.cell_scalar_dof(cell, k);
        v.x() += f.coeffs[2 * d] * phi[k];
        v.y() += f.coeffs[2 * d + 1] * phi[k];
    }
    return v;
}

Mat2 eval_vector_jacobian(const DiscreteField& f, int cell, const CellGeometry& geo,
                          const Vec2& ref) {
    const Space& sp = *f.space;
    Vec2 g[6];
    basis_gradients(Family::P2, ref, g);
    Mat2 J = Mat2::Zero();
    for (int k = 0; k < 6; ++k) {
        int d = sp.cell_scalar_dof(cell, k);
        Vec2 gp = geo.JinvT * g[k];
        J.row(0) += f.coeffs[2 * d] * gp.transpose();
        J.row(1) += f.coeffs[2 * d + 1] * gp.transpose();
    }
    return J;
}

std::pair<int, Vec2> locate(const Mesh& mesh, const Vec2& p, double tol) {
    int best = -1;
    double best_violation = std::numeric_limits<double>::max();
    Vec2 best_ref = Vec2::Zero();
    for (int ci = 0; ci < mesh.n_cells(); ++ci) {
        CellGeometry g = cell_geometry(mesh, ci);
        Vec2 ref = g.JinvT.transpose() * (p - g.x0);
        double viol = std::max({-ref.x(), -ref.y(), ref.x() + ref.y() - 1.0});
        if (viol < best_violation) {
            best_violation = viol;
            best = ci;
            best_ref = ref;
        }
        if (viol <= 0) break;
    }
    if (best_violation > tol)
        throw GeometryError("point (" + std::to_string(p.x()) + "," + std::to_string(p.y()) +
                            ") lies outside the mesh");
    return {best, best_ref};
}

double eval_scalar_at(const DiscreteField& f, const Vec2& p) {
    auto [cell, ref] = locate(f.space->mesh(), p);
    return eval_scalar(f, cell, ref);
}

Vec2 eval_vector_at(const DiscreteField& f, const Vec2& p) {
    auto [cell, ref] = locate(f.space->mesh(), p);
    return eval_vector(f, cell, ref);
}

DiscreteField interpolate(const Space& space, const std::function<double(const Vec2&)>& f) {
    DiscreteField out(space);
    for (int d = 0; d < space.n_scalar_dofs(); ++d) out.coeffs[d] = f(space.scalar_dof_point(d));
    return out;
}

DiscreteField interpolate_vector(const Space& space, const std::function<Vec2(const Vec2&)>& f) {
    DiscreteField out(space);
    for (int d = 0; d < space.n_scalar_dofs(); ++d) {
        Vec2 v = f(space.scalar_dof_point(d));
        out.coeffs[2 * d] = v.x();
        out.coeffs[2 * d + 1] = v.y();
    }
    return out;
}

// ---- integration ---------------------------------------------------------

double integrate_cells(const Mesh& mesh, const std::function<double(const Vec2&)>& f,
                       Region region) {
    double sum = 0;
    for (int ci = 0; ci < mesh.n_cells(); ++ci) {
        if (region == Region::Subdomain && !mesh.subdomain_flags()[ci]) continue;
        CellGeometry g = cell_geometry(mesh, ci);
        for (const auto& q : cell_quadrature()) sum += q.w * g.detJ * f(g.map(q.ref));
    }
    return sum;
}

double integrate_facets(const Mesh& mesh,
                        const std::function<double(const Vec2&, const Vec2&)>& f, int tag) {
    if (tag >= 0 && (tag < 1 || tag > 3)) throw TaggingError("unknown boundary tag");
    double sum = 0;
    for (const auto& be : mesh.boundary_edges()) {
        if (tag >= 0 && static_cast<int>(be.tag) != tag) continue;
        Vec2 a = mesh.vertices()[be.a], b = mesh.vertices()[be.b];
        Vec2 d = b - a;
        double len = d.norm();
        Vec2 n(d.y() / len, -d.x() / len);
        for (const auto& q : edge_quadrature()) sum += q.w * len * f(a + q.s * d, n);
    }
    return sum;
}

// ---- linear algebra ------------------------------------------------------

void apply_dirichlet(SparseSystem& system, const std::vector<int>& dofs,
                     const std::function<double(int)>& value) {
    const int n = static_cast<int>(system.A.rows());
    std::vector<char> constrained(n, 0);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    for (int d : dofs) {
        constrained[d] = 1;
        g[d] = value(d);
    }
    // lift constrained values into the RHS of free rows
    Eigen::VectorXd shift = system.A * g;
    for (int i = 0; i < n; ++i)
        if (!constrained[i]) system.b[i] -= shift[i];
    // clear rows and columns, keep structure
    for (int k = 0; k < system.A.outerSize(); ++k)
        for (SparseMat::InnerIterator it(system.A, k); it; ++it)
            if (constrained[it.row()] || constrained[it.col()])
                it.valueRef() = it.row() == it.col() ? 1.0 : 0.0;
    for (int d : dofs) {
        system.A.coeffRef(d, d) = 1.0;
        system.b[d] = g[d];
    }
}

Eigen::VectorXd solve_sparse(const SparseSystem& system) {
    SparseMat A = system.A;
    A.makeCompressed();
    Eigen::SparseLU<SparseMat> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success) throw SolverError("sparse LU factorization failed");
    Eigen::VectorXd x = lu.solve(system.b);
    if (lu.info() != Eigen::Success) throw SolverError("sparse LU solve failed");
    double bnorm = system.b.lpNorm<Eigen::Infinity>();
    double res = (A * x - system.b).lpNorm<Eigen::Infinity>();
    if (bnorm > 0 && res / bnorm > 1e-10)
        throw SolverError("linear solve residual too large: " + std::to_string(res / bnorm));
    return x;
}

} // namespace mc
