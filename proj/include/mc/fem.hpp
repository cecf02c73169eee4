#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Sparse>

#include "mc/mesh.hpp"

namespace mc {

enum class Family { P1, P2, P2Vec };

/// Finite element space on a triangulation. P1: dofs at vertices. P2:
/// vertices + edge midpoints. P2Vec: two interleaved P2 components
/// (global dof = 2 * scalar_dof + component).
class Space {
public:
    static Space build(const Mesh& mesh, Family family);

    const Mesh& mesh() const { return *mesh_; }
    Family family() const { return family_; }
    int ndofs() const { return ndofs_; }
    int n_scalar_dofs() const { return n_scalar_; }
    int local_size() const;
    bool is_vector() const { return family_ == Family::P2Vec; }

    /// Global scalar dof for a cell-local scalar node (P1: 0..2, P2: 0..5).
    int cell_scalar_dof(int cell, int local) const;
    /// Global dof for a cell-local dof (vector spaces interleave components).
    int cell_dof(int cell, int local) const;

    /// Coordinate of a scalar dof (vertex or edge midpoint).
    Vec2 scalar_dof_point(int scalar_dof) const;

    /// Scalar dofs lying on boundary edges with any of the given tags.
    std::vector<int> boundary_scalar_dofs(std::initializer_list<BoundaryTag> tags) const;
    /// Full (possibly vector) dofs on the given tags.
    std::vector<int> boundary_dofs(std::initializer_list<BoundaryTag> tags) const;

private:
    const Mesh* mesh_ = nullptr;
    Family family_ = Family::P1;
    int ndofs_ = 0;
    int n_scalar_ = 0;
};

struct DiscreteField {
    const Space* space = nullptr;
    Eigen::VectorXd coeffs;

    DiscreteField() = default;
    explicit DiscreteField(const Space& s) : space(&s), coeffs(Eigen::VectorXd::Zero(s.ndofs())) {}
};

// ---- reference elements --------------------------------------------------

/// Scalar basis values at a reference point; n = 3 (P1) or 6 (P2).
void basis_values(Family family, const Vec2& ref, double* out);
/// Reference gradients; physical gradient = Jinv^T * ref gradient.
void basis_gradients(Family family, const Vec2& ref, Vec2* out);

/// Affine geometry of one cell.
struct CellGeometry {
    Vec2 x0;
    Mat2 J;     // reference -> physical
    Mat2 JinvT; // transpose inverse
    double detJ;
    Vec2 map(const Vec2& ref) const { return x0 + J * ref; }
};
CellGeometry cell_geometry(const Mesh& mesh, int cell);

// ---- quadrature ----------------------------------------------------------

struct QPoint {
    Vec2 ref;
    double w; // weights sum to 1/2 (reference triangle area)
};
/// Degree-4 exact 6-point rule.
const std::vector<QPoint>& cell_quadrature();

struct EdgeQPoint {
    double s; // on [0, 1]
    double w; // weights sum to 1
};
/// 3-point Gauss rule (degree 5).
const std::vector<EdgeQPoint>& edge_quadrature();

/// Reference coordinates, in the adjacent cell, of the point at parameter s
/// on a boundary edge (s = 0 at edge.a, s = 1 at edge.b).
Vec2 boundary_ref_point(const Mesh& mesh, const BoundaryEdge& edge, const CellGeometry& geo,
                        double s);

// ---- field evaluation ----------------------------------------------------

/// Scalar field value at a reference point of a cell.
double eval_scalar(const DiscreteField& f, int cell, const Vec2& ref);
Vec2 eval_scalar_gradient(const DiscreteField& f, int cell, const CellGeometry& geo,
                          const Vec2& ref);
Vec2 eval_vector(const DiscreteField& f, int cell, const Vec2& ref);
Mat2 eval_vector_jacobian(const DiscreteField& f, int cell, const CellGeometry& geo,
                          const Vec2& ref);

/// Locate the cell containing a physical point (brute force with a small
/// tolerance); returns {cell, reference coordinates}.
std::pair<int, Vec2> locate(const Mesh& mesh, const Vec2& p, double tol = 1e-10);

/// Value of a (scalar or vector, as x-component padded) field at a physical
/// point; convenience for tests and writers.
double eval_scalar_at(const DiscreteField& f, const Vec2& p);
Vec2 eval_vector_at(const DiscreteField& f, const Vec2& p);

/// Nodal interpolant.
DiscreteField interpolate(const Space& space, const std::function<double(const Vec2&)>& f);
DiscreteField interpolate_vector(const Space& space, const std::function<Vec2(const Vec2&)>& f);

// ---- integration ---------------------------------------------------------

enum class Region { All, Subdomain };

/// Mapped Gauss quadrature of f over the selected cells (default order 4).
double integrate_cells(const Mesh& mesh, const std::function<double(const Vec2&)>& f,
                       Region region = Region::All);
/// Quadrature over boundary edges of one tag (tag < 0: all); f(x, n) with
/// outward unit normal n.
double integrate_facets(const Mesh& mesh,
                        const std::function<double(const Vec2&, const Vec2&)>& f, int tag = -1);

// ---- linear algebra ------------------------------------------------------

using SparseMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct SparseSystem {
    SparseMat A;
    Eigen::VectorXd b;
};

/// Strong Dirichlet imposition by symmetric elimination: constrained rows
/// and columns are cleared, unit diagonal set, RHS adjusted. Idempotent.
void apply_dirichlet(SparseSystem& system, const std::vector<int>& dofs,
                     const std::function<double(int)>& value);
inline void apply_dirichlet_zero(SparseSystem& system, const std::vector<int>& dofs) {
    apply_dirichlet(system, dofs, [](int) { return 0.0; });
}

/// Sparse LU solve; verifies the relative residual (<= 1e-10) and throws
/// SolverError on failure.
Eigen::VectorXd solve_sparse(const SparseSystem& system);

} // namespace mc
