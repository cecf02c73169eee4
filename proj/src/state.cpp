#include "mc/state.hpp"

#include <cmath>
#include <map>

namespace mc {

void BoundaryData::validate(const Mesh& mesh) const {
    double worst_inlet = 0.0, worst_wall = 0.0;
    for (const auto& be : mesh.boundary_edges()) {
        Vec2 a = mesh.vertices()[be.a], b = mesh.vertices()[be.b];
        Vec2 d = b - a;
        Vec2 n(d.y(), -d.x());
        n.normalize();
        for (const auto& q : edge_quadrature()) {
            Vec2 p = a + q.s * d;
            if (be.tag == BoundaryTag::Inlet)
                worst_inlet = std::max(worst_inlet, u_in(p).dot(n));
            else if (be.tag == BoundaryTag::Wall)
                worst_wall = std::max(worst_wall, u_in(p).norm());
        }
    }
    if (worst_inlet > 1e-12)
        throw ConfigError("u_in . n must be <= 0 on the inlet (got " +
                          std::to_string(worst_inlet) + ")");
    if (worst_wall > 1e-12)
        throw ConfigError("u_in must vanish on the wall (got " + std::to_string(worst_wall) + ")");
}

std::pair<DiscreteField, DiscreteField> make_liftings(const Discretization& disc,
                                                      const BoundaryData& data) {
    const Mesh& mesh = disc.mesh();
    const Space& V = disc.velocity();
    const Space& W = disc.temperature();

    // component-wise vector Laplacian on P2Vec
    {
        std::vector<Triplet> trip;
        for (int ci = 0; ci < mesh.n_cells(); ++ci) {
            CellGeometry geo = cell_geometry(mesh, ci);
            for (const auto& q : cell_quadrature()) {
                Vec2 g[6];
                basis_gradients(Family::P2, q.ref, g);
                Vec2 gp[6];
                for (int k = 0; k < 6; ++k) gp[k] = geo.JinvT * g[k];
                for (int l = 0; l < 6; ++l)
                    for (int k = 0; k < 6; ++k) {
                        double v = q.w * geo.detJ * gp[l].dot(gp[k]);
                        int dl = V.cell_scalar_dof(ci, l), dk = V.cell_scalar_dof(ci, k);
                        trip.emplace_back(2 * dl, 2 * dk, v);
                        trip.emplace_back(2 * dl + 1, 2 * dk + 1, v);
                    }
            }
        }
        SparseSystem sys;
        sys.A.resize(V.ndofs(), V.ndofs());
        sys.A.setFromTriplets(trip.begin(), trip.end());
        sys.b = Eigen::VectorXd::Zero(V.ndofs());

        // inlet trace u_in, wall trace 0 (wall wins at shared corners; the
        // data contract makes both zero there anyway)
        std::map<int, double> values;
        for (int d : V.boundary_scalar_dofs({BoundaryTag::Inlet})) {
            Vec2 v = data.u_in(V.scalar_dof_point(d));
            values[2 * d] = v.x();
            values[2 * d + 1] = v.y();
        }
        for (int d : V.boundary_scalar_dofs({BoundaryTag::Wall})) {
            values[2 * d] = 0.0;
            values[2 * d + 1] = 0.0;
        }
        std::vector<int> dofs;
        for (const auto& [d, v] : values) dofs.push_back(d);
        apply_dirichlet(sys, dofs, [&values](int d) { return values.at(d); });
        DiscreteField lift_u(V);
        lift_u.coeffs = solve_sparse(sys);

        // scalar Laplace for the temperature lifting
        std::vector<Triplet> tripT;
        for (int ci = 0; ci < mesh.n_cells(); ++ci) {
            CellGeometry geo = cell_geometry(mesh, ci);
            for (const auto& q : cell_quadrature()) {
                Vec2 g[6];
                basis_gradients(Family::P2, q.ref, g);
                Vec2 gp[6];
                for (int k = 0; k < 6; ++k) gp[k] = geo.JinvT * g[k];
                for (int l = 0; l < 6; ++l)
                    for (int k = 0; k < 6; ++k)
                        tripT.emplace_back(W.cell_scalar_dof(ci, l), W.cell_scalar_dof(ci, k),
                                           q.w * geo.detJ * gp[l].dot(gp[k]));
            }
        }
        SparseSystem sysT;
        sysT.A.resize(W.ndofs(), W.ndofs());
        sysT.A.setFromTriplets(tripT.begin(), tripT.end());
        sysT.b = Eigen::VectorXd::Zero(W.ndofs());
        auto inlet = W.boundary_scalar_dofs({BoundaryTag::Inlet});
        apply_dirichlet(sysT, inlet,
                        [&](int d) { return data.T_in(W.scalar_dof_point(d)); });
        DiscreteField lift_T(W);
        lift_T.coeffs = solve_sparse(sysT);
        return {std::move(lift_u), std::move(lift_T)};
    }
}

SparseSystem assemble_stokes(const Discretization& disc, const PhysicalParams& params,
                             const DiscreteField& lift_u, const PullbackKernels& kernels) {
    const Mesh& mesh = disc.mesh();
    const Space& V = disc.velocity();
    const Space& P = disc.pressure();
    const int nu = V.ndofs();
    const int np = P.ndofs();

    std::vector<Triplet> trip;
    SparseSystem sys;
    sys.b = Eigen::VectorXd::Zero(nu + np);

    for (int ci = 0; ci < mesh.n_cells(); ++ci) {
        CellGeometry geo = cell_geometry(mesh, ci);
        for (const auto& q : cell_quadrature()) {
            double w = q.w * geo.detJ;
            Vec2 x = geo.map(q.ref);
            KernelValues k = kernels.at(x);

            Vec2 g[6];
            basis_gradients(Family::P2, q.ref, g);
            Vec2 gp[6], Ag[6], Bg[6];
            for (int i = 0; i < 6; ++i) {
                gp[i] = geo.JinvT * g[i];
                Ag[i] = k.A * gp[i];
                Bg[i] = k.B * gp[i];
            }
            double psi[3];
            basis_values(Family::P1, q.ref, psi);

            Mat2 Dlift = eval_vector_jacobian(lift_u, ci, geo, q.ref);
            Mat2 DliftA = Dlift * k.A;
            double lift_div_b = (Dlift.array() * k.B.array()).sum(); // tr(Dlift B^T)

            for (int l = 0; l < 6; ++l) {
                int dl = V.cell_scalar_dof(ci, l);
                for (int kk = 0; kk < 6; ++kk) {
                    int dk = V.cell_scalar_dof(ci, kk);
                    double a_lk = w * params.mu * gp[l].dot(Ag[kk]);
                    trip.emplace_back(2 * dl, 2 * dk, a_lk);
                    trip.emplace_back(2 * dl + 1, 2 * dk + 1, a_lk);
                }
                for (int m = 0; m < 3; ++m) {
                    int dm = nu + P.cell_scalar_dof(ci, m);
                    for (int c = 0; c < 2; ++c) {
                        double g_lm = -w * psi[m] * Bg[l][c];
                        trip.emplace_back(2 * dl + c, dm, g_lm);
                        trip.emplace_back(dm, 2 * dl + c, g_lm);
                    }
                }
                // f_u = -int mu (Dlift A) : Dv
                Vec2 fu = -w * params.mu * (DliftA * gp[l]);
                sys.b[2 * dl] += fu.x();
                sys.b[2 * dl + 1] += fu.y();
            }
            // f_p = +int q tr(Dlift B^T)
            for (int m = 0; m < 3; ++m)
                sys.b[nu + P.cell_scalar_dof(ci, m)] += w * psi[m] * lift_div_b;
        }
    }
    sys.A.resize(nu + np, nu + np);
    sys.A.setFromTriplets(trip.begin(), trip.end());
    apply_dirichlet_zero(sys, V.boundary_dofs({BoundaryTag::Inlet, BoundaryTag::Wall}));
    return sys;
}

std::pair<DiscreteField, DiscreteField> solve_stokes(const Discretization& disc,
                                                     const PhysicalParams& params,
                                                     const DiscreteField& lift_u,
                                                     const PullbackKernels& kernels) {
    SparseSystem sys = assemble_stokes(disc, params, lift_u, kernels);
    Eigen::VectorXd x = solve_sparse(sys);
    DiscreteField u0(disc.velocity()), p0(disc.pressure());
    u0.coeffs = x.head(disc.velocity().ndofs());
    p0.coeffs = x.tail(disc.pressure().ndofs());
    return {std::move(u0), std::move(p0)};
}

SparseSystem assemble_temperature(const Discretization& disc, const PhysicalParams& params,
                                  const DiscreteField& u_conv, const DiscreteField& lift_T,
                                  const ScalarData& T_wall, const PullbackKernels& kernels,
                                  SolveReport* report) {
    const Mesh& mesh = disc.mesh();
    const Space& W = disc.temperature();
    const double rc = params.rho * params.cp;

    std::vector<Triplet> trip;
    SparseSystem sys;
    sys.b = Eigen::VectorXd::Zero(W.ndofs());
    double max_pe = 0.0;

    for (int ci = 0; ci < mesh.n_cells(); ++ci) {
        CellGeometry geo = cell_geometry(mesh, ci);
        double h = std::max({geo.J.col(0).norm(), geo.J.col(1).norm(),
                             (geo.J.col(1) - geo.J.col(0)).norm()});
        for (const auto& q : cell_quadrature()) {
            double w = q.w * geo.detJ;
            Vec2 x = geo.map(q.ref);
            KernelValues k = kernels.at(x);

            double phi[6];
            Vec2 g[6];
            basis_values(Family::P2, q.ref, phi);
            basis_gradients(Family::P2, q.ref, g);
            Vec2 gp[6];
            for (int i = 0; i < 6; ++i) gp[i] = geo.JinvT * g[i];

            Vec2 vel = eval_vector(u_conv, ci, q.ref);
            max_pe = std::max(max_pe, rc * vel.norm() * h / (2.0 * params.kappa));

            Vec2 grad_lift = eval_scalar_gradient(lift_T, ci, geo, q.ref);

            for (int l = 0; l < 6; ++l) {
                int dl = W.cell_scalar_dof(ci, l);
                for (int kk = 0; kk < 6; ++kk) {
                    int dk = W.cell_scalar_dof(ci, kk);
                    double c_lk = w * (params.kappa * gp[l].dot(k.A * gp[kk]) +
                                       rc * vel.dot(k.B * gp[kk]) * phi[l]);
                    trip.emplace_back(dl, dk, c_lk);
                }
                // f_T volume part
                sys.b[dl] -= w * (params.kappa * gp[l].dot(k.A * grad_lift) +
                                  rc * vel.dot(k.B * grad_lift) * phi[l]);
            }
        }
    }

    // Robin wall term with omega(t) weight
    for (const auto& be : mesh.boundary_edges()) {
        if (be.tag != BoundaryTag::Wall) continue;
        CellGeometry geo = cell_geometry(mesh, be.cell);
        Vec2 a = mesh.vertices()[be.a], b = mesh.vertices()[be.b];
        Vec2 d = b - a;
        double len = d.norm();
        Vec2 n(d.y() / len, -d.x() / len);
        for (const auto& q : edge_quadrature()) {
            Vec2 x = a + q.s * d;
            double w = q.w * len;
            double om = kernels.omega(x, n);
            Vec2 ref = boundary_ref_point(mesh, be, geo, q.s);
            double phi[6];
            basis_values(Family::P2, ref, phi);
            double lift_val = eval_scalar(lift_T, be.cell, ref);
            double twall = T_wall(kernels.map(x));
            for (int l = 0; l < 6; ++l) {
                int dl = W.cell_scalar_dof(be.cell, l);
                for (int kk = 0; kk < 6; ++kk)
                    trip.emplace_back(dl, W.cell_scalar_dof(be.cell, kk),
                                      w * params.alpha * phi[l] * phi[kk] * om);
                sys.b[dl] -= w * params.alpha * (lift_val - twall) * phi[l] * om;
            }
        }
    }

    sys.A.resize(W.ndofs(), W.ndofs());
    sys.A.setFromTriplets(trip.begin(), trip.end());
    apply_dirichlet_zero(sys, W.boundary_scalar_dofs({BoundaryTag::Inlet}));

    if (report) {
        report->max_element_peclet = std::max(report->max_element_peclet, max_pe);
        if (max_pe > 2.0)
            report->warnings.push_back("element Peclet number " + std::to_string(max_pe) +
                                       " exceeds 2; plain Galerkin may oscillate");
        SparseMat sym = SparseMat(0.5 * (sys.A + SparseMat(sys.A.transpose())));
        double min_diag = std::numeric_limits<double>::max();
        for (int i = 0; i < sym.rows(); ++i) min_diag = std::min(min_diag, sym.coeff(i, i));
        report->coercivity_proxy = min_diag;
        if (min_diag <= 0)
            report->warnings.push_back("temperature system coercivity proxy is non-positive");
    }
    return sys;
}

DiscreteField solve_temperature(const Discretization& disc, const PhysicalParams& params,
                                const DiscreteField& u_conv, const DiscreteField& lift_T,
                                const ScalarData& T_wall, const PullbackKernels& kernels,
                                SolveReport* report) {
    SparseSystem sys = assemble_temperature(disc, params, u_conv, lift_T, T_wall, kernels, report);
    DiscreteField T0(disc.temperature());
    T0.coeffs = solve_sparse(sys);
    return T0;
}

StateSolution solve_state(const Discretization& disc, const PhysicalParams& params,
                          const BoundaryData& data, const AdmissibleField& V, double t,
                          const std::pair<DiscreteField, DiscreteField>* liftings,
                          SolveReport* report) {
    params.validate();
    StateSolution U;
    if (liftings) {
        U.lift_u = liftings->first;
        U.lift_T = liftings->second;
    } else {
        std::tie(U.lift_u, U.lift_T) = make_liftings(disc, data);
    }
    PullbackKernels kernels = PullbackKernels::of(V, t);
    std::tie(U.u0, U.p0) = solve_stokes(disc, params, U.lift_u, kernels);
    U.T0 = solve_temperature(disc, params, U.u_total(), U.lift_T, data.T_wall, kernels, report);
    return U;
}

double state_residual(const Discretization& disc, const PhysicalParams& params,
                      const BoundaryData& data, const StateSolution& U,
                      const PullbackKernels& kernels) {
    SparseSystem stokes = assemble_stokes(disc, params, U.lift_u, kernels);
    Eigen::VectorXd xs(stokes.A.rows());
    xs << U.u0.coeffs, U.p0.coeffs;
    double r = (stokes.A * xs - stokes.b).lpNorm<Eigen::Infinity>();

    SparseSystem temp =
        assemble_temperature(disc, params, U.u_total(), U.lift_T, data.T_wall, kernels);
    r = std::max(r, (temp.A * U.T0.coeffs - temp.b).lpNorm<Eigen::Infinity>());
    return r;
}

} // namespace mc
