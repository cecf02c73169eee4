#include "mc/adjoint.hpp"

#include "mc/objective.hpp"

namespace mc {

namespace {

DiscreteField averaged(const DiscreteField& a, const DiscreteField& b) {
    DiscreteField f = a;
    f.coeffs = 0.5 * (a.coeffs + b.coeffs);
    return f;
}

} // namespace

SparseSystem assemble_adjoint_temperature(const Discretization& disc, const PhysicalParams& params,
                                          const DiscreteField& u_conv,
                                          const PullbackKernels& kernels) {
    const Mesh& mesh = disc.mesh();
    const Space& W = disc.temperature();
    const double rc = params.rho * params.cp;

    std::vector<Triplet> trip;
    for (int ci = 0; ci < mesh.n_cells(); ++ci) {
        CellGeometry geo = cell_geometry(mesh, ci);
        for (const auto& q : cell_quadrature()) {
            double w = q.w * geo.detJ;
            KernelValues k = kernels.at(geo.map(q.ref));

            double phi[6];
            Vec2 g[6];
            basis_values(Family::P2, q.ref, phi);
            basis_gradients(Family::P2, q.ref, g);
            Vec2 gp[6];
            for (int i = 0; i < 6; ++i) gp[i] = geo.JinvT * g[i];

            Vec2 vel = eval_vector(u_conv, ci, q.ref);
            // state form c(t, vel, trial, test) with the adjoint in the
            // test slot: assemble the transpose directly
            for (int l = 0; l < 6; ++l) {
                int dl = W.cell_scalar_dof(ci, l);
                for (int kk = 0; kk < 6; ++kk)
                    trip.emplace_back(W.cell_scalar_dof(ci, kk), dl,
                                      w * (params.kappa * gp[l].dot(k.A * gp[kk]) +
                                           rc * vel.dot(k.B * gp[kk]) * phi[l]));
            }
        }
    }
    for (const auto& be : mesh.boundary_edges()) {
        if (be.tag != BoundaryTag::Wall) continue;
        CellGeometry geo = cell_geometry(mesh, be.cell);
        Vec2 a = mesh.vertices()[be.a], b = mesh.vertices()[be.b];
        Vec2 d = b - a;
        double len = d.norm();
        Vec2 n(d.y() / len, -d.x() / len);
        for (const auto& q : edge_quadrature()) {
            double w = q.w * len;
            double om = kernels.omega(a + q.s * d, n);
            Vec2 ref = boundary_ref_point(mesh, be, geo, q.s);
            double phi[6];
            basis_values(Family::P2, ref, phi);
            for (int l = 0; l < 6; ++l)
                for (int kk = 0; kk < 6; ++kk)
                    trip.emplace_back(W.cell_scalar_dof(be.cell, kk), W.cell_scalar_dof(be.cell, l),
                                      w * params.alpha * phi[l] * phi[kk] * om);
        }
    }

    SparseSystem sys;
    sys.A.resize(W.ndofs(), W.ndofs());
    sys.A.setFromTriplets(trip.begin(), trip.end());
    sys.b = Eigen::VectorXd::Zero(W.ndofs());
    apply_dirichlet_zero(sys, W.boundary_scalar_dofs({BoundaryTag::Inlet}));
    return sys;
}

Eigen::VectorXd assemble_flux_load(const Discretization& disc, const PhysicalParams& params,
                                   double factor, const PullbackKernels& kernels) {
    const Mesh& mesh = disc.mesh();
    const Space& W = disc.temperature();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(W.ndofs());
    for (const auto& be : mesh.boundary_edges()) {
        if (be.tag != BoundaryTag::Wall) continue;
        CellGeometry geo = cell_geometry(mesh, be.cell);
        Vec2 a = mesh.vertices()[be.a], b = mesh.vertices()[be.b];
        Vec2 d = b - a;
        double len = d.norm();
        Vec2 n(d.y() / len, -d.x() / len);
        for (const auto& q : edge_quadrature()) {
            double w = q.w * len;
            double om = kernels.omega(a + q.s * d, n);
            Vec2 ref = boundary_ref_point(mesh, be, geo, q.s);
            double phi[6];
            basis_values(Family::P2, ref, phi);
            for (int l = 0; l < 6; ++l)
                rhs[W.cell_scalar_dof(be.cell, l)] += w * factor * params.alpha * phi[l] * om;
        }
    }
    return rhs;
}

Eigen::VectorXd assemble_adjoint_stokes_load(const Discretization& disc,
                                             const PhysicalParams& params,
                                             const ObjectiveParams& obj,
                                             const DiscreteField& u_track,
                                             const DiscreteField& T_conv_total,
                                             const DiscreteField& S,
                                             const PullbackKernels& kernels) {
    const Mesh& mesh = disc.mesh();
    const Space& V = disc.velocity();
    const double rc = params.rho * params.cp;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(V.ndofs());

    for (int ci = 0; ci < mesh.n_cells(); ++ci) {
        CellGeometry geo = cell_geometry(mesh, ci);
        bool in_sub = mesh.subdomain_flags()[ci];
        for (const auto& q : cell_quadrature()) {
            double w = q.w * geo.detJ;
            Vec2 x = geo.map(q.ref);
            KernelValues k = kernels.at(x);

            double phi[6];
            basis_values(Family::P2, q.ref, phi);

            // convective coupling: -rho C_p uhat . (B grad T) S
            Vec2 BgradT = k.B * eval_scalar_gradient(T_conv_total, ci, geo, q.ref);
            double s_val = eval_scalar(S, ci, q.ref);
            Vec2 load = -rc * s_val * BgradT;

            // velocity tracking: -2 lambda2 (u_track - u_des o Phi_t) xi
            if (in_sub && obj.lambda2 > 0) {
                Vec2 mismatch = eval_vector(u_track, ci, q.ref) - obj.u_des(k.mapped);
                load += -2.0 * obj.lambda2 * k.xi * mismatch;
            }

            for (int l = 0; l < 6; ++l) {
                int dl = V.cell_scalar_dof(ci, l);
                rhs[2 * dl] += w * load.x() * phi[l];
                rhs[2 * dl + 1] += w * load.y() * phi[l];
            }
        }
    }
    return rhs;
}

DiscreteField solve_adjoint_temperature(const Discretization& disc, const PhysicalParams& params,
                                        const ObjectiveParams& obj, const ScalarData& T_wall,
                                        const StateSolution& U_t, const StateSolution& U_0,
                                        const PullbackKernels& kernels) {
    DiscreteField u_avg = averaged(U_t.u0, U_0.u0);
    u_avg.coeffs += U_0.lift_u.coeffs;
    SparseSystem sys = assemble_adjoint_temperature(disc, params, u_avg, kernels);

    if (obj.lambda1 > 0) {
        DiscreteField T_avg = averaged(U_t.T0, U_0.T0);
        T_avg.coeffs += U_0.lift_T.coeffs;
        double Q = heat_flux(T_avg, T_wall, params.alpha, kernels);
        sys.b = assemble_flux_load(disc, params, 2.0 * obj.lambda1 * (Q - obj.Q_des), kernels);
        apply_dirichlet_zero(sys, disc.temperature().boundary_scalar_dofs({BoundaryTag::Inlet}));
    }
    DiscreteField S(disc.temperature());
    S.coeffs = solve_sparse(sys);
    return S;
}

std::pair<DiscreteField, DiscreteField> solve_adjoint_stokes(
    const Discretization& disc, const PhysicalParams& params, const ObjectiveParams& obj,
    const DiscreteField& S, const StateSolution& U_t, const StateSolution& U_0,
    const PullbackKernels& kernels) {
    DiscreteField zero_lift(disc.velocity());
    SparseSystem sys = assemble_stokes(disc, params, zero_lift, kernels);

    DiscreteField u_track = averaged(U_t.u0, U_0.u0);
    u_track.coeffs += U_0.lift_u.coeffs;
    DiscreteField T_conv = averaged(U_t.T0, U_0.T0);
    T_conv.coeffs += U_0.lift_T.coeffs;
    sys.b.head(disc.velocity().ndofs()) =
        assemble_adjoint_stokes_load(disc, params, obj, u_track, T_conv, S, kernels);
    apply_dirichlet_zero(sys, disc.velocity().boundary_dofs({BoundaryTag::Inlet, BoundaryTag::Wall}));

    Eigen::VectorXd x = solve_sparse(sys);
    DiscreteField v(disc.velocity()), q(disc.pressure());
    v.coeffs = x.head(disc.velocity().ndofs());
    q.coeffs = x.tail(disc.pressure().ndofs());
    return {std::move(v), std::move(q)};
}

AdjointSolution solve_adjoint(const Discretization& disc, const PhysicalParams& params,
                              const ObjectiveParams& obj, const ScalarData& T_wall,
                              const StateSolution& U_0) {
    obj.validate();
    PullbackKernels id;
    AdjointSolution P;
    P.S = solve_adjoint_temperature(disc, params, obj, T_wall, U_0, U_0, id);
    std::tie(P.v, P.q) = solve_adjoint_stokes(disc, params, obj, P.S, U_0, U_0, id);
    return P;
}

AdjointSolution solve_averaged_adjoint(const Discretization& disc, const PhysicalParams& params,
                                       const BoundaryData& data, const ObjectiveParams& obj,
                                       const AdmissibleField& V, double t,
                                       const StateSolution& U_0) {
    obj.validate();
    auto liftings = std::make_pair(U_0.lift_u, U_0.lift_T);
    StateSolution U_t = solve_state(disc, params, data, V, t, &liftings);
    PullbackKernels kernels = PullbackKernels::of(V, t);
    AdjointSolution P;
    P.S = solve_adjoint_temperature(disc, params, obj, data.T_wall, U_t, U_0, kernels);
    std::tie(P.v, P.q) = solve_adjoint_stokes(disc, params, obj, P.S, U_t, U_0, kernels);
    return P;
}

} // namespace mc
