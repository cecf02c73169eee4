#include "mc/objective.hpp"

#include <cmath>

namespace mc {

namespace {

// One quadrature sample of the shape-derivative density, linear in the
// direction: contribution = w * (cV . V(x) + CM : DV(x)).
struct DerivativeSample {
    int cell;
    Vec2 ref;
    Vec2 x;
    double w;
    Vec2 cV;
    Mat2 CM;
};

Mat2 sym(const Mat2& M) { return 0.5 * (M + M.transpose()); }

std::vector<DerivativeSample> derivative_samples(const Discretization& disc,
                                                 const StateSolution& U0,
                                                 const AdjointSolution& P0,
                                                 const PhysicalParams& params,
                                                 const ObjectiveParams& obj,
                                                 const ScalarData& T_wall) {
    const Mesh& mesh = disc.mesh();
    const double rc = params.rho * params.cp;
    DiscreteField u_tot = U0.u_total();
    DiscreteField T_tot = U0.T_total();
    PullbackKernels id;
    double Q = heat_flux(T_tot, T_wall, params.alpha, id);
    double flux_factor = 2.0 * obj.lambda1 * (Q - obj.Q_des);

    std::vector<DerivativeSample> samples;
    for (int ci = 0; ci < mesh.n_cells(); ++ci) {
        CellGeometry geo = cell_geometry(mesh, ci);
        bool in_sub = mesh.subdomain_flags()[ci];
        for (const auto& q : cell_quadrature()) {
            DerivativeSample s;
            s.cell = ci;
            s.ref = q.ref;
            s.x = geo.map(q.ref);
            s.w = q.w * geo.detJ;
            s.cV = Vec2::Zero();
            s.CM = Mat2::Zero();

            Mat2 Du = eval_vector_jacobian(u_tot, ci, geo, q.ref);
            Mat2 Dv = eval_vector_jacobian(P0.v, ci, geo, q.ref);
            double p0 = eval_scalar(U0.p0, ci, q.ref);
            double q0 = eval_scalar(P0.q, ci, q.ref);
            Vec2 gT = eval_scalar_gradient(T_tot, ci, geo, q.ref);
            Vec2 gS = eval_scalar_gradient(P0.S, ci, geo, q.ref);
            double S0 = eval_scalar(P0.S, ci, q.ref);
            Vec2 u = eval_vector(u_tot, ci, q.ref);

            // viscous term: mu (Du (divV I - 2 eps(V))) : Dv
            s.CM += params.mu * ((Du.array() * Dv.array()).sum() * Mat2::Identity() -
                                 2.0 * sym(Du.transpose() * Dv));
            // pressure terms: -p tr(Dv (divV I - DV)), -q tr(Du (divV I - DV))
            s.CM += -p0 * Dv.trace() * Mat2::Identity() + p0 * Dv.transpose();
            s.CM += -q0 * Du.trace() * Mat2::Identity() + q0 * Du.transpose();
            // conduction: kappa ((divV I - 2 eps(V)) grad T) . grad S
            s.CM += params.kappa *
                    (gT.dot(gS) * Mat2::Identity() - 2.0 * sym(gS * gT.transpose()));
            // convection: rho C_p u . ((divV I - DV^T) grad T) S
            s.CM += rc * S0 * (u.dot(gT) * Mat2::Identity() - gT * u.transpose());
            // subdomain tracking
            if (in_sub && obj.lambda2 > 0) {
                Vec2 mis = u - obj.u_des(s.x);
                s.CM += obj.lambda2 * mis.squaredNorm() * Mat2::Identity();
                s.cV += -2.0 * obj.lambda2 * obj.u_des.jacobian(s.x).transpose() * mis;
            }
            samples.push_back(s);
        }
    }

    // boundary terms: tangential divergence is DV : (tau tau^T) on a
    // straight edge
    for (const auto& be : mesh.boundary_edges()) {
        CellGeometry geo = cell_geometry(mesh, be.cell);
        Vec2 a = mesh.vertices()[be.a], b = mesh.vertices()[be.b];
        Vec2 d = b - a;
        double len = d.norm();
        Vec2 tau = d / len;
        Mat2 tt = tau * tau.transpose();
        bool wall = be.tag == BoundaryTag::Wall;
        for (const auto& q : edge_quadrature()) {
            DerivativeSample s;
            s.cell = be.cell;
            s.ref = boundary_ref_point(mesh, be, geo, q.s);
            s.x = a + q.s * d;
            s.w = q.w * len;
            s.cV = Vec2::Zero();
            s.CM = obj.lambda3 * tt;
            if (wall) {
                double T_tot_v = eval_scalar(T_tot, be.cell, s.ref);
                double S0 = eval_scalar(P0.S, be.cell, s.ref);
                double gap = T_wall(s.x) - T_tot_v;
                s.CM += (flux_factor * params.alpha * gap - params.alpha * gap * S0) * tt;
                s.cV += (flux_factor - S0) * params.alpha * T_wall.gradient(s.x);
            }
            samples.push_back(s);
        }
    }
    return samples;
}

} // namespace

double heat_flux(const DiscreteField& T_total, const ScalarData& T_wall, double alpha,
                 const PullbackKernels& kernels) {
    const Mesh& mesh = T_total.space->mesh();
    double flux = 0.0;
    for (const auto& be : mesh.boundary_edges()) {
        if (be.tag != BoundaryTag::Wall) continue;
        CellGeometry geo = cell_geometry(mesh, be.cell);
        Vec2 a = mesh.vertices()[be.a], b = mesh.vertices()[be.b];
        Vec2 d = b - a;
        double len = d.norm();
        Vec2 n(d.y() / len, -d.x() / len);
        for (const auto& q : edge_quadrature()) {
            Vec2 x = a + q.s * d;
            Vec2 ref = boundary_ref_point(mesh, be, geo, q.s);
            double T_val = eval_scalar(T_total, be.cell, ref);
            flux += q.w * len * alpha * (T_wall(kernels.map(x)) - T_val) * kernels.omega(x, n);
        }
    }
    return flux;
}

CostBreakdown cost(const Discretization& disc, const StateSolution& U, const PhysicalParams& params,
                   const ObjectiveParams& obj, const ScalarData& T_wall,
                   const PullbackKernels& kernels) {
    const Mesh& mesh = disc.mesh();
    CostBreakdown out;
    DiscreteField T_tot = U.T_total();
    DiscreteField u_tot = U.u_total();

    out.q_value = heat_flux(T_tot, T_wall, params.alpha, kernels);
    double mismatch = out.q_value - obj.Q_des;
    out.term_flux = obj.lambda1 * mismatch * mismatch;

    double tracking = 0.0;
    for (int ci = 0; ci < mesh.n_cells(); ++ci) {
        if (!mesh.subdomain_flags()[ci]) continue;
        CellGeometry geo = cell_geometry(mesh, ci);
        for (const auto& q : cell_quadrature()) {
            Vec2 x = geo.map(q.ref);
            KernelValues k = kernels.at(x);
            Vec2 mis = eval_vector(u_tot, ci, q.ref) - obj.u_des(k.mapped);
            tracking += q.w * geo.detJ * mis.squaredNorm() * k.xi;
        }
    }
    out.term_tracking = obj.lambda2 * tracking;

    double perimeter = 0.0;
    for (const auto& be : mesh.boundary_edges()) {
        Vec2 a = mesh.vertices()[be.a], b = mesh.vertices()[be.b];
        Vec2 d = b - a;
        double len = d.norm();
        Vec2 n(d.y() / len, -d.x() / len);
        for (const auto& q : edge_quadrature())
            perimeter += q.w * len * kernels.omega(a + q.s * d, n);
    }
    out.term_perimeter = obj.lambda3 * perimeter;

    out.total = out.term_flux + out.term_tracking + out.term_perimeter;
    return out;
}

std::pair<double, double> pullback_consistency(const Discretization& disc,
                                               const PhysicalParams& params,
                                               const BoundaryData& data, const ObjectiveParams& obj,
                                               const AdmissibleField& V, double t) {
    // fresh solve on the transported mesh
    FlowMap flow{V, t};
    std::vector<Vec2> moved = flow_points(flow, disc.mesh().vertices());
    std::vector<Vec2> displacement(moved.size());
    for (size_t i = 0; i < moved.size(); ++i)
        displacement[i] = moved[i] - disc.mesh().vertices()[i];
    Discretization disc_t(disc.mesh().deformed(displacement));
    StateSolution U_def = solve_state(disc_t, params, data);
    double J_deformed = cost(disc_t, U_def, params, obj, data.T_wall).total;

    // pulled-back evaluation on the reference mesh
    StateSolution U_t = solve_state(disc, params, data, V, t);
    PullbackKernels kernels = PullbackKernels::of(V, t);
    double j_pulled = cost(disc, U_t, params, obj, data.T_wall, kernels).total;
    return {J_deformed, j_pulled};
}

double shape_derivative(const Discretization& disc, const StateSolution& U0,
                        const AdjointSolution& P0, const PhysicalParams& params,
                        const ObjectiveParams& obj, const ScalarData& T_wall,
                        const AdmissibleField& V) {
    double out = 0.0;
    for (const auto& s : derivative_samples(disc, U0, P0, params, obj, T_wall))
        out += s.w * (s.cV.dot(V(s.x)) + (s.CM.array() * V.jacobian(s.x).array()).sum());
    return out;
}

double shape_derivative(const Discretization& disc, const StateSolution& U0,
                        const AdjointSolution& P0, const PhysicalParams& params,
                        const ObjectiveParams& obj, const ScalarData& T_wall,
                        const DiscreteField& Vh) {
    const Mesh& mesh = disc.mesh();
    double out = 0.0;
    for (const auto& s : derivative_samples(disc, U0, P0, params, obj, T_wall)) {
        CellGeometry geo = cell_geometry(mesh, s.cell);
        Vec2 v = eval_vector(Vh, s.cell, s.ref);
        Mat2 J = eval_vector_jacobian(Vh, s.cell, geo, s.ref);
        out += s.w * (s.cV.dot(v) + (s.CM.array() * J.array()).sum());
    }
    return out;
}

ShapeGradient assemble_shape_gradient(const Discretization& disc, const StateSolution& U0,
                                      const AdjointSolution& P0, const PhysicalParams& params,
                                      const ObjectiveParams& obj, const ScalarData& T_wall,
                                      const RieszParams& riesz) {
    const Mesh& mesh = disc.mesh();
    const Space& V = disc.velocity();

    ShapeGradient grad;
    grad.inner = riesz;
    grad.dual = Eigen::VectorXd::Zero(V.ndofs());

    for (const auto& s : derivative_samples(disc, U0, P0, params, obj, T_wall)) {
        CellGeometry geo = cell_geometry(mesh, s.cell);
        double phi[6];
        Vec2 g[6];
        basis_values(Family::P2, s.ref, phi);
        basis_gradients(Family::P2, s.ref, g);
        for (int l = 0; l < 6; ++l) {
            Vec2 gp = geo.JinvT * g[l];
            int dl = V.cell_scalar_dof(s.cell, l);
            for (int c = 0; c < 2; ++c)
                grad.dual[2 * dl + c] += s.w * (s.cV[c] * phi[l] + s.CM.row(c).dot(gp));
        }
    }
    std::vector<int> fixed = V.boundary_dofs({BoundaryTag::Inlet, BoundaryTag::Outlet});
    for (int d : fixed) grad.dual[d] = 0.0;

    // Riesz representative: elasticity inner product, negated dual as load
    std::vector<Triplet> trip;
    for (int ci = 0; ci < mesh.n_cells(); ++ci) {
        CellGeometry geo = cell_geometry(mesh, ci);
        for (const auto& q : cell_quadrature()) {
            double w = q.w * geo.detJ;
            double phi[6];
            Vec2 g[6];
            basis_values(Family::P2, q.ref, phi);
            basis_gradients(Family::P2, q.ref, g);
            Vec2 gp[6];
            for (int i = 0; i < 6; ++i) gp[i] = geo.JinvT * g[i];
            for (int l = 0; l < 6; ++l) {
                int dl = V.cell_scalar_dof(ci, l);
                for (int k = 0; k < 6; ++k) {
                    int dk = V.cell_scalar_dof(ci, k);
                    double dot = gp[l].dot(gp[k]);
                    for (int c = 0; c < 2; ++c)
                        for (int e = 0; e < 2; ++e) {
                            double eps = 0.5 * ((c == e ? dot : 0.0) + gp[k][c] * gp[l][e]);
                            double val = 2.0 * riesz.mu_e * w * eps;
                            if (c == e) val += riesz.delta * w * phi[l] * phi[k];
                            trip.emplace_back(2 * dl + c, 2 * dk + e, val);
                        }
                }
            }
        }
    }
    SparseSystem sys;
    sys.A.resize(V.ndofs(), V.ndofs());
    sys.A.setFromTriplets(trip.begin(), trip.end());
    sys.b = -grad.dual;
    apply_dirichlet_zero(sys, fixed);
    grad.riesz = DiscreteField(V);
    grad.riesz.coeffs = solve_sparse(sys);
    return grad;
}

std::tuple<double, double, double> normalization_weights(const Discretization& disc,
                                                         const StateSolution& U0,
                                                         const PhysicalParams& params,
                                                         double Q_des, const VectorData& u_des,
                                                         const ScalarData& T_wall) {
    const Mesh& mesh = disc.mesh();
    PullbackKernels id;
    double Q0 = heat_flux(U0.T_total(), T_wall, params.alpha, id);
    double dq = Q0 - Q_des;
    if (std::abs(dq) < 1e-14)
        throw ConfigError("flux already matches the target; set weights explicitly");

    DiscreteField u_tot = U0.u_total();
    double tracking = 0.0;
    for (int ci = 0; ci < mesh.n_cells(); ++ci) {
        if (!mesh.subdomain_flags()[ci]) continue;
        CellGeometry geo = cell_geometry(mesh, ci);
        for (const auto& q : cell_quadrature()) {
            Vec2 mis = eval_vector(u_tot, ci, q.ref) - u_des(geo.map(q.ref));
            tracking += q.w * geo.detJ * mis.squaredNorm();
        }
    }
    if (tracking < 1e-14)
        throw ConfigError("tracking term vanishes on the initial design; set weights explicitly");

    double perimeter = mesh.boundary_length();
    return {1.0 / (dq * dq), 1.0 / tracking, 1e-2 / perimeter};
}

} // namespace mc
