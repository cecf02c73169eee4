#include "mc/verify.hpp"

#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <json.hpp>

namespace mc {

std::string VerifyReport::to_json() const {
    nlohmann::json j;
    j["all_pass"] = all_pass();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
        j["checks"].push_back({{"name", c.name},
                               {"value", c.value},
                               {"threshold", c.threshold},
                               {"comparison", c.lower_bound ? ">=" : "<="},
                               {"pass", c.pass}});
    }
    return j.dump(2);
}

// ---- kernel identities ---------------------------------------------------

KernelIdentityReport kernel_identity_check(const AdmissibleField& V,
                                           const std::vector<Vec2>& points, double fd_step) {
    KernelIdentityReport rep;
    const double h = fd_step;
    for (const auto& p : points) {
        KernelRates rates = kernel_rates_at(V, p);
        KernelValues plus = kernels_at(FlowMap{V, h}, p);
        KernelValues minus = kernels_at(FlowMap{V, -h}, p);

        rep.xi_dev = std::max(rep.xi_dev, std::abs((plus.xi - minus.xi) / (2 * h) - rates.xi_rate));
        rep.A_dev = std::max(rep.A_dev,
                             (((plus.A - minus.A) / (2 * h)) - rates.A_rate).cwiseAbs().maxCoeff());
        rep.B_dev = std::max(rep.B_dev,
                             (((plus.B - minus.B) / (2 * h)) - rates.B_rate).cwiseAbs().maxCoeff());

        Mat2 DV = V.jacobian(p);
        for (int k = 0; k < 8; ++k) {
            double th = k * M_PI / 4.0;
            Vec2 n(std::cos(th), std::sin(th));
            double fd = (plus.omega(n) - minus.omega(n)) / (2 * h);
            rep.omega_dev = std::max(rep.omega_dev, std::abs(fd - rates.omega_rate(n, DV)));
        }
    }
    return rep;
}

// ---- transport identities ------------------------------------------------

namespace {

Mesh flow_deformed(const Mesh& mesh, const AdmissibleField& V, double t) {
    FlowMap flow{V, t};
    std::vector<Vec2> moved = flow_points(flow, mesh.vertices());
    std::vector<Vec2> displacement(moved.size());
    for (size_t i = 0; i < moved.size(); ++i) displacement[i] = moved[i] - mesh.vertices()[i];
    return mesh.deformed(displacement);
}

} // namespace

TransportReport transport_identity_check(const Mesh& mesh, const ScalarData& f,
                                         const AdmissibleField& V, double t) {
    TransportReport rep;
    Mesh def = flow_deformed(mesh, V, t);
    rep.volume_deformed = integrate_cells(def, [&](const Vec2& x) { return f(x); });
    rep.facet_deformed = integrate_facets(def, [&](const Vec2& x, const Vec2&) { return f(x); });

    PullbackKernels kernels = PullbackKernels::of(V, t);
    double vol = 0.0;
    for (int ci = 0; ci < mesh.n_cells(); ++ci) {
        CellGeometry geo = cell_geometry(mesh, ci);
        for (const auto& q : cell_quadrature()) {
            KernelValues k = kernels.at(geo.map(q.ref));
            vol += q.w * geo.detJ * f(k.mapped) * k.xi;
        }
    }
    rep.volume_pulled = vol;

    double fac = 0.0;
    for (const auto& be : mesh.boundary_edges()) {
        Vec2 a = mesh.vertices()[be.a], b = mesh.vertices()[be.b];
        Vec2 d = b - a;
        double len = d.norm();
        Vec2 n(d.y() / len, -d.x() / len);
        for (const auto& q : edge_quadrature()) {
            Vec2 x = a + q.s * d;
            fac += q.w * len * f(kernels.map(x)) * kernels.omega(x, n);
        }
    }
    rep.facet_pulled = fac;
    return rep;
}

// ---- Taylor tests --------------------------------------------------------

double TaylorReport::min_order() const {
    double m = std::numeric_limits<double>::infinity();
    for (double o : orders) m = std::min(m, o);
    return orders.empty() ? 0.0 : m;
}

namespace {

double kernel_volume(const Mesh& mesh, const AdmissibleField& V, double t) {
    PullbackKernels kernels = PullbackKernels::of(V, t);
    double vol = 0.0;
    for (int ci = 0; ci < mesh.n_cells(); ++ci) {
        CellGeometry geo = cell_geometry(mesh, ci);
        for (const auto& q : cell_quadrature())
            vol += q.w * geo.detJ * kernels.at(geo.map(q.ref)).xi;
    }
    return vol;
}

double kernel_perimeter(const Mesh& mesh, const AdmissibleField& V, double t) {
    PullbackKernels kernels = PullbackKernels::of(V, t);
    double per = 0.0;
    for (const auto& be : mesh.boundary_edges()) {
        Vec2 a = mesh.vertices()[be.a], b = mesh.vertices()[be.b];
        Vec2 d = b - a;
        double len = d.norm();
        Vec2 n(d.y() / len, -d.x() / len);
        for (const auto& q : edge_quadrature())
            per += q.w * len * kernels.omega(a + q.s * d, n);
    }
    return per;
}

double divergence_integral(const Mesh& mesh, const AdmissibleField& V) {
    return integrate_cells(mesh, [&](const Vec2& x) { return V.divergence(x); });
}

double tangential_divergence_integral(const Mesh& mesh, const AdmissibleField& V) {
    return integrate_facets(mesh, [&](const Vec2& x, const Vec2& n) {
        Mat2 DV = V.jacobian(x);
        return DV.trace() - n.dot(DV * n);
    });
}

} // namespace

TaylorReport taylor_test(const Mesh& mesh, TaylorObjective objective, const AdmissibleField& V,
                         double t0, int n, const PhysicalParams* params,
                         const BoundaryData* data, const ObjectiveParams* obj) {
    TaylorReport rep;
    double J0 = 0.0;
    std::function<double(double)> J_at;

    switch (objective) {
        case TaylorObjective::Perimeter:
            J0 = kernel_perimeter(mesh, V, 0.0);
            rep.derivative = tangential_divergence_integral(mesh, V);
            J_at = [&](double t) { return kernel_perimeter(mesh, V, t); };
            break;
        case TaylorObjective::Volume:
            J0 = kernel_volume(mesh, V, 0.0);
            rep.derivative = divergence_integral(mesh, V);
            J_at = [&](double t) { return kernel_volume(mesh, V, t); };
            break;
        case TaylorObjective::Full: {
            if (!params || !data || !obj)
                throw ConfigError("full-objective Taylor test needs physics and objective data");
            auto disc = std::make_shared<Discretization>(Mesh(mesh));
            StateSolution U0 = solve_state(*disc, *params, *data);
            AdjointSolution P0 = solve_adjoint(*disc, *params, *obj, data->T_wall, U0);
            J0 = cost(*disc, U0, *params, *obj, data->T_wall).total;
            rep.derivative = shape_derivative(*disc, U0, P0, *params, *obj, data->T_wall, V);
            J_at = [&, disc](double t) {
                Discretization dt(flow_deformed(mesh, V, t));
                StateSolution U = solve_state(dt, *params, *data);
                return cost(dt, U, *params, *obj, data->T_wall).total;
            };
            break;
        }
    }

    double t = t0;
    for (int k = 0; k < n; ++k, t *= 0.5) {
        rep.ts.push_back(t);
        rep.remainders.push_back(std::abs(J_at(t) - J0 - t * rep.derivative));
    }
    for (int k = 0; k + 1 < n; ++k) {
        double a = rep.remainders[k], b = rep.remainders[k + 1];
        rep.orders.push_back(b > 0 ? std::log2(a / b) : std::numeric_limits<double>::infinity());
    }
    double worst = 0.0;
    for (double r : rep.remainders) worst = std::max(worst, r);
    rep.degenerate = worst < 1e-15 && std::abs(rep.derivative) < 1e-15;
    return rep;
}

// ---- manufactured solutions ----------------------------------------------

namespace {

struct StokesFields {
    std::shared_ptr<Discretization> disc;
    DiscreteField u_total, p;
};

StokesFields solve_stokes_on(Mesh mesh, const PhysicalParams& params, const BoundaryData& data) {
    StokesFields out;
    out.disc = std::make_shared<Discretization>(std::move(mesh));
    auto [lift_u, lift_T] = make_liftings(*out.disc, data);
    PullbackKernels id;
    auto [u0, p0] = solve_stokes(*out.disc, params, lift_u, id);
    out.u_total = u0;
    out.u_total.coeffs += lift_u.coeffs;
    out.p = p0;
    return out;
}

// L2 distance between a coarse solution and one on a finer mesh, by
// quadrature on the coarse mesh
double vector_l2_diff(const StokesFields& coarse, const StokesFields& fine) {
    const Mesh& mesh = coarse.disc->mesh();
    double acc = 0.0;
    for (int ci = 0; ci < mesh.n_cells(); ++ci) {
        CellGeometry geo = cell_geometry(mesh, ci);
        for (const auto& q : cell_quadrature()) {
            Vec2 x = geo.map(q.ref);
            Vec2 diff = eval_vector(coarse.u_total, ci, q.ref) - eval_vector_at(fine.u_total, x);
            acc += q.w * geo.detJ * diff.squaredNorm();
        }
    }
    return std::sqrt(acc);
}

double scalar_l2_diff(const StokesFields& coarse, const StokesFields& fine) {
    const Mesh& mesh = coarse.disc->mesh();
    double acc = 0.0;
    for (int ci = 0; ci < mesh.n_cells(); ++ci) {
        CellGeometry geo = cell_geometry(mesh, ci);
        for (const auto& q : cell_quadrature()) {
            Vec2 x = geo.map(q.ref);
            double diff = eval_scalar(coarse.p, ci, q.ref) - eval_scalar_at(fine.p, x);
            acc += q.w * geo.detJ * diff * diff;
        }
    }
    return std::sqrt(acc);
}

} // namespace

VerifyReport manufactured_suite(int base_n, int levels) {
    VerifyReport rep;
    PhysicalParams params; // all unit

    // Poiseuille flow: u = (y(1-y), 0), p = 2(1-x); both lie in the
    // Taylor-Hood space, so the discrete solution is nodally exact
    {
        BoundaryData data;
        data.u_in = VectorData::parse("y*(1-y)", "0");
        StokesFields s = solve_stokes_on(unit_square_mesh(base_n), params, data);
        const Space& V = s.disc->velocity();
        const Space& P = s.disc->pressure();
        double u_dev = 0.0, p_dev = 0.0;
        for (int d = 0; d < V.n_scalar_dofs(); ++d) {
            Vec2 x = V.scalar_dof_point(d);
            u_dev = std::max(u_dev, std::abs(s.u_total.coeffs[2 * d] - x.y() * (1 - x.y())));
            u_dev = std::max(u_dev, std::abs(s.u_total.coeffs[2 * d + 1]));
        }
        for (int d = 0; d < P.n_scalar_dofs(); ++d)
            p_dev = std::max(p_dev,
                             std::abs(s.p.coeffs[d] - 2.0 * (1.0 - P.scalar_dof_point(d).x())));
        rep.add(CheckResult::at_most("poiseuille_velocity_nodal", u_dev, 1e-10));
        rep.add(CheckResult::at_most("poiseuille_pressure_nodal", p_dev, 1e-10));
    }

    // linear temperature profile with a Robin wall: T = y on the unit
    // square, inlet at the bottom, wall on top, T_wall = 2 -> flux Q = 1
    {
        auto tagger = [](const Vec2& mid) {
            if (mid.y() < 1e-12) return BoundaryTag::Inlet;
            if (mid.y() > 1.0 - 1e-12) return BoundaryTag::Wall;
            return BoundaryTag::Outlet;
        };
        Discretization disc(generate_rectangle(0, 0, 1, 1, base_n, base_n, tagger));
        DiscreteField u_zero(disc.velocity());
        DiscreteField lift_T(disc.temperature());
        ScalarData T_wall = ScalarData::parse("2");
        PullbackKernels id;
        DiscreteField T = solve_temperature(disc, params, u_zero, lift_T, T_wall, id);
        const Space& W = disc.temperature();
        double t_dev = 0.0;
        for (int d = 0; d < W.n_scalar_dofs(); ++d)
            t_dev = std::max(t_dev, std::abs(T.coeffs[d] - W.scalar_dof_point(d).y()));
        double Q = heat_flux(T, T_wall, params.alpha, id);
        rep.add(CheckResult::at_most("robin_temperature_nodal", t_dev, 1e-10));
        rep.add(CheckResult::at_most("robin_flux_error", std::abs(Q - 1.0), 1e-10));
    }

    // sinusoidal-inlet Stokes flow: no closed form; convergence order from
    // differences of consecutive refinements
    if (levels >= 3) {
        BoundaryData data;
        data.u_in = VectorData::parse("sin(pi*y)", "0");
        std::vector<StokesFields> sols;
        for (int l = 0; l < levels; ++l)
            sols.push_back(solve_stokes_on(unit_square_mesh(base_n << l), params, data));
        std::vector<double> du, dp;
        for (int l = 0; l + 1 < levels; ++l) {
            du.push_back(vector_l2_diff(sols[l], sols[l + 1]));
            dp.push_back(scalar_l2_diff(sols[l], sols[l + 1]));
        }
        double order_u = std::log2(du[0] / du[1]);
        double order_p = std::log2(dp[0] / dp[1]);
        rep.add(CheckResult::at_least("stokes_velocity_order", order_u, 2.7));
        rep.add(CheckResult::at_least("stokes_pressure_order", order_p, 1.9));
    }
    return rep;
}

// ---- inf-sup -------------------------------------------------------------

double infsup_check(const Mesh& mesh, bool equal_order, int max_dofs) {
    Family vel_family = equal_order ? Family::P1 : Family::P2;
    Space Vs = Space::build(mesh, vel_family);
    Space Ps = Space::build(mesh, Family::P1);
    const int ns = Vs.n_scalar_dofs();
    const int np = Ps.n_scalar_dofs();
    const int nloc = vel_family == Family::P1 ? 3 : 6;

    std::vector<bool> fixed(ns, false);
    for (int d : Vs.boundary_scalar_dofs({BoundaryTag::Inlet, BoundaryTag::Wall})) fixed[d] = true;
    std::vector<int> free_map(ns, -1);
    int n_free = 0;
    for (int d = 0; d < ns; ++d)
        if (!fixed[d]) free_map[d] = n_free++;

    if (2 * n_free + np > max_dofs)
        throw ConfigError("inf-sup eigensolve limited to " + std::to_string(max_dofs) +
                          " dofs; use a coarser mesh");

    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(2 * n_free, 2 * n_free);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(np, 2 * n_free);
    Eigen::MatrixXd Mp = Eigen::MatrixXd::Zero(np, np);

    std::vector<double> phi(nloc);
    std::vector<Vec2> g(nloc), gp(nloc);
    for (int ci = 0; ci < mesh.n_cells(); ++ci) {
        CellGeometry geo = cell_geometry(mesh, ci);
        for (const auto& q : cell_quadrature()) {
            double w = q.w * geo.detJ;
            basis_values(vel_family, q.ref, phi.data());
            basis_gradients(vel_family, q.ref, g.data());
            for (int i = 0; i < nloc; ++i) gp[i] = geo.JinvT * g[i];
            double psi[3];
            basis_values(Family::P1, q.ref, psi);

            for (int l = 0; l < nloc; ++l) {
                int dl = free_map[Vs.cell_scalar_dof(ci, l)];
                if (dl < 0) continue;
                for (int k = 0; k < nloc; ++k) {
                    int dk = free_map[Vs.cell_scalar_dof(ci, k)];
                    if (dk < 0) continue;
                    double h1 = w * (gp[l].dot(gp[k]) + phi[l] * phi[k]);
                    K(2 * dl, 2 * dk) += h1;
                    K(2 * dl + 1, 2 * dk + 1) += h1;
                }
                for (int m = 0; m < 3; ++m) {
                    int dm = Ps.cell_scalar_dof(ci, m);
                    B(dm, 2 * dl) += -w * psi[m] * gp[l].x();
                    B(dm, 2 * dl + 1) += -w * psi[m] * gp[l].y();
                }
            }
            for (int m = 0; m < 3; ++m)
                for (int r = 0; r < 3; ++r)
                    Mp(Ps.cell_scalar_dof(ci, m), Ps.cell_scalar_dof(ci, r)) +=
                        w * psi[m] * psi[r];
        }
    }

    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success)
        throw SolverError("velocity Gram matrix is not positive definite");
    Eigen::MatrixXd S = B * llt.solve(B.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(S, Mp);
    if (eig.info() != Eigen::Success) throw SolverError("inf-sup eigensolve failed");
    double lambda_min = eig.eigenvalues().minCoeff();
    return std::sqrt(std::max(lambda_min, 0.0));
}

// ---- continuity sweeps ---------------------------------------------------

SweepReport continuity_sweep(const Discretization& disc, const PhysicalParams& params,
                             const BoundaryData& data, const ObjectiveParams& obj,
                             const AdmissibleField& V, const std::vector<double>& ts) {
    SweepReport rep;
    StateSolution U0 = solve_state(disc, params, data);
    AdjointSolution P0 = solve_adjoint(disc, params, obj, data.T_wall, U0);
    auto liftings = std::make_pair(U0.lift_u, U0.lift_T);

    auto state_norm_of = [](const StateSolution& U) {
        return std::sqrt(U.u0.coeffs.squaredNorm() + U.p0.coeffs.squaredNorm() +
                         U.T0.coeffs.squaredNorm());
    };
    auto adjoint_norm_of = [](const AdjointSolution& P) {
        return std::sqrt(P.v.coeffs.squaredNorm() + P.q.coeffs.squaredNorm() +
                         P.S.coeffs.squaredNorm());
    };

    for (double t : ts) {
        StateSolution U_t = solve_state(disc, params, data, V, t, &liftings);
        AdjointSolution P_t = solve_averaged_adjoint(disc, params, data, obj, V, t, U0);
        rep.ts.push_back(t);
        rep.state_diff.push_back(std::sqrt((U_t.u0.coeffs - U0.u0.coeffs).squaredNorm() +
                                           (U_t.p0.coeffs - U0.p0.coeffs).squaredNorm() +
                                           (U_t.T0.coeffs - U0.T0.coeffs).squaredNorm()));
        rep.adjoint_diff.push_back(std::sqrt((P_t.v.coeffs - P0.v.coeffs).squaredNorm() +
                                             (P_t.q.coeffs - P0.q.coeffs).squaredNorm() +
                                             (P_t.S.coeffs - P0.S.coeffs).squaredNorm()));
        rep.state_norm.push_back(state_norm_of(U_t));
        rep.adjoint_norm.push_back(adjoint_norm_of(P_t));
    }
    return rep;
}

// ---- default suite -------------------------------------------------------

VerifyReport verify_default_suite() {
    VerifyReport rep;
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> unit(0.05, 0.95);

    // kernel identities for three fields at 100 interior points
    {
        std::vector<Vec2> points;
        for (int i = 0; i < 100; ++i) points.emplace_back(unit(rng), unit(rng));
        for (const char* name : {"interior_bump", "top_wall_bump", "swirl_bump"}) {
            KernelIdentityReport k = kernel_identity_check(AdmissibleField::named(name), points);
            rep.add(CheckResult::at_most(std::string("kernel_rates_") + name, k.max_dev(), 1e-6));
        }
    }

    // transport identities: affine field exact, bump field converging
    {
        Mat2 M;
        M << 0.1, 0.0, 0.0, 0.2;
        AdmissibleField affine = AdmissibleField::affine(M);
        ScalarData f = ScalarData::parse("1 + x*y");
        TransportReport tr = transport_identity_check(unit_square_mesh(8), f, affine, 0.5);
        rep.add(CheckResult::at_most("transport_affine_volume",
                                     std::abs(tr.volume_deformed - tr.volume_pulled), 1e-10));
        rep.add(CheckResult::at_most("transport_affine_facet",
                                     std::abs(tr.facet_deformed - tr.facet_pulled), 1e-10));

        AdmissibleField bump = AdmissibleField::named("top_wall_bump");
        std::vector<double> verr, ferr;
        for (int n : {8, 16, 32}) {
            TransportReport tb = transport_identity_check(unit_square_mesh(n), f, bump, 0.05);
            verr.push_back(std::abs(tb.volume_deformed - tb.volume_pulled));
            ferr.push_back(std::abs(tb.facet_deformed - tb.facet_pulled));
        }
        double vorder = std::min(std::log2(verr[0] / verr[1]), std::log2(verr[1] / verr[2]));
        double forder = std::min(std::log2(ferr[0] / ferr[1]), std::log2(ferr[1] / ferr[2]));
        rep.add(CheckResult::at_least("transport_bump_volume_order", vorder, 1.8));
        rep.add(CheckResult::at_least("transport_bump_facet_order", forder, 1.8));
    }

    // Taylor remainders of the geometric functionals
    {
        Mesh mesh = unit_square_mesh(16);
        AdmissibleField V = AdmissibleField::named("top_wall_bump");
        TaylorReport per = taylor_test(mesh, TaylorObjective::Perimeter, V, 1e-2, 6);
        TaylorReport vol = taylor_test(mesh, TaylorObjective::Volume, V, 1e-2, 6);
        rep.add(CheckResult::at_least("taylor_perimeter_order", per.min_order(), 1.95));
        rep.add(CheckResult::at_least("taylor_volume_order", vol.min_order(), 1.95));
    }

    rep.merge(manufactured_suite());

    // inf-sup: positive and refinement-stable for Taylor-Hood, collapsing
    // for the equal-order pair
    {
        double s8 = infsup_check(unit_square_mesh(8));
        double s16 = infsup_check(unit_square_mesh(16));
        double bad = infsup_check(unit_square_mesh(8), true);
        rep.add(CheckResult::at_least("infsup_taylor_hood", s8, 1e-3));
        rep.add(CheckResult::at_most("infsup_refinement_drift", std::abs(s16 - s8) / s8, 0.2));
        rep.add(CheckResult::at_most("infsup_equal_order_control", bad / s8, 0.2));
    }

    // continuity of state and averaged adjoint in the flow parameter
    {
        Discretization disc(unit_square_mesh(8));
        PhysicalParams params;
        BoundaryData data;
        data.u_in = VectorData::parse("y*(1-y)", "0");
        data.T_wall = ScalarData::parse("2");
        ObjectiveParams obj;
        obj.lambda1 = 1.0;
        obj.Q_des = 0.0;
        AdmissibleField V = AdmissibleField::named("interior_bump");
        SweepReport sw =
            continuity_sweep(disc, params, data, obj, V, {0.1, 0.05, 0.025, 0.0125});

        double worst_rate = std::numeric_limits<double>::infinity();
        for (size_t k = 0; k + 1 < sw.ts.size(); ++k) {
            worst_rate = std::min(worst_rate, std::log2(sw.state_diff[k] / sw.state_diff[k + 1]));
            worst_rate =
                std::min(worst_rate, std::log2(sw.adjoint_diff[k] / sw.adjoint_diff[k + 1]));
        }
        rep.add(CheckResult::at_least("continuity_rate", worst_rate, 0.9));

        StateSolution U0 = solve_state(disc, params, data);
        AdjointSolution P0 = solve_adjoint(disc, params, obj, data.T_wall, U0);
        double u0n = std::sqrt(U0.u0.coeffs.squaredNorm() + U0.p0.coeffs.squaredNorm() +
                               U0.T0.coeffs.squaredNorm());
        double p0n = std::sqrt(P0.v.coeffs.squaredNorm() + P0.q.coeffs.squaredNorm() +
                               P0.S.coeffs.squaredNorm());
        double umax = 0.0, pmax = 0.0;
        for (size_t k = 0; k < sw.ts.size(); ++k) {
            umax = std::max(umax, sw.state_norm[k]);
            pmax = std::max(pmax, sw.adjoint_norm[k]);
        }
        rep.add(CheckResult::at_most("state_norm_bound", umax / u0n, 2.0));
        rep.add(CheckResult::at_most("adjoint_norm_bound", pmax / p0n, 2.0));
    }
    return rep;
}

} // namespace mc
