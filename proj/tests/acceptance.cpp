// Acceptance harness: one criterion per invocation (argv[1] in 1..9), one
// PASS/FAIL line on stdout, exit code 0/1.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "helpers.hpp"
#include "mc/verify.hpp"

using namespace mc;
using namespace mc::testing;

namespace {

struct Criterion {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

// 1. analytic kernel rates vs finite differences of the flow
Criterion kernel_identities() {
    Criterion c;
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    std::vector<Vec2> points;
    for (int i = 0; i < 100; ++i) points.emplace_back(unit(rng), unit(rng));
    for (const char* name : {"interior_bump", "top_wall_bump", "swirl_bump"}) {
        KernelIdentityReport k = kernel_identity_check(AdmissibleField::named(name), points);
        c.detail << " " << name << "=" << k.max_dev();
        c.require(k.max_dev() <= 1e-6, std::string(name) + " rate deviation");
    }
    return c;
}

// 2. volume/facet transport identities
Criterion transport_formulas() {
    Criterion c;
    ScalarData f = ScalarData::parse("1 + x*y");

    Mat2 M;
    M << 0.1, 0.0, 0.0, 0.2;
    TransportReport tr =
        transport_identity_check(unit_square_mesh(8), f, AdmissibleField::affine(M), 0.5);
    double dv = std::abs(tr.volume_deformed - tr.volume_pulled);
    double df = std::abs(tr.facet_deformed - tr.facet_pulled);
    c.detail << " affine_vol=" << dv << " affine_facet=" << df;
    c.require(dv <= 1e-10, "affine volume identity");
    c.require(df <= 1e-10, "affine facet identity");

    AdmissibleField bump = AdmissibleField::named("top_wall_bump");
    std::vector<double> verr, ferr;
    for (int n : {8, 16, 32}) {
        TransportReport tb = transport_identity_check(unit_square_mesh(n), f, bump, 0.05);
        verr.push_back(std::abs(tb.volume_deformed - tb.volume_pulled));
        ferr.push_back(std::abs(tb.facet_deformed - tb.facet_pulled));
    }
    double vorder = std::min(std::log2(verr[0] / verr[1]), std::log2(verr[1] / verr[2]));
    double forder = std::min(std::log2(ferr[0] / ferr[1]), std::log2(ferr[1] / ferr[2]));
    c.detail << " vol_order=" << vorder << " facet_order=" << forder;
    c.require(vorder >= 1.8, "volume convergence order");
    c.require(forder >= 1.8, "facet convergence order");
    return c;
}

// 3. manufactured Stokes: exact Poiseuille, sinusoidal-inlet orders
Criterion manufactured_stokes() {
    Criterion c;
    VerifyReport rep = manufactured_suite(8, 3);
    for (const auto& chk : rep.checks) {
        if (chk.name.rfind("poiseuille_", 0) != 0 && chk.name.rfind("stokes_", 0) != 0) continue;
        c.detail << " " << chk.name << "=" << chk.value;
        c.require(chk.pass, chk.name);
    }
    return c;
}

// 4. manufactured temperature: 1D Robin profile T = y, Q = 1
Criterion manufactured_temperature() {
    Criterion c;
    Discretization disc(robin_square(8));
    StateSolution U = solve_state(disc, {}, robin_data());
    DiscreteField T = U.T_total();
    double dev = 0.0;
    for (int d = 0; d < disc.temperature().ndofs(); ++d)
        dev = std::max(dev,
                       std::abs(T.coeffs(d) - disc.temperature().scalar_dof_point(d).y()));
    double Q = heat_flux(T, robin_data().T_wall, 1.0, {});
    c.detail << " nodal_dev=" << dev << " Q=" << Q;
    c.require(dev <= 1e-10, "nodal temperature");
    c.require(std::abs(Q - 1.0) <= 1e-10, "wall heat flux");
    return c;
}

// 5. averaged adjoint at t = 0 vs the standard adjoint; transpose identity
Criterion adjoint_consistency() {
    Criterion c;
    Discretization disc(with_subdomain(unit_square_mesh(8), 0.25, 0.75, 0.25, 0.75));
    BoundaryData data = poiseuille_data();
    StateSolution U = solve_state(disc, {}, data);
    ObjectiveParams obj;
    obj.lambda1 = 0.7;
    obj.lambda2 = 0.4;
    obj.Q_des = -2.0;
    obj.u_des = VectorData::parse("0.2", "0");

    AdjointSolution P0 = solve_adjoint(disc, {}, obj, data.T_wall, U);
    AdjointSolution Pa =
        solve_averaged_adjoint(disc, {}, data, obj, AdmissibleField::zero(), 0.0, U);
    double gap = std::max({(P0.v.coeffs - Pa.v.coeffs).norm(), (P0.q.coeffs - Pa.q.coeffs).norm(),
                           (P0.S.coeffs - Pa.S.coeffs).norm()});
    c.detail << " averaged_gap=" << gap;
    c.require(gap <= 1e-10, "averaged adjoint at t = 0");

    DiscreteField zero_lift(disc.temperature());
    PullbackKernels id;
    SparseMat A_state =
        assemble_temperature(disc, {}, U.u_total(), zero_lift, data.T_wall, id).A;
    SparseMat A_adj = assemble_adjoint_temperature(disc, {}, U.u_total(), id).A;
    double tdev = SparseMat(SparseMat(A_state.transpose()) - A_adj).norm() / A_state.norm();
    c.detail << " transpose_dev=" << tdev;
    c.require(tdev <= 1e-12, "transpose identity");
    return c;
}

// 6. shape derivative: geometric Taylor orders and full-objective FD agreement
Criterion shape_derivative_checks() {
    Criterion c;
    {
        Mesh mesh = unit_square_mesh(16);
        AdmissibleField V = AdmissibleField::named("top_wall_bump");
        TaylorReport per = taylor_test(mesh, TaylorObjective::Perimeter, V, 1e-2, 6);
        TaylorReport vol = taylor_test(mesh, TaylorObjective::Volume, V, 1e-2, 6);
        c.detail << " per_order=" << per.min_order() << " vol_order=" << vol.min_order();
        c.require(per.min_order() >= 1.95, "perimeter Taylor order");
        c.require(vol.min_order() >= 1.95, "volume Taylor order");
    }

    PhysicalParams params;
    BoundaryData data;
    data.u_in = VectorData::parse("y*(1-y)*cut(x/0.4)", "0");
    data.T_in = ScalarData::parse("0");
    data.T_wall = ScalarData::parse("2");
    AdmissibleField V = AdmissibleField::from_expr(VectorData::parse("0", "y*y*cut((x-1)/0.6)"));
    double t = 5e-4;
    std::vector<double> rel;
    for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
        Mesh mesh = generate_channel_array(2.0, 1.0, 3, 0.15, 0.4, h);
        Discretization disc{Mesh(mesh)};
        StateSolution U0 = solve_state(disc, params, data);
        ObjectiveParams obj;
        obj.u_des = VectorData::parse("0.2", "0");
        std::tie(obj.lambda1, obj.lambda2, obj.lambda3) =
            normalization_weights(disc, U0, params, 0.0, obj.u_des, data.T_wall);
        AdjointSolution P0 = solve_adjoint(disc, params, obj, data.T_wall, U0);
        double dJ = shape_derivative(disc, U0, P0, params, obj, data.T_wall, V);
        auto J_at = [&](double s) {
            FlowMap flow{V, s};
            std::vector<Vec2> moved = flow_points(flow, mesh.vertices());
            std::vector<Vec2> disp(moved.size());
            for (size_t i = 0; i < moved.size(); ++i) disp[i] = moved[i] - mesh.vertices()[i];
            Discretization dt(mesh.deformed(disp));
            StateSolution U = solve_state(dt, params, data);
            return cost(dt, U, params, obj, data.T_wall).total;
        };
        double fd = (J_at(t) - J_at(-t)) / (2 * t);
        rel.push_back(std::abs(fd - dJ) / std::abs(fd));
        c.detail << " rel(1/" << int(1 / h) << ")=" << rel.back();
    }
    c.require(rel[1] <= 1e-2, "FD agreement at h = 1/32");
    c.require(rel[2] < rel[1], "error decreasing under refinement");
    return c;
}

// 7. continuity of the state and averaged adjoint in the flow parameter
Criterion continuity_checks() {
    Criterion c;
    Discretization disc(unit_square_mesh(8));
    BoundaryData data;
    data.u_in = VectorData::parse("y*(1-y)", "0");
    data.T_wall = ScalarData::parse("2");
    ObjectiveParams obj;
    obj.lambda1 = 1.0;
    obj.Q_des = 0.0;
    AdmissibleField V = AdmissibleField::named("interior_bump");
    SweepReport sw = continuity_sweep(disc, {}, data, obj, V, {0.1, 0.05, 0.025, 0.0125});

    double worst = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k + 1 < sw.ts.size(); ++k) {
        worst = std::min(worst, std::log2(sw.state_diff[k] / sw.state_diff[k + 1]));
        worst = std::min(worst, std::log2(sw.adjoint_diff[k] / sw.adjoint_diff[k + 1]));
    }
    c.detail << " worst_rate=" << worst;
    c.require(worst >= 0.9, "continuity rate");

    StateSolution U0 = solve_state(disc, {}, data);
    AdjointSolution P0 = solve_adjoint(disc, {}, obj, data.T_wall, U0);
    double u0n = std::sqrt(U0.u0.coeffs.squaredNorm() + U0.p0.coeffs.squaredNorm() +
                           U0.T0.coeffs.squaredNorm());
    double p0n = std::sqrt(P0.v.coeffs.squaredNorm() + P0.q.coeffs.squaredNorm() +
                           P0.S.coeffs.squaredNorm());
    double umax = 0.0, pmax = 0.0;
    for (size_t k = 0; k < sw.ts.size(); ++k) {
        umax = std::max(umax, sw.state_norm[k]);
        pmax = std::max(pmax, sw.adjoint_norm[k]);
    }
    c.detail << " state_bound=" << umax / u0n << " adjoint_bound=" << pmax / p0n;
    c.require(umax <= 2.0 * u0n, "state norm bound");
    c.require(pmax <= 2.0 * p0n, "adjoint norm bound");
    return c;
}

// 8. inf-sup stability on channel meshes
Criterion infsup_checks() {
    Criterion c;
    std::vector<double> sigma;
    for (double h : {0.3, 0.15, 0.075})
        sigma.push_back(infsup_check(generate_channel_array(1.0, 1.0, 2, 0.1, 0.4, h)));
    c.detail << " sigma=" << sigma[0] << "," << sigma[1] << "," << sigma[2];
    c.require(sigma[0] > 0.0 && sigma[1] > 0.0 && sigma[2] > 0.0, "positive inf-sup constant");
    c.require(std::abs(sigma[1] - sigma[0]) <= 0.2 * sigma[0], "drift after one refinement");
    c.require(std::abs(sigma[2] - sigma[0]) <= 0.2 * sigma[0], "drift after two refinements");

    double bad = infsup_check(generate_channel_array(1.0, 1.0, 2, 0.1, 0.4, 0.3), true);
    c.detail << " p1p1=" << bad;
    c.require(bad <= 0.2 * sigma[0], "equal-order negative control");
    return c;
}

// 9. end-to-end optimization on the channel array with auto weights
Criterion optimization_run() {
    Criterion c;
    Mesh mesh0 = generate_channel_array(2.0, 1.0, 3, 0.15, 0.4, 0.1);
    BoundaryData data;
    data.u_in = VectorData::parse("y*(1-y)*cut(x/0.4)", "0");
    data.T_in = ScalarData::parse("0");
    data.T_wall = ScalarData::parse("2");

    ObjectiveParams obj;
    obj.Q_des = 0.0;
    obj.u_des = VectorData::parse("0.2", "0");
    {
        Discretization disc{Mesh(mesh0)};
        StateSolution U0 = solve_state(disc, {}, data);
        std::tie(obj.lambda1, obj.lambda2, obj.lambda3) =
            normalization_weights(disc, U0, {}, obj.Q_des, obj.u_des, data.T_wall);
    }

    OptimizerConfig cfg;
    cfg.max_iters = 10;
    RunResult r = optimize_run(Mesh(mesh0), {}, data, obj, cfg);
    c.detail << " iters=" << r.history.records.size();
    c.require(r.history.records.size() == 10, "ten iterations");
    bool accepted = true, decreasing = true;
    for (size_t i = 0; i < r.history.records.size(); ++i) {
        accepted = accepted && r.history.records[i].status == StepStatus::Accepted;
        if (i > 0)
            decreasing =
                decreasing && r.history.records[i].cost.total < r.history.records[i - 1].cost.total;
    }
    if (!r.history.records.empty())
        c.detail << " J0=" << r.history.records.front().cost.total
                 << " J9=" << r.history.records.back().cost.total;
    c.require(accepted, "every step accepted");
    c.require(decreasing, "strictly decreasing cost");

    bool pinned = true;
    for (BoundaryTag tag : {BoundaryTag::Inlet, BoundaryTag::Outlet})
        for (int v : mesh0.tagged_vertices(tag))
            pinned = pinned && r.final_mesh.vertices()[v] == mesh0.vertices()[v];
    c.require(pinned, "inlet/outlet vertices fixed");

    double angle = r.final_mesh.quality().min_angle;
    c.detail << " min_angle=" << angle;
    c.require(angle >= cfg.min_angle_floor, "quality floor");
    return c;
}

const char* kNames[9] = {
    "kernel identities",          "transport formulas",     "manufactured Stokes",
    "manufactured temperature",   "adjoint consistency",    "shape derivative",
    "continuity sweeps",          "inf-sup stability",      "end-to-end optimization",
};

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: acceptance <criterion 1..9>\n";
        return 1;
    }
    int idx = std::atoi(argv[1]);
    if (idx < 1 || idx > 9) {
        std::cerr << "criterion out of range\n";
        return 1;
    }
    Criterion (*runners[9])() = {kernel_identities,       transport_formulas,
                                 manufactured_stokes,     manufactured_temperature,
                                 adjoint_consistency,     shape_derivative_checks,
                                 continuity_checks,       infsup_checks,
                                 optimization_run};
    Criterion c;
    try {
        c = runners[idx - 1]();
    } catch (const std::exception& e) {
        c.pass = false;
        c.detail << " [exception: " << e.what() << "]";
    }
    std::cout << (c.pass ? "PASS" : "FAIL") << " criterion " << idx << " (" << kNames[idx - 1]
              << "):" << c.detail.str() << "\n";
    return c.pass ? 0 : 1;
}
