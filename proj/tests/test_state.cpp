#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mc/objective.hpp"

using namespace mc;
using namespace mc::testing;

TEST_CASE("boundary data validation") {
    Mesh m = unit_square_mesh(4);
    CHECK_NOTHROW(poiseuille_data().validate(m));

    BoundaryData wall_violating = poiseuille_data();
    wall_violating.u_in = VectorData::parse("1", "0"); // nonzero on the walls
    CHECK_THROWS_AS(wall_violating.validate(m), ConfigError);

    BoundaryData outflow = poiseuille_data();
    outflow.u_in = VectorData::parse("-y*(1-y)", "0"); // u.n > 0 on the inlet
    CHECK_THROWS_AS(outflow.validate(m), ConfigError);
}

TEST_CASE("liftings carry the boundary traces") {
    Discretization disc(unit_square_mesh(8));
    BoundaryData data = poiseuille_data();
    data.T_in = ScalarData::parse("300");
    auto [lift_u, lift_T] = make_liftings(disc, data);

    for (int d : disc.velocity().boundary_scalar_dofs({BoundaryTag::Inlet})) {
        Vec2 p = disc.velocity().scalar_dof_point(d);
        CHECK(lift_u.coeffs(2 * d) == doctest::Approx(p.y() * (1 - p.y())).epsilon(1e-12));
        CHECK(std::abs(lift_u.coeffs(2 * d + 1)) <= 1e-12);
    }
    for (int d : disc.velocity().boundary_scalar_dofs({BoundaryTag::Wall})) {
        CHECK(std::abs(lift_u.coeffs(2 * d)) <= 1e-12);
        CHECK(std::abs(lift_u.coeffs(2 * d + 1)) <= 1e-12);
    }
    // constant inflow temperature extends to the constant
    for (int i = 0; i < lift_T.coeffs.size(); ++i)
        CHECK(lift_T.coeffs(i) == doctest::Approx(300.0).epsilon(1e-12));
}

TEST_CASE("Poiseuille flow is reproduced nodally") {
    Discretization disc(unit_square_mesh(8));
    StateSolution U = solve_state(disc, {}, poiseuille_data());
    DiscreteField u = U.u_total();
    for (int d = 0; d < disc.velocity().n_scalar_dofs(); ++d) {
        Vec2 p = disc.velocity().scalar_dof_point(d);
        CHECK(u.coeffs(2 * d) == doctest::Approx(p.y() * (1 - p.y())).epsilon(1e-10));
        CHECK(std::abs(u.coeffs(2 * d + 1)) <= 1e-10);
    }
    // do-nothing outlet fixes the pressure: p = 2 mu (1 - x)
    for (int d = 0; d < disc.pressure().ndofs(); ++d) {
        Vec2 p = disc.pressure().scalar_dof_point(d);
        CHECK(U.p0.coeffs(d) == doctest::Approx(2 * (1 - p.x())).epsilon(1e-9));
    }
    double div2 = integrate_cells(disc.mesh(), [&](const Vec2& p) {
        auto [cell, ref] = locate(disc.mesh(), p);
        Mat2 J = eval_vector_jacobian(u, cell, cell_geometry(disc.mesh(), cell), ref);
        return std::pow(J.trace(), 2);
    });
    CHECK(std::sqrt(div2) <= 1e-8);
}

TEST_CASE("Robin square: one-dimensional conduction T = y") {
    Discretization disc(robin_square(8));
    StateSolution U = solve_state(disc, {}, robin_data());
    // -T'' = 0, T(0) = 0, T'(1) + T(1) = 2  =>  T = y (alpha = kappa = 1)
    DiscreteField T = U.T_total();
    for (int d = 0; d < disc.temperature().ndofs(); ++d)
        CHECK(T.coeffs(d) ==
              doctest::Approx(disc.temperature().scalar_dof_point(d).y()).epsilon(1e-10));
    CHECK(heat_flux(T, robin_data().T_wall, 1.0, {}) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("equilibrium and quiescent cases") {
    // T_in == T_wall == 2 with no flow: the constant 2 solves the problem
    Discretization disc(robin_square(6));
    BoundaryData data = robin_data();
    data.T_in = ScalarData::parse("2");
    StateSolution U = solve_state(disc, {}, data);
    DiscreteField T = U.T_total();
    for (int i = 0; i < T.coeffs.size(); ++i)
        CHECK(T.coeffs(i) == doctest::Approx(2.0).epsilon(1e-10));

    // zero inflow: homogeneous Stokes solution vanishes
    CHECK(U.u0.coeffs.norm() <= 1e-10);
    CHECK(U.p0.coeffs.norm() <= 1e-9);
}

TEST_CASE("constant direction field leaves the pulled-back solution unchanged") {
    // Phi_t is a translation: xi = 1, A = B = I; with translation-invariant
    // wall data the pulled-back coefficients match the t = 0 solve.
    Discretization disc(unit_square_mesh(6));
    BoundaryData data = poiseuille_data();
    StateSolution base = solve_state(disc, {}, data);
    StateSolution moved =
        solve_state(disc, {}, data, AdmissibleField::constant({0.3, 0.0}), 0.05);
    CHECK((moved.u0.coeffs - base.u0.coeffs).norm() <= 1e-10);
    CHECK((moved.p0.coeffs - base.p0.coeffs).norm() <= 1e-9);
    CHECK((moved.T0.coeffs - base.T0.coeffs).norm() <= 1e-9);
}

TEST_CASE("state residual vanishes at the solution and flags perturbations") {
    Discretization disc(unit_square_mesh(6));
    BoundaryData data = poiseuille_data();
    StateSolution U = solve_state(disc, {}, data);
    PullbackKernels id;
    CHECK(state_residual(disc, {}, data, U, id) <= 1e-9);

    StateSolution zero = U;
    zero.u0.coeffs.setZero();
    zero.p0.coeffs.setZero();
    zero.T0.coeffs.setZero();
    CHECK(state_residual(disc, {}, data, zero, id) > 1e-3);

    StateSolution bumped = U;
    bumped.T0.coeffs(bumped.T0.coeffs.size() / 2) += 0.1;
    CHECK(state_residual(disc, {}, data, bumped, id) > 1e-4);
}

TEST_CASE("solve report flags convection strength") {
    Discretization disc(unit_square_mesh(8));
    SolveReport report;
    solve_state(disc, {}, poiseuille_data(), {}, 0.0, nullptr, &report);
    CHECK(report.max_element_peclet > 0.0);
    CHECK(report.coercivity_proxy > 0.0);
}

TEST_CASE("pullback consistency: composed solve tracks the deformed-domain solve") {
    BoundaryData data = poiseuille_data();
    ObjectiveParams obj;
    obj.lambda1 = 1.0;
    obj.lambda2 = 0.0;
    obj.lambda3 = 0.1;
    AdmissibleField V = AdmissibleField::affine((Mat2() << 0.02, 0, 0, -0.01).finished());
    double t = 0.05;

    auto gap = [&](int n, double tt) {
        Discretization disc(with_subdomain(unit_square_mesh(n), 0.25, 0.75, 0.25, 0.75));
        auto [J_def, j_pulled] = pullback_consistency(disc, {}, data, obj, V, tt);
        return std::abs(J_def - j_pulled) / std::abs(J_def);
    };
    CHECK(gap(8, t) <= 5e-3);
    CHECK(gap(16, t) <= 5e-3);   // the gap is a discretization artifact: it stays small
    CHECK(gap(8, 0.0) <= 1e-12); // t = 0: both routes are the same solve
}
