#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mc/objective.hpp"

using namespace mc;
using namespace mc::testing;

namespace {

struct Setup {
    Discretization disc;
    BoundaryData data;
    StateSolution U;

    explicit Setup(int n = 8)
        : disc(with_subdomain(unit_square_mesh(n), 0.25, 0.75, 0.25, 0.75)),
          data(poiseuille_data()),
          U(solve_state(disc, {}, data)) {}
};

ObjectiveParams mixed_objective() {
    ObjectiveParams obj;
    obj.lambda1 = 0.7;
    obj.lambda2 = 0.4;
    obj.lambda3 = 0.05;
    obj.Q_des = -2.0;
    obj.u_des = VectorData::parse("0.2", "0");
    return obj;
}

} // namespace

TEST_CASE("heat flux closed forms") {
    Setup s;
    Space temp = Space::build(s.disc.mesh(), Family::P2);
    DiscreteField at_wall = interpolate(temp, [](const Vec2&) { return 2.0; });
    CHECK(std::abs(heat_flux(at_wall, s.data.T_wall, 1.0, {})) <= 1e-13);

    DiscreteField gap = interpolate(temp, [](const Vec2&) { return 1.7; });
    // constant gap 0.3 over both walls (length 2)
    CHECK(heat_flux(gap, s.data.T_wall, 1.0, {}) == doctest::Approx(0.6).epsilon(1e-13));
    CHECK(heat_flux(gap, s.data.T_wall, 3.0, {}) == doctest::Approx(1.8).epsilon(1e-13));
}

TEST_CASE("cost breakdown") {
    Setup s;
    ObjectiveParams per;
    per.lambda3 = 1.0;
    CostBreakdown c = cost(s.disc, s.U, {}, per, s.data.T_wall);
    CHECK(c.term_perimeter == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(c.term_flux == 0.0);
    CHECK(c.term_tracking == 0.0);
    CHECK(c.total == c.term_perimeter);

    ObjectiveParams matched;
    matched.lambda1 = 1.0;
    matched.lambda2 = 1.0;
    matched.Q_des = heat_flux(s.U.T_total(), s.data.T_wall, 1.0, {});
    matched.u_des = VectorData::parse("y*(1-y)", "0");
    CostBreakdown m = cost(s.disc, s.U, {}, matched, s.data.T_wall);
    CHECK(m.term_flux <= 1e-20);
    CHECK(m.term_tracking <= 1e-20);
    CHECK(m.q_value == doctest::Approx(matched.Q_des).epsilon(1e-14));

    CostBreakdown full = cost(s.disc, s.U, {}, mixed_objective(), s.data.T_wall);
    CHECK(full.term_flux >= 0.0);
    CHECK(full.term_tracking >= 0.0);
    CHECK(full.term_perimeter >= 0.0);
    CHECK(full.total ==
          doctest::Approx(full.term_flux + full.term_tracking + full.term_perimeter)
              .epsilon(1e-14));
}

TEST_CASE("normalization weights from the initial design") {
    // Robin square: Q0 = 1, zero flow, perimeter 4, subdomain area 1/4.
    Discretization disc(with_subdomain(robin_square(8), 0.25, 0.75, 0.25, 0.75));
    StateSolution U = solve_state(disc, {}, robin_data());
    auto [l1, l2, l3] = normalization_weights(disc, U, {}, 0.5, VectorData::parse("0.2", "0"),
                                              robin_data().T_wall);
    CHECK(l1 == doctest::Approx(4.0).epsilon(1e-8));            // (1 - 0.5)^-2
    CHECK(l2 == doctest::Approx(100.0).epsilon(1e-8));          // 1 / (0.04 * 0.25)
    CHECK(l3 == doctest::Approx(2.5e-3).epsilon(1e-12));        // 1e-2 / 4

    // no tracking subdomain: the lambda2 denominator is zero
    Discretization bare(robin_square(8));
    StateSolution Ub = solve_state(bare, {}, robin_data());
    CHECK_THROWS_AS(normalization_weights(bare, Ub, {}, 0.5, VectorData::parse("0.2", "0"),
                                          robin_data().T_wall),
                    ConfigError);
}

TEST_CASE("shape derivative is linear in the direction") {
    Setup s;
    ObjectiveParams obj = mixed_objective();
    AdjointSolution P = solve_adjoint(s.disc, {}, obj, s.data.T_wall, s.U);

    AdmissibleField V1 = top_wall_field();
    AdmissibleField V2 = AdmissibleField::named("interior_bump");
    AdmissibleField combo(
        [=](const Vec2& p) { return (0.3 * V1(p) - 1.2 * V2(p)).eval(); },
        [=](const Vec2& p) { return (0.3 * V1.jacobian(p) - 1.2 * V2.jacobian(p)).eval(); });

    double d1 = shape_derivative(s.disc, s.U, P, {}, obj, s.data.T_wall, V1);
    double d2 = shape_derivative(s.disc, s.U, P, {}, obj, s.data.T_wall, V2);
    double dc = shape_derivative(s.disc, s.U, P, {}, obj, s.data.T_wall, combo);
    CHECK(dc == doctest::Approx(0.3 * d1 - 1.2 * d2).epsilon(1e-12));

    CHECK(shape_derivative(s.disc, s.U, P, {}, obj, s.data.T_wall, AdmissibleField::zero()) ==
          0.0);
}

TEST_CASE("perimeter term ignores interior deformations") {
    Setup s;
    ObjectiveParams with = mixed_objective();
    ObjectiveParams without = with;
    without.lambda3 = 0.0;
    AdjointSolution P = solve_adjoint(s.disc, {}, with, s.data.T_wall, s.U);
    AdmissibleField V = AdmissibleField::named("interior_bump"); // supported away from the walls
    double a = shape_derivative(s.disc, s.U, P, {}, with, s.data.T_wall, V);
    double b = shape_derivative(s.disc, s.U, P, {}, without, s.data.T_wall, V);
    CHECK(a == doctest::Approx(b).epsilon(1e-13));

    // vertical wall motion has zero tangential divergence on flat walls
    ObjectiveParams per;
    per.lambda3 = 1.0;
    AdjointSolution Pz = solve_adjoint(s.disc, {}, per, s.data.T_wall, s.U);
    AdmissibleField W = AdmissibleField::wall_normal_bump(0.5, 0.35, 1.0);
    CHECK(std::abs(shape_derivative(s.disc, s.U, Pz, {}, per, s.data.T_wall, W)) <= 1e-13);
}

TEST_CASE("assembled dual vector represents the derivative on the FE space") {
    Setup s;
    ObjectiveParams obj = mixed_objective();
    AdjointSolution P = solve_adjoint(s.disc, {}, obj, s.data.T_wall, s.U);
    ShapeGradient g = assemble_shape_gradient(s.disc, s.U, P, {}, obj, s.data.T_wall);

    DiscreteField Vh = interpolate_vector(s.disc.velocity(), [](const Vec2& p) {
        return Vec2(0.0, p.y() * p.y() * std::pow(std::max(0.0, 1 - std::pow((p.x() - 0.5) / 0.35, 2)), 3));
    });
    for (int d : s.disc.velocity().boundary_dofs({BoundaryTag::Inlet, BoundaryTag::Outlet}))
        Vh.coeffs(d) = 0.0;

    double via_dual = g.dual.dot(Vh.coeffs);
    double direct = shape_derivative(s.disc, s.U, P, {}, obj, s.data.T_wall, Vh);
    CHECK(via_dual == doctest::Approx(direct).epsilon(1e-12));

    // Riesz representative is a descent direction
    CHECK(g.dual.norm() > 0.0);
    CHECK(g.dual.dot(g.riesz.coeffs) < 0.0);
}

TEST_CASE("perimeter-only dual is supported on boundary dofs") {
    Setup s;
    ObjectiveParams per;
    per.lambda3 = 1.0;
    AdjointSolution P = solve_adjoint(s.disc, {}, per, s.data.T_wall, s.U);
    ShapeGradient g = assemble_shape_gradient(s.disc, s.U, P, {}, per, s.data.T_wall);

    std::vector<bool> on_boundary(s.disc.velocity().ndofs(), false);
    for (int d : s.disc.velocity().boundary_dofs(
             {BoundaryTag::Inlet, BoundaryTag::Outlet, BoundaryTag::Wall}))
        on_boundary[d] = true;
    for (int i = 0; i < g.dual.size(); ++i)
        if (!on_boundary[i]) CHECK(g.dual(i) == 0.0);
}

TEST_CASE("analytic derivative matches a finite difference across remeshing") {
    Setup s;
    StateSolution U = s.U;
    auto [l1, l2, l3] = normalization_weights(s.disc, U, {}, -2.0,
                                              VectorData::parse("0.2", "0"), s.data.T_wall);
    ObjectiveParams obj;
    obj.lambda1 = l1;
    obj.lambda2 = l2;
    obj.lambda3 = l3;
    obj.Q_des = -2.0;
    obj.u_des = VectorData::parse("0.2", "0");

    AdjointSolution P = solve_adjoint(s.disc, {}, obj, s.data.T_wall, U);
    AdmissibleField V = top_wall_field();
    double dJ = shape_derivative(s.disc, U, P, {}, obj, s.data.T_wall, V);

    auto J_at = [&](double t) {
        std::vector<Vec2> disp(s.disc.mesh().n_vertices());
        for (int i = 0; i < s.disc.mesh().n_vertices(); ++i)
            disp[i] = flow_point(FlowMap{V, t}, s.disc.mesh().vertices()[i]) -
                      s.disc.mesh().vertices()[i];
        Discretization def(s.disc.mesh().deformed(disp));
        StateSolution Ud = solve_state(def, {}, s.data);
        return cost(def, Ud, {}, obj, s.data.T_wall).total;
    };
    double t = 1e-3;
    double fd = (J_at(t) - J_at(-t)) / (2 * t);
    CHECK(dJ == doctest::Approx(fd).epsilon(5e-2));
}
