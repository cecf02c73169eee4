#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mc/optimize.hpp"

using namespace mc;
using namespace mc::testing;

namespace {

ObjectiveParams descent_objective() {
    ObjectiveParams obj;
    obj.lambda1 = 1.0;
    obj.lambda2 = 0.0;
    obj.lambda3 = 0.1;
    obj.Q_des = -2.0;
    obj.u_des = VectorData::parse("0.2", "0");
    return obj;
}

// Unit square with the top wall pushed up by a bump: perimeter descent has
// somewhere to go.
Mesh bumped_square(int n) {
    Mesh m = unit_square_mesh(n);
    std::vector<Vec2> disp(m.n_vertices(), Vec2::Zero());
    for (int i = 0; i < m.n_vertices(); ++i) {
        Vec2 p = m.vertices()[i];
        double z = (p.x() - 0.5) / 0.35;
        disp[i] = Vec2(0, 0.15 * p.y() * p.y() * std::pow(std::max(0.0, 1 - z * z), 3));
    }
    return m.deformed(disp);
}

} // namespace

TEST_CASE("config validation") {
    OptimizerConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    auto bad = [&](auto&& tweak) {
        OptimizerConfig c;
        tweak(c);
        CHECK_THROWS_AS(c.validate(), ConfigError);
    };
    bad([](OptimizerConfig& c) { c.max_iters = -1; });
    bad([](OptimizerConfig& c) { c.initial_step = 0; });
    bad([](OptimizerConfig& c) { c.armijo_c1 = 1.0; });
    bad([](OptimizerConfig& c) { c.backtrack = 1.0; });
    bad([](OptimizerConfig& c) { c.max_backtracks = 0; });
    bad([](OptimizerConfig& c) { c.grad_tol = -1; });
    bad([](OptimizerConfig& c) { c.min_angle_floor = 0; });
    bad([](OptimizerConfig& c) { c.max_displacement = 0; });
}

TEST_CASE("huge gradient tolerance converges immediately, mesh untouched") {
    Mesh m = with_subdomain(unit_square_mesh(6), 0.25, 0.75, 0.25, 0.75);
    OptimizerConfig cfg;
    cfg.grad_tol = 1e12;
    auto [mesh, rec] = optimize_step(m, {}, poiseuille_data(), descent_objective(), cfg);
    CHECK(rec.status == StepStatus::Converged);
    CHECK(rec.step == 0.0);
    for (int i = 0; i < m.n_vertices(); ++i) CHECK(mesh.vertices()[i] == m.vertices()[i]);
}

TEST_CASE("zero iteration budget") {
    Mesh m = with_subdomain(unit_square_mesh(6), 0.25, 0.75, 0.25, 0.75);
    OptimizerConfig cfg;
    cfg.max_iters = 0;
    RunResult r = optimize_run(m, {}, poiseuille_data(), descent_objective(), cfg);
    CHECK(r.history.records.empty());
    CHECK(r.history.status == "max_iters");
}

TEST_CASE("mesh already at the quality floor stops without stepping") {
    Mesh m = with_subdomain(unit_square_mesh(6), 0.25, 0.75, 0.25, 0.75); // 45 degrees
    OptimizerConfig cfg;
    cfg.min_angle_floor = 50.0;
    auto [mesh, rec] = optimize_step(m, {}, poiseuille_data(), descent_objective(), cfg);
    CHECK(rec.status == StepStatus::QualityFloor);
    for (int i = 0; i < m.n_vertices(); ++i) CHECK(mesh.vertices()[i] == m.vertices()[i]);
}

TEST_CASE("descent on a perturbed square: monotone, boundary-condition safe") {
    Mesh m0 = bumped_square(8);
    OptimizerConfig cfg;
    cfg.max_iters = 3;
    RunResult r = optimize_run(m0, {}, poiseuille_data(), descent_objective(), cfg);
    REQUIRE(r.history.records.size() == 3);
    for (const auto& rec : r.history.records) CHECK(rec.status == StepStatus::Accepted);
    for (size_t i = 1; i < r.history.records.size(); ++i)
        CHECK(r.history.records[i].cost.total < r.history.records[i - 1].cost.total);
    CHECK(r.history.status == "max_iters");

    // inlet and outlet vertices never move
    for (BoundaryTag tag : {BoundaryTag::Inlet, BoundaryTag::Outlet})
        for (int v : m0.tagged_vertices(tag))
            CHECK(r.final_mesh.vertices()[v] == m0.vertices()[v]);

    CHECK(r.final_mesh.quality().min_angle >= cfg.min_angle_floor);
}

TEST_CASE("oversized initial step is tamed by the displacement cap") {
    Mesh m0 = bumped_square(8);
    OptimizerConfig cfg;
    cfg.max_iters = 2;
    cfg.initial_step = 1e6;
    RunResult r = optimize_run(m0, {}, poiseuille_data(), descent_objective(), cfg);
    REQUIRE(r.history.records.size() >= 1);
    for (size_t i = 1; i < r.history.records.size(); ++i)
        CHECK(r.history.records[i].cost.total <= r.history.records[i - 1].cost.total);
    CHECK(r.final_mesh.quality().min_angle >= cfg.min_angle_floor);
}

TEST_CASE("records carry diagnostics") {
    Mesh m0 = bumped_square(6);
    OptimizerConfig cfg;
    cfg.max_iters = 1;
    int callbacks = 0;
    RunResult r = optimize_run(m0, {}, poiseuille_data(), descent_objective(), cfg,
                               [&](const Mesh&, const IterationRecord&) { ++callbacks; });
    REQUIRE(r.history.records.size() == 1);
    const IterationRecord& rec = r.history.records[0];
    CHECK(rec.grad_norm > 0.0);
    CHECK(rec.step > 0.0);
    CHECK(rec.quality.min_angle > 0.0);
    CHECK(callbacks == 1);
}
