#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mc/errors.hpp"
#include "mc/flow.hpp"

using namespace mc;

namespace {

std::vector<Vec2> sample_points() {
    std::vector<Vec2> pts;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) pts.push_back({0.1 + 0.2 * i, 0.1 + 0.2 * j});
    return pts;
}

} // namespace

TEST_CASE("t = 0 and V = 0 are the bit-exact identity") {
    auto pts = sample_points();
    FlowMap still{AdmissibleField::named("interior_bump"), 0.0};
    auto mapped = flow_points(still, pts);
    for (size_t i = 0; i < pts.size(); ++i) CHECK(mapped[i] == pts[i]);

    FlowMap zero{AdmissibleField::zero(), 0.7};
    auto frozen = flow_points(zero, pts);
    for (size_t i = 0; i < pts.size(); ++i) CHECK((frozen[i] - pts[i]).norm() == 0.0);
}

TEST_CASE("constant field translates, jacobian stays the identity") {
    Vec2 c(0.4, -0.2);
    FlowMap flow{AdmissibleField::constant(c), 0.25};
    auto pts = sample_points();
    auto mapped = flow_points(flow, pts);
    auto jac = flow_jacobian(flow, pts);
    for (size_t i = 0; i < pts.size(); ++i) {
        CHECK((mapped[i] - (pts[i] + 0.25 * c)).norm() <= 1e-14);
        CHECK((jac[i] - Mat2::Identity()).norm() <= 1e-14);
    }
}

TEST_CASE("linear field reproduces the matrix exponential") {
    Mat2 M = Mat2::Zero();
    M(0, 0) = 0.3;
    M(1, 1) = -0.2;
    FlowMap flow{AdmissibleField::affine(M), 0.1, 64};
    Mat2 E = Mat2::Zero();
    E(0, 0) = std::exp(0.03);
    E(1, 1) = std::exp(-0.02);
    auto pts = sample_points();
    auto mapped = flow_points(flow, pts);
    auto jac = flow_jacobian(flow, pts);
    for (size_t i = 0; i < pts.size(); ++i) {
        CHECK((mapped[i] - E * pts[i]).norm() <= 1e-10);
        CHECK((jac[i] - E).norm() <= 1e-10);
        KernelValues k = kernels_at(flow, pts[i]);
        CHECK(k.xi == doctest::Approx(std::exp(0.01)).epsilon(1e-10));
        CHECK((k.A - k.A.transpose()).norm() <= 1e-12);
        CHECK((k.B - k.xi * k.dphi.inverse().transpose()).norm() <= 1e-10);
    }
}

TEST_CASE("kernels at t = 0 are exact") {
    FlowMap flow{AdmissibleField::named("swirl_bump"), 0.0};
    KernelValues k = kernels_at(flow, Vec2(0.4, 0.6));
    CHECK(k.xi == 1.0);
    CHECK(k.A == Mat2::Identity());
    CHECK(k.B == Mat2::Identity());
    CHECK(k.omega(Vec2(0, 1)) == 1.0);
    CHECK(k.mapped == Vec2(0.4, 0.6));
}

TEST_CASE("kernel rates: closed forms") {
    // stretching V = (x, 0): div V = 1, A' = div V I - 2 eps(V) = diag(-1, 1)
    AdmissibleField stretch = AdmissibleField::affine((Mat2() << 1, 0, 0, 0).finished());
    KernelRates r = kernel_rates_at(stretch, Vec2(0.3, 0.7));
    CHECK(r.xi_rate == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.A_rate(0, 0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(r.A_rate(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(r.A_rate(0, 1)) <= 1e-14);
    // B' = div V I - DV^T
    CHECK(r.B_rate(0, 0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(r.B_rate(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
    // tangential divergence on the top wall (n = e_y): div V - n.DV n = 1
    CHECK(r.omega_rate(Vec2(0, 1), stretch.jacobian(Vec2(0.3, 0.7))) ==
          doctest::Approx(1.0).epsilon(1e-14));

    // constant field: all rates vanish
    KernelRates c = kernel_rates_at(AdmissibleField::constant({1, 2}), Vec2(0.5, 0.5));
    CHECK(c.xi_rate == 0.0);
    CHECK(c.A_rate.norm() == 0.0);
    CHECK(c.B_rate.norm() == 0.0);

    // rigid rotation V = (-y, x): divergence-free with zero strain
    Mat2 R;
    R << 0, -1, 1, 0;
    KernelRates rot = kernel_rates_at(AdmissibleField::affine(R), Vec2(0.2, 0.9));
    CHECK(rot.xi_rate == 0.0);
    CHECK(rot.A_rate.norm() <= 1e-14);
    CHECK((rot.B_rate + R.transpose()).norm() <= 1e-14);
}

TEST_CASE("trace of the A rate vanishes for any field") {
    AdmissibleField f = AdmissibleField::named("swirl_bump");
    // tr A' = 2 div V - 2 tr eps(V) = 0 identically
    for (const Vec2& p : sample_points()) {
        KernelRates r = kernel_rates_at(f, p);
        CHECK(std::abs(r.A_rate.trace()) <= 1e-13);
    }
}

TEST_CASE("semigroup property of the flow") {
    AdmissibleField f = AdmissibleField::bump({0.5, 0.5}, {0.45, 0.45}, {0.3, -0.2});
    double s = 0.13, t = 0.21;
    for (const Vec2& p : sample_points()) {
        Vec2 once = flow_point(FlowMap{f, s + t, 256}, p);
        Vec2 twice = flow_point(FlowMap{f, t, 128}, flow_point(FlowMap{f, s, 128}, p));
        CHECK((once - twice).norm() <= 1e-10);
    }
}

TEST_CASE("degenerate deformation rejected") {
    Mat2 M = Mat2::Zero();
    M(0, 0) = -30.0; // det DPhi = e^{-3} < 0.1 at t = 0.1
    FlowMap flow{AdmissibleField::affine(M), 0.1};
    CHECK_THROWS_AS(flow_jacobian(flow, {Vec2(0.5, 0.5)}), DeformationError);
    CHECK_THROWS_AS(kernels_at(flow, Vec2(0.5, 0.5)), DeformationError);
}

TEST_CASE("identity kernel provider maps points to themselves") {
    PullbackKernels id = PullbackKernels::identity();
    Vec2 p(0.37, 0.91);
    CHECK(id.at(p).mapped == p);
    CHECK(id.map(p) == p);
    CHECK(id.omega(p, Vec2(0, 1)) == 1.0);

    PullbackKernels moved = PullbackKernels::of(AdmissibleField::named("interior_bump"), 0.05);
    CHECK_FALSE(moved.is_identity());
    CHECK((moved.at(p).mapped - moved.map(p)).norm() <= 1e-13);
}
