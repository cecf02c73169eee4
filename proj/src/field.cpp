#include "mc/field.hpp"

#include <cmath>
#include <random>

namespace mc {

namespace {

// C^2 cutoff b(s) = (1 - s^2)^3 on [-1, 1], 0 outside.
double cutoff(double s) {
    double t = 1.0 - s * s;
    return t > 0 ? t * t * t : 0.0;
}
double cutoff_d(double s) {
    double t = 1.0 - s * s;
    return t > 0 ? -6.0 * s * t * t : 0.0;
}

} // namespace

AdmissibleField AdmissibleField::zero() {
    return AdmissibleField([](const Vec2&) { return Vec2::Zero(); },
                           [](const Vec2&) { return Mat2::Zero(); });
}

AdmissibleField AdmissibleField::constant(const Vec2& c, SupportBox box) {
    return AdmissibleField([c](const Vec2&) { return c; },
                           [](const Vec2&) { return Mat2::Zero(); }, box);
}

AdmissibleField AdmissibleField::affine(const Mat2& M, const Vec2& c) {
    return AdmissibleField([M, c](const Vec2& p) -> Vec2 { return M * p + c; },
                           [M](const Vec2&) { return M; });
}

AdmissibleField AdmissibleField::bump(const Vec2& center, const Vec2& radius,
                                      const Vec2& amplitude) {
    SupportBox box{center - radius, center + radius};
    auto b = [center, radius](const Vec2& p) {
        return cutoff((p.x() - center.x()) / radius.x()) *
               cutoff((p.y() - center.y()) / radius.y());
    };
    auto grad_b = [center, radius](const Vec2& p) -> Vec2 {
        double sx = (p.x() - center.x()) / radius.x();
        double sy = (p.y() - center.y()) / radius.y();
        return {cutoff_d(sx) / radius.x() * cutoff(sy), cutoff(sx) * cutoff_d(sy) / radius.y()};
    };
    return AdmissibleField([b, amplitude](const Vec2& p) -> Vec2 { return b(p) * amplitude; },
                           [grad_b, amplitude](const Vec2& p) -> Mat2 {
                               return amplitude * grad_b(p).transpose();
                           },
                           box);
}

AdmissibleField AdmissibleField::wall_normal_bump(double center_x, double radius,
                                                  double amplitude) {
    SupportBox box;
    box.lo.x() = center_x - radius;
    box.hi.x() = center_x + radius;
    return AdmissibleField(
        [center_x, radius, amplitude](const Vec2& p) -> Vec2 {
            return {0.0, amplitude * cutoff((p.x() - center_x) / radius)};
        },
        [center_x, radius, amplitude](const Vec2& p) -> Mat2 {
            Mat2 J = Mat2::Zero();
            J(1, 0) = amplitude * cutoff_d((p.x() - center_x) / radius) / radius;
            return J;
        },
        box);
}

AdmissibleField AdmissibleField::poly_bump(const Vec2& center, const Vec2& radius,
                                           const VectorData& poly) {
    SupportBox box{center - radius, center + radius};
    auto b = [center, radius](const Vec2& p) {
        return cutoff((p.x() - center.x()) / radius.x()) *
               cutoff((p.y() - center.y()) / radius.y());
    };
    auto grad_b = [center, radius](const Vec2& p) -> Vec2 {
        double sx = (p.x() - center.x()) / radius.x();
        double sy = (p.y() - center.y()) / radius.y();
        return {cutoff_d(sx) / radius.x() * cutoff(sy), cutoff(sx) * cutoff_d(sy) / radius.y()};
    };
    return AdmissibleField(
        [b, poly](const Vec2& p) -> Vec2 { return b(p) * poly(p); },
        [b, grad_b, poly](const Vec2& p) -> Mat2 {
            // D(b v) = v grad(b)^T + b Dv
            return poly(p) * grad_b(p).transpose() + b(p) * poly.jacobian(p);
        },
        box);
}

AdmissibleField AdmissibleField::from_expr(const VectorData& v, SupportBox box) {
    return AdmissibleField([v](const Vec2& p) { return v(p); },
                           [v](const Vec2& p) { return v.jacobian(p); }, box);
}

AdmissibleField AdmissibleField::named(const std::string& name) {
    if (name == "zero") return zero();
    if (name == "top_wall_bump") return wall_normal_bump(0.5, 0.35, 1.0);
    if (name == "interior_bump") return bump({0.5, 0.5}, {0.3, 0.3}, {0.3, 0.15});
    if (name == "shear_bump") {
        VectorData poly = VectorData::parse("y", "x*x");
        return poly_bump({0.5, 0.5}, {0.35, 0.35}, poly);
    }
    if (name == "swirl_bump") {
        VectorData poly = VectorData::parse("-(y-0.5)", "x-0.5");
        return poly_bump({0.5, 0.5}, {0.4, 0.4}, poly);
    }
    throw ConfigError("unknown field '" + name + "'");
}

AdmissibilityReport check_admissible(const AdmissibleField& field, const Mesh& mesh,
                                     int n_samples, unsigned seed) {
    AdmissibilityReport r;
    // inlet/outlet quadrature points (3-point Gauss per edge)
    const double gp[3] = {0.5 * (1 - std::sqrt(3.0 / 5.0)), 0.5, 0.5 * (1 + std::sqrt(3.0 / 5.0))};
    for (const auto& be : mesh.boundary_edges()) {
        if (be.tag == BoundaryTag::Wall) continue;
        Vec2 a = mesh.vertices()[be.a], b = mesh.vertices()[be.b];
        for (double s : gp) {
            Vec2 p = (1 - s) * a + s * b;
            r.max_boundary_value = std::max(r.max_boundary_value, field(p).norm());
            r.max_boundary_jacobian =
                std::max(r.max_boundary_jacobian, field.jacobian(p).norm());
        }
    }
    // FD consistency at random interior points
    Vec2 lo(std::numeric_limits<double>::max(), std::numeric_limits<double>::max());
    Vec2 hi = -lo;
    for (const auto& v : mesh.vertices()) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());
    const double h = 1e-6;
    for (int i = 0; i < n_samples; ++i) {
        Vec2 p(ux(rng), uy(rng));
        Mat2 J = field.jacobian(p);
        Mat2 Jfd;
        for (int c = 0; c < 2; ++c) {
            Vec2 dp = Vec2::Zero();
            dp[c] = h;
            Jfd.col(c) = (field(p + dp) - field(p - dp)) / (2 * h);
        }
        r.max_fd_deviation = std::max(r.max_fd_deviation, (J - Jfd).norm());
    }
    return r;
}

} // namespace mc
