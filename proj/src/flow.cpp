#include "mc/flow.hpp"

#include <cmath>

namespace mc {

namespace {

constexpr double kMinDet = 0.1; // admitted regime: det DPhi_t > 0.1

struct FlowState {
    Vec2 x;
    Mat2 J;
};

// one RK4 step of the joint system (x, DPhi)
FlowState rk4_step(const AdmissibleField& V, const FlowState& s, double h) {
    auto f = [&V](const FlowState& q) -> FlowState {
        return {V(q.x), V.jacobian(q.x) * q.J};
    };
    FlowState k1 = f(s);
    FlowState k2 = f({s.x + 0.5 * h * k1.x, s.J + 0.5 * h * k1.J});
    FlowState k3 = f({s.x + 0.5 * h * k2.x, s.J + 0.5 * h * k2.J});
    FlowState k4 = f({s.x + h * k3.x, s.J + h * k3.J});
    return {s.x + h / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
            s.J + h / 6.0 * (k1.J + 2 * k2.J + 2 * k3.J + k4.J)};
}

FlowState integrate(const FlowMap& flow, const Vec2& p) {
    FlowState s{p, Mat2::Identity()};
    if (flow.t == 0.0) return s;
    int n = flow.steps();
    double h = flow.t / n;
    for (int i = 0; i < n; ++i) s = rk4_step(flow.field, s, h);
    return s;
}

} // namespace

double KernelValues::omega(const Vec2& normal) const {
    return xi * (dphi.inverse().transpose() * normal).norm();
}

double KernelRates::omega_rate(const Vec2& normal, const Mat2& jacobian) const {
    // div_Gamma V = div V - (DV n) . n
    return jacobian.trace() - normal.dot(jacobian * normal);
}

Vec2 flow_point(const FlowMap& flow, const Vec2& point) {
    if (flow.t == 0.0) return point;
    return integrate(flow, point).x;
}

std::vector<Vec2> flow_points(const FlowMap& flow, const std::vector<Vec2>& points) {
    std::vector<Vec2> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(flow_point(flow, p));
    return out;
}

std::vector<Mat2> flow_jacobian(const FlowMap& flow, const std::vector<Vec2>& points) {
    std::vector<Mat2> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        FlowState s = integrate(flow, p);
        if (s.J.determinant() <= kMinDet)
            throw DeformationError("deformation too large: det DPhi_t <= 0.1");
        out.push_back(s.J);
    }
    return out;
}

KernelValues kernels_at(const FlowMap& flow, const Vec2& point) {
    FlowState s = integrate(flow, point);
    KernelValues k;
    k.mapped = s.x;
    k.dphi = s.J;
    k.xi = s.J.determinant();
    if (k.xi <= kMinDet)
        throw DeformationError("deformation too large: det DPhi_t <= 0.1");
    // explicit 2x2 inverse
    Mat2 inv;
    inv << s.J(1, 1), -s.J(0, 1), -s.J(1, 0), s.J(0, 0);
    inv /= k.xi;
    k.A = k.xi * inv * inv.transpose();
    k.B = k.xi * inv.transpose();
    return k;
}

std::vector<KernelValues> kernels(const FlowMap& flow, const std::vector<Vec2>& points) {
    std::vector<KernelValues> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(kernels_at(flow, p));
    return out;
}

KernelRates kernel_rates_at(const AdmissibleField& field, const Vec2& point) {
    KernelRates r;
    Mat2 DV = field.jacobian(point);
    double div = DV.trace();
    Mat2 eps = 0.5 * (DV + DV.transpose());
    r.xi_rate = div;
    r.A_rate = div * Mat2::Identity() - 2.0 * eps;
    r.B_rate = div * Mat2::Identity() - DV.transpose();
    return r;
}

std::vector<KernelRates> kernel_rates(const AdmissibleField& field,
                                      const std::vector<Vec2>& points) {
    std::vector<KernelRates> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(kernel_rates_at(field, p));
    return out;
}

} // namespace mc
