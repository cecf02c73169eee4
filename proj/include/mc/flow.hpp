#pragma once

#include <optional>
#include <vector>

#include "mc/field.hpp"

namespace mc {

/// RK4 discretization of the speed-method flow dx/dt = V(x), x(0) = x.
struct FlowMap {
    AdmissibleField field;
    double t = 0.0;
    int n_steps = 0; // 0: use default_steps(t)

    static int default_steps(double t) {
        return std::max(16, static_cast<int>(std::ceil(64.0 * std::abs(t))));
    }
    int steps() const { return n_steps > 0 ? n_steps : default_steps(t); }
};

/// Pull-back kernels of Lemma 3.2 at one evaluation point.
struct KernelValues {
    double xi = 1.0; // det DPhi_t
    Mat2 A = Mat2::Identity();
    Mat2 B = Mat2::Identity();
    double omega(const Vec2& normal) const; // xi * |DPhi_t^{-T} n|
    Mat2 dphi = Mat2::Identity();           // DPhi_t itself
    Vec2 mapped = Vec2::Zero();             // Phi_t(x)
};

/// Analytic rates at t = 0 (Lemma 3.2 primes).
struct KernelRates {
    double xi_rate = 0.0; // div V
    Mat2 A_rate = Mat2::Zero();
    Mat2 B_rate = Mat2::Zero();
    double omega_rate(const Vec2& normal, const Mat2& jacobian) const; // div_Gamma V
};

/// Phi_t(x) for each point. t = 0 returns the input bit-exactly.
std::vector<Vec2> flow_points(const FlowMap& flow, const std::vector<Vec2>& points);
Vec2 flow_point(const FlowMap& flow, const Vec2& point);

/// DPhi_t via the variational equation d/dt DPhi = DV(Phi) DPhi, integrated
/// jointly with the flow. Throws DeformationError if det DPhi_t <= 0.1.
std::vector<Mat2> flow_jacobian(const FlowMap& flow, const std::vector<Vec2>& points);

/// xi, A, B (and Phi_t, DPhi_t) at one point. Throws DeformationError
/// outside the admitted regime.
KernelValues kernels_at(const FlowMap& flow, const Vec2& point);
std::vector<KernelValues> kernels(const FlowMap& flow, const std::vector<Vec2>& points);

/// Analytic rates at t = 0 from the field's Jacobian; no flow integration.
KernelRates kernel_rates_at(const AdmissibleField& field, const Vec2& point);
std::vector<KernelRates> kernel_rates(const AdmissibleField& field,
                                      const std::vector<Vec2>& points);

/// Kernel provider used by the pulled-back assembly routines. The identity
/// provider short-circuits to xi = 1, A = B = I, Phi_t = id (the t = 0
/// system); otherwise values come from the RK4 flow per evaluation point.
class PullbackKernels {
public:
    PullbackKernels() = default; // identity
    static PullbackKernels identity() { return {}; }
    static PullbackKernels of(const AdmissibleField& field, double t, int n_steps = 0) {
        PullbackKernels k;
        if (t != 0.0) {
            k.flow_ = FlowMap{field, t, n_steps};
            k.identity_ = false;
        }
        return k;
    }

    bool is_identity() const { return identity_; }
    KernelValues at(const Vec2& x) const {
        if (!identity_) return kernels_at(flow_, x);
        KernelValues k;
        k.mapped = x;
        return k;
    }
    double omega(const Vec2& x, const Vec2& normal) const {
        return identity_ ? 1.0 : kernels_at(flow_, x).omega(normal);
    }
    /// Phi_t(x), for composing transported data (T_wall, u_des).
    Vec2 map(const Vec2& x) const { return identity_ ? x : flow_point(flow_, x); }

private:
    FlowMap flow_;
    bool identity_ = true;
};

} // namespace mc
