#pragma once

#include "mc/optimize.hpp"

namespace mc {

/// One verification check: a measured value, its pass threshold, and the
/// comparison direction (value <= threshold unless `lower_bound`).
struct CheckResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool lower_bound = false; // pass iff value >= threshold
    bool pass = false;

    static CheckResult at_most(std::string name, double value, double threshold) {
        return {std::move(name), value, threshold, false, value <= threshold};
    }
    static CheckResult at_least(std::string name, double value, double threshold) {
        return {std::move(name), value, threshold, true, value >= threshold};
    }
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    void add(CheckResult c) { checks.push_back(std::move(c)); }
    void merge(const VerifyReport& other) {
        checks.insert(checks.end(), other.checks.begin(), other.checks.end());
    }
    std::string to_json() const;
};

/// Worst deviation between the analytic kernel rates at t = 0 and a central
/// finite difference of the kernels over the flow, per kernel, over the
/// sample points (omega probed along several unit normals).
struct KernelIdentityReport {
    double xi_dev = 0.0;
    double omega_dev = 0.0;
    double A_dev = 0.0;
    double B_dev = 0.0;
    double max_dev() const { return std::max({xi_dev, omega_dev, A_dev, B_dev}); }
};
KernelIdentityReport kernel_identity_check(const AdmissibleField& V,
                                           const std::vector<Vec2>& points,
                                           double fd_step = 1e-4);

/// Volume and facet transformation identities: the integral of f over the
/// flow-transported mesh against the xi- and omega-weighted integrals of
/// f composed with the flow on the reference mesh.
struct TransportReport {
    double volume_deformed = 0.0;
    double volume_pulled = 0.0;
    double facet_deformed = 0.0;
    double facet_pulled = 0.0;
};
TransportReport transport_identity_check(const Mesh& mesh, const ScalarData& f,
                                         const AdmissibleField& V, double t);

enum class TaylorObjective { Perimeter, Volume, Full };

struct TaylorReport {
    std::vector<double> ts;         // strictly decreasing by factor 2
    std::vector<double> remainders; // |J(Omega_t) - J(Omega) - t dJ[V]|
    std::vector<double> orders;     // fitted between consecutive ts
    double derivative = 0.0;
    bool degenerate = false; // V produced no change at all
    double min_order() const;
};

/// Taylor remainder test. Geometric objectives (perimeter, volume) are
/// evaluated through the exact kernels; the full objective re-solves the
/// PDEs on the transported mesh and needs params/data/obj.
TaylorReport taylor_test(const Mesh& mesh, TaylorObjective objective, const AdmissibleField& V,
                         double t0, int n, const PhysicalParams* params = nullptr,
                         const BoundaryData* data = nullptr, const ObjectiveParams* obj = nullptr);

/// Manufactured solutions: exact Poiseuille flow, the 1D Robin temperature
/// profile, and mesh-convergence orders for a sinusoidal-inlet Stokes flow.
VerifyReport manufactured_suite(int base_n = 8, int levels = 3);

/// Smallest generalized singular value of the pressure-velocity coupling in
/// the natural norms (dense eigensolve; guarded to <= `max_dofs` velocity +
/// pressure dofs). `equal_order` swaps in the unstable P1/P1 pair.
double infsup_check(const Mesh& mesh, bool equal_order = false, int max_dofs = 5000);

/// State and adjoint continuity in t: coefficient-norm distances to the
/// reference solutions over a list of flow parameters.
struct SweepReport {
    std::vector<double> ts;
    std::vector<double> state_diff;   // ||U^t - U^0||
    std::vector<double> adjoint_diff; // ||P^t - P^0||
    std::vector<double> state_norm;   // ||U^t||
    std::vector<double> adjoint_norm; // ||P^t||
};
SweepReport continuity_sweep(const Discretization& disc, const PhysicalParams& params,
                             const BoundaryData& data, const ObjectiveParams& obj,
                             const AdmissibleField& V, const std::vector<double>& ts);

/// The full lemma-driven suite on built-in desk-scale configurations.
VerifyReport verify_default_suite();

} // namespace mc
