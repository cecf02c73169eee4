#pragma once

#include "mc/state.hpp"

namespace mc {

/// Cost-functional data: weights, target flux, and the desired velocity on
/// the tracking subdomain (analytic Jacobian needed by the shape derivative).
struct ObjectiveParams {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double lambda3 = 0.0;
    double Q_des = 0.0;
    VectorData u_des;

    void validate() const {
        if (lambda1 < 0 || lambda2 < 0 || lambda3 < 0)
            throw ConfigError("cost weights must be non-negative");
    }
};

/// Adjoint triple in the same spaces as the state: v (velocity), q
/// (pressure), S (temperature).
struct AdjointSolution {
    DiscreteField v, q, S;
};

/// Transposed convection-diffusion operator: the state temperature matrix
/// with convective velocity `u_conv`, transposed (the adjoint unknown sits in
/// the test-function slot of the state form). Dirichlet rows (Inlet)
/// eliminated; RHS left zero.
SparseSystem assemble_adjoint_temperature(const Discretization& disc, const PhysicalParams& params,
                                          const DiscreteField& u_conv,
                                          const PullbackKernels& kernels);

/// Load vector of the adjoint temperature equation: `factor` times the wall
/// integral of alpha * basis * omega(t). `factor` is 2 lambda1 (Q - Q_des)
/// evaluated by the caller.
Eigen::VectorXd assemble_flux_load(const Discretization& disc, const PhysicalParams& params,
                                   double factor, const PullbackKernels& kernels);

/// Load vector of the adjoint Stokes equation: velocity tracking against
/// `u_track` (full velocity to compare with u_des composed with the flow,
/// weighted by xi(t) over the subdomain) plus the convective coupling with
/// the adjoint temperature S against grad of `T_conv_total`.
Eigen::VectorXd assemble_adjoint_stokes_load(const Discretization& disc,
                                             const PhysicalParams& params,
                                             const ObjectiveParams& obj,
                                             const DiscreteField& u_track,
                                             const DiscreteField& T_conv_total,
                                             const DiscreteField& S,
                                             const PullbackKernels& kernels);

/// Averaged adjoint temperature: transposed convection-diffusion with
/// velocity 1/2 (u^t + u^0) + lifting, RHS g_T. States must share liftings.
DiscreteField solve_adjoint_temperature(const Discretization& disc, const PhysicalParams& params,
                                        const ObjectiveParams& obj, const ScalarData& T_wall,
                                        const StateSolution& U_t, const StateSolution& U_0,
                                        const PullbackKernels& kernels);

/// Averaged adjoint Stokes problem driven by the already-computed adjoint
/// temperature S (the coupling order is reversed relative to the state).
std::pair<DiscreteField, DiscreteField> solve_adjoint_stokes(
    const Discretization& disc, const PhysicalParams& params, const ObjectiveParams& obj,
    const DiscreteField& S, const StateSolution& U_t, const StateSolution& U_0,
    const PullbackKernels& kernels);

/// Usual adjoint: the t = 0 specialization with identity kernels and both
/// state slots equal to the reference state.
AdjointSolution solve_adjoint(const Discretization& disc, const PhysicalParams& params,
                              const ObjectiveParams& obj, const ScalarData& T_wall,
                              const StateSolution& U_0);

/// Full averaged adjoint at parameter t along field V: solves the perturbed
/// state U^t (reusing the liftings of U_0), then temperature and Stokes
/// adjoints with the averaged states.
AdjointSolution solve_averaged_adjoint(const Discretization& disc, const PhysicalParams& params,
                                       const BoundaryData& data, const ObjectiveParams& obj,
                                       const AdmissibleField& V, double t,
                                       const StateSolution& U_0);

} // namespace mc
