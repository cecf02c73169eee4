#pragma once

#include "mc/adjoint.hpp"

namespace mc {

/// Cost functional split into its three terms.
struct CostBreakdown {
    double q_value = 0.0;        // the wall heat flux Q
    double term_flux = 0.0;      // lambda1 (Q - Q_des)^2
    double term_tracking = 0.0;  // lambda2 * subdomain velocity mismatch
    double term_perimeter = 0.0; // lambda3 * boundary measure
    double total = 0.0;
};

struct RieszParams {
    double mu_e = 1.0;  // elasticity modulus of the inner product
    double delta = 0.1; // L2 regularization weight
};

/// Shape derivative as a dual vector over the P2 vector space plus its Riesz
/// representative (negated: a descent direction) w.r.t. the elasticity inner
/// product with zero displacement on Inlet and Outlet.
struct ShapeGradient {
    Eigen::VectorXd dual;
    DiscreteField riesz;
    RieszParams inner;
};

/// Q(t, T): wall integral of alpha (T_wall composed with the flow minus the
/// total temperature), weighted by omega(t).
double heat_flux(const DiscreteField& T_total, const ScalarData& T_wall, double alpha,
                 const PullbackKernels& kernels);

/// Cost functional evaluated through the pull-back: identity kernels give
/// the plain J(Omega, U); otherwise xi/omega weights and composed data give
/// the transported cost j(t, U).
CostBreakdown cost(const Discretization& disc, const StateSolution& U, const PhysicalParams& params,
                   const ObjectiveParams& obj, const ScalarData& T_wall,
                   const PullbackKernels& kernels = {});

/// Two routes to the cost of the deformed domain: a fresh solve on the
/// RK4-deformed mesh, and the pulled-back evaluation on the reference mesh.
/// Returns {J_deformed, j_pulled_back}.
std::pair<double, double> pullback_consistency(const Discretization& disc,
                                               const PhysicalParams& params,
                                               const BoundaryData& data, const ObjectiveParams& obj,
                                               const AdmissibleField& V, double t);

/// Volume-form shape derivative dJ(Omega)[V] for an analytic field.
double shape_derivative(const Discretization& disc, const StateSolution& U0,
                        const AdjointSolution& P0, const PhysicalParams& params,
                        const ObjectiveParams& obj, const ScalarData& T_wall,
                        const AdmissibleField& V);

/// Same, with V a discrete P2 vector field (evaluated through its finite
/// element basis; used by the assembled-gradient identity).
double shape_derivative(const Discretization& disc, const StateSolution& U0,
                        const AdjointSolution& P0, const PhysicalParams& params,
                        const ObjectiveParams& obj, const ScalarData& T_wall,
                        const DiscreteField& Vh);

/// Dual vector (entry i = derivative along the i-th nodal basis field,
/// Inlet/Outlet entries zeroed) and the Riesz descent field.
ShapeGradient assemble_shape_gradient(const Discretization& disc, const StateSolution& U0,
                                      const AdjointSolution& P0, const PhysicalParams& params,
                                      const ObjectiveParams& obj, const ScalarData& T_wall,
                                      const RieszParams& riesz = {});

/// Self-normalizing weights from the initial design: lambda1 = (Q0 -
/// Q_des)^-2, lambda2 = 1 / initial tracking integral, lambda3 = 1e-2 /
/// initial perimeter. Throws ConfigError on degenerate denominators.
std::tuple<double, double, double> normalization_weights(const Discretization& disc,
                                                         const StateSolution& U0,
                                                         const PhysicalParams& params,
                                                         double Q_des, const VectorData& u_des,
                                                         const ScalarData& T_wall);

} // namespace mc
