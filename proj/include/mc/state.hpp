#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mc/expr.hpp"
#include "mc/fem.hpp"
#include "mc/flow.hpp"

namespace mc {

struct PhysicalParams {
    double mu = 1.0;    // Pa s
    double kappa = 1.0; // W/(m K)
    double rho = 1.0;   // kg/m^3
    double cp = 1.0;    // J/(kg K)
    double alpha = 1.0; // W/(m^2 K)

    void validate() const {
        if (mu <= 0 || kappa <= 0 || rho <= 0 || cp <= 0 || alpha <= 0)
            throw ConfigError("physical parameters must be strictly positive");
    }
};

/// Boundary data: inflow velocity (u_in . n <= 0 on the inlet, u_in = 0 on
/// the wall), inflow temperature, and the wall temperature whose gradient
/// enters the shape derivative.
struct BoundaryData {
    VectorData u_in;
    ScalarData T_in;
    ScalarData T_wall;

    /// Checks the trace contracts by boundary quadrature sampling.
    void validate(const Mesh& mesh) const;
};

/// Taylor-Hood discretization bound to one mesh: velocity P2 vector,
/// pressure P1, temperature P2. Owns the mesh; keep it alive while any
/// DiscreteField built on it is in use.
class Discretization {
public:
    explicit Discretization(Mesh m)
        : mesh_(std::move(m)),
          velocity_(Space::build(mesh_, Family::P2Vec)),
          pressure_(Space::build(mesh_, Family::P1)),
          temperature_(Space::build(mesh_, Family::P2)) {}
    Discretization(const Discretization&) = delete;
    Discretization& operator=(const Discretization&) = delete;

    const Mesh& mesh() const { return mesh_; }
    const Space& velocity() const { return velocity_; }
    const Space& pressure() const { return pressure_; }
    const Space& temperature() const { return temperature_; }

private:
    Mesh mesh_;
    Space velocity_, pressure_, temperature_;
};

/// Discrete state triple split into homogeneous parts and liftings.
struct StateSolution {
    DiscreteField u0, p0, T0;
    DiscreteField lift_u, lift_T;

    DiscreteField u_total() const {
        DiscreteField f = u0;
        f.coeffs += lift_u.coeffs;
        return f;
    }
    DiscreteField T_total() const {
        DiscreteField f = T0;
        f.coeffs += lift_T.coeffs;
        return f;
    }
};

struct SolveReport {
    double max_element_peclet = 0.0;
    double coercivity_proxy = 0.0; // smallest diagonal of the symmetrized system
    std::vector<std::string> warnings;
};

/// Discrete harmonic extensions of the Dirichlet data: vector Laplace with
/// u_in on Inlet, 0 on Wall, natural on Outlet; scalar Laplace with T_in on
/// Inlet, natural elsewhere.
std::pair<DiscreteField, DiscreteField> make_liftings(const Discretization& disc,
                                                      const BoundaryData& data);

/// Monolithic Taylor-Hood saddle system for the pulled-back Stokes problem
/// (velocity dofs first, then pressure), Dirichlet already eliminated.
SparseSystem assemble_stokes(const Discretization& disc, const PhysicalParams& params,
                             const DiscreteField& lift_u, const PullbackKernels& kernels);

std::pair<DiscreteField, DiscreteField> solve_stokes(const Discretization& disc,
                                                     const PhysicalParams& params,
                                                     const DiscreteField& lift_u,
                                                     const PullbackKernels& kernels);

/// Pulled-back convection-diffusion system; `u_conv` is the full convective
/// velocity (homogeneous part + lifting). Robin wall term carries omega(t).
SparseSystem assemble_temperature(const Discretization& disc, const PhysicalParams& params,
                                  const DiscreteField& u_conv, const DiscreteField& lift_T,
                                  const ScalarData& T_wall, const PullbackKernels& kernels,
                                  SolveReport* report = nullptr);

DiscreteField solve_temperature(const Discretization& disc, const PhysicalParams& params,
                                const DiscreteField& u_conv, const DiscreteField& lift_T,
                                const ScalarData& T_wall, const PullbackKernels& kernels,
                                SolveReport* report = nullptr);

/// Full one-way coupled solve: kernels(V, t), Stokes, then temperature.
/// Pass precomputed liftings to transport them across mesh updates during
/// optimization; otherwise they are computed fresh.
StateSolution solve_state(const Discretization& disc, const PhysicalParams& params,
                          const BoundaryData& data, const AdmissibleField& V = {}, double t = 0.0,
                          const std::pair<DiscreteField, DiscreteField>* liftings = nullptr,
                          SolveReport* report = nullptr);

/// Max absolute residual of the assembled one-way system applied to U.
double state_residual(const Discretization& disc, const PhysicalParams& params,
                      const BoundaryData& data, const StateSolution& U,
                      const PullbackKernels& kernels);

} // namespace mc
