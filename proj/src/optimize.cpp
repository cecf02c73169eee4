#include "mc/optimize.hpp"

#include <optional>

namespace mc {

namespace {

std::vector<Vec2> vertex_displacement(const Mesh& mesh, const DiscreteField& W) {
    // P2 scalar dofs enumerate vertices first, so vertex v carries the
    // global dofs (2v, 2v+1)
    std::vector<Vec2> d(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v)
        d[v] = Vec2(W.coeffs[2 * v], W.coeffs[2 * v + 1]);
    return d;
}

} // namespace

std::pair<Mesh, IterationRecord> optimize_step(const Mesh& mesh, const PhysicalParams& params,
                                               const BoundaryData& data,
                                               const ObjectiveParams& obj,
                                               const OptimizerConfig& cfg) {
    cfg.validate();
    obj.validate();

    IterationRecord rec;
    rec.quality = mesh.quality();
    if (rec.quality.min_angle < cfg.min_angle_floor) {
        rec.status = StepStatus::QualityFloor;
        return {mesh, rec};
    }

    Discretization disc{Mesh(mesh)};
    StateSolution U0 = solve_state(disc, params, data);
    rec.cost = cost(disc, U0, params, obj, data.T_wall);

    AdjointSolution P0 = solve_adjoint(disc, params, obj, data.T_wall, U0);
    ShapeGradient grad = assemble_shape_gradient(disc, U0, P0, params, obj, data.T_wall, cfg.riesz);
    rec.grad_norm = grad.dual.norm();
    if (rec.grad_norm < cfg.grad_tol) {
        rec.status = StepStatus::Converged;
        return {mesh, rec};
    }

    std::vector<Vec2> dir = vertex_displacement(mesh, grad.riesz);
    double max_move = 0.0;
    for (const auto& v : dir) max_move = std::max(max_move, v.norm());
    if (max_move == 0.0) {
        rec.status = StepStatus::Stagnated;
        return {mesh, rec};
    }

    double slope = grad.dual.dot(grad.riesz.coeffs); // <= 0 by construction
    double s = std::min(cfg.initial_step, cfg.max_displacement / max_move);

    for (int bt = 0; bt < cfg.max_backtracks; ++bt, s *= cfg.backtrack) {
        std::optional<Mesh> trial;
        try {
            trial = mesh.deformed(dir, s);
        } catch (const InversionError&) {
            continue;
        }
        QualityReport quality = trial->quality();
        if (quality.min_angle < cfg.min_angle_floor) continue;

        Discretization trial_disc{Mesh(*trial)};
        StateSolution U_trial = solve_state(trial_disc, params, data);
        double J_trial = cost(trial_disc, U_trial, params, obj, data.T_wall).total;
        if (J_trial <= rec.cost.total + cfg.armijo_c1 * s * slope) {
            rec.step = s;
            rec.status = StepStatus::Accepted;
            rec.quality = quality;
            return {std::move(*trial), rec};
        }
    }
    rec.status = StepStatus::Stagnated;
    return {mesh, rec};
}

RunResult optimize_run(
    Mesh mesh0, const PhysicalParams& params, const BoundaryData& data, const ObjectiveParams& obj,
    const OptimizerConfig& cfg,
    const std::function<void(const Mesh&, const IterationRecord&)>& on_iterate) {
    cfg.validate();
    RunResult result{History{}, std::move(mesh0)};
    result.history.status = "max_iters";
    for (int it = 0; it < cfg.max_iters; ++it) {
        auto [next, rec] = optimize_step(result.final_mesh, params, data, obj, cfg);
        rec.iter = it;
        result.history.records.push_back(rec);
        if (on_iterate) on_iterate(next, rec);
        if (rec.status != StepStatus::Accepted) {
            result.history.status = to_string(rec.status);
            return result;
        }
        result.final_mesh = std::move(next);
    }
    return result;
}

} // namespace mc
