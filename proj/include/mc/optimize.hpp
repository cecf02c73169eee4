#pragma once

#include "mc/objective.hpp"

namespace mc {

struct OptimizerConfig {
    int max_iters = 10;
    double initial_step = 1.0;   // scales the riesz field
    double armijo_c1 = 1e-4;     // sufficient-decrease slope factor
    double backtrack = 0.5;      // step shrink factor
    int max_backtracks = 30;
    double grad_tol = 1e-8;      // stop on dual-vector norm
    double min_angle_floor = 8.0; // degrees
    double max_displacement = 0.1; // cap on the largest vertex move per step
    RieszParams riesz;

    void validate() const {
        if (max_iters < 0 || initial_step <= 0 || armijo_c1 <= 0 || armijo_c1 >= 1 ||
            backtrack <= 0 || backtrack >= 1 || max_backtracks < 1 || grad_tol < 0 ||
            min_angle_floor <= 0 || max_displacement <= 0)
            throw ConfigError("optimizer configuration out of range");
    }
};

enum class StepStatus { Accepted, Converged, Stagnated, QualityFloor };

inline const char* to_string(StepStatus s) {
    switch (s) {
        case StepStatus::Accepted: return "accepted";
        case StepStatus::Converged: return "converged";
        case StepStatus::Stagnated: return "stagnated";
        case StepStatus::QualityFloor: return "quality";
    }
    return "?";
}

struct IterationRecord {
    int iter = 0;
    CostBreakdown cost;     // at the iterate the step started from
    double grad_norm = 0.0; // dual-vector norm
    double step = 0.0;      // accepted step length (0 if none)
    QualityReport quality;  // of the resulting mesh
    StepStatus status = StepStatus::Accepted;
};

struct History {
    std::vector<IterationRecord> records;
    std::string status; // converged | stagnated | quality | max_iters
};

/// One descent step: state + adjoint solve, shape gradient, Armijo
/// backtracking along the riesz field. Inlet and Outlet vertices never move
/// (the gradient is zeroed there). Returns the new mesh (unchanged unless
/// the status is Accepted).
std::pair<Mesh, IterationRecord> optimize_step(const Mesh& mesh, const PhysicalParams& params,
                                               const BoundaryData& data,
                                               const ObjectiveParams& obj,
                                               const OptimizerConfig& cfg);

struct RunResult {
    History history;
    Mesh final_mesh;
};

/// Full descent loop; `on_iterate` (optional) receives each new mesh and its
/// record, e.g. for snapshot output.
RunResult optimize_run(
    Mesh mesh0, const PhysicalParams& params, const BoundaryData& data, const ObjectiveParams& obj,
    const OptimizerConfig& cfg,
    const std::function<void(const Mesh&, const IterationRecord&)>& on_iterate = nullptr);

} // namespace mc
