#pragma once

#include <string>
#include <vector>

#include "mc/optimize.hpp"

namespace mc {

/// Full run configuration, loaded from JSON. Unknown keys are rejected;
/// every field has a default so partial configs work.
struct RunConfig {
    struct Geometry {
        std::string msh_path; // non-empty: load instead of generating
        double length = 2.0;
        double height = 1.0;
        int n_fins = 3;
        double fin_width = 0.15;
        double fin_height = 0.4;
        double h_target = 0.1;
    } geometry;

    PhysicalParams physics;

    struct Boundary {
        // parabolic inflow faded out before the first fin so it vanishes on
        // every wall of the default channel-array geometry
        std::string u_in_x = "y*(1-y)*cut(x/0.4)";
        std::string u_in_y = "0";
        std::string T_in = "0";
        std::string T_wall = "2";
    } boundary;

    struct Objective {
        bool auto_weights = true;
        double lambda1 = 1.0;
        double lambda2 = 1.0;
        double lambda3 = 1.0;
        double Q_des = 0.0;
        std::string u_des_x = "0.2";
        std::string u_des_y = "0";
    } objective;

    OptimizerConfig optimizer;

    struct Direction { // speed-method field for grad / taylor commands
        std::string name = "top_wall_bump";
        double t0 = 1e-2;
        int n = 5;
    } direction;

    struct Output {
        std::string directory = "out";
        bool vtk = true;
        bool csv = true;
    } output;

    int threads = 1;
};

/// Loads and schema-checks a JSON config; `overrides` are `dotted.key=value`
/// pairs applied on top (the CLI --set flag). Throws ConfigError on unknown
/// keys, type mismatches, or malformed overrides.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Parses a config from a JSON string (used by tests and --set-only runs).
RunConfig parse_config(const std::string& json_text,
                       const std::vector<std::string>& overrides = {});

/// Builds the boundary data block (validating nothing mesh-specific).
BoundaryData make_boundary_data(const RunConfig& cfg);

/// Builds or loads the mesh described by the geometry block.
Mesh make_geometry(const RunConfig& cfg);

/// Objective parameters; if auto weights are requested the caller must have
/// a solved reference state to derive them from (see normalization_weights).
ObjectiveParams make_objective(const RunConfig& cfg);

} // namespace mc
