#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mc/config.hpp"
#include "mc/msh_io.hpp"
#include "mc/verify.hpp"
#include "mc/vtk.hpp"

namespace {

using nlohmann::json;

struct Session {
    mc::RunConfig cfg;
    std::filesystem::path out_dir;

    explicit Session(const std::string& config_path, const std::vector<std::string>& overrides) {
        cfg = config_path.empty() ? mc::parse_config("{}", overrides)
                                  : mc::load_config(config_path, overrides);
        out_dir = cfg.output.directory;
        std::filesystem::create_directories(out_dir);
    }

    std::string path(const std::string& name) const { return (out_dir / name).string(); }

    void write_json(const std::string& name, const json& j) const {
        std::ofstream out(path(name));
        out << j.dump(2) << "\n";
    }
};

json cost_json(const mc::CostBreakdown& c) {
    return {{"Q", c.q_value},
            {"J_flux", c.term_flux},
            {"J_tracking", c.term_tracking},
            {"J_perimeter", c.term_perimeter},
            {"J_total", c.total}};
}

// resolves "auto" weights against the reference state
mc::ObjectiveParams resolve_objective(const Session& s, const mc::Discretization& disc,
                                      const mc::StateSolution& U0) {
    mc::ObjectiveParams obj = mc::make_objective(s.cfg);
    if (s.cfg.objective.auto_weights) {
        std::tie(obj.lambda1, obj.lambda2, obj.lambda3) = mc::normalization_weights(
            disc, U0, s.cfg.physics, obj.Q_des, obj.u_des, mc::ScalarData::parse(s.cfg.boundary.T_wall));
    }
    return obj;
}

void write_state_vtk(const Session& s, const std::string& name, const mc::Mesh& mesh,
                     const mc::StateSolution& U) {
    if (!s.cfg.output.vtk) return;
    mc::DiscreteField u = U.u_total();
    mc::DiscreteField T = U.T_total();
    mc::write_vtk(s.path(name), mesh, {{"pressure", &U.p0}, {"temperature", &T}},
                  {{"velocity", &u}});
}

int cmd_mesh_gen(const Session& s) {
    mc::Mesh mesh = mc::make_geometry(s.cfg);
    mc::write_msh(mesh, s.path("mesh.msh"));
    if (s.cfg.output.vtk) mc::write_vtk(s.path("mesh.vtk"), mesh);
    mc::QualityReport q = mesh.quality();
    s.write_json("mesh.json", {{"n_vertices", mesh.n_vertices()},
                               {"n_cells", mesh.n_cells()},
                               {"min_angle", q.min_angle},
                               {"min_area_ratio", q.min_area_ratio}});
    std::cout << "mesh: " << mesh.n_vertices() << " vertices, " << mesh.n_cells()
              << " cells, min angle " << q.min_angle << " deg\n";
    return 0;
}

int cmd_solve(const Session& s) {
    mc::Discretization disc(mc::make_geometry(s.cfg));
    mc::BoundaryData data = mc::make_boundary_data(s.cfg);
    data.validate(disc.mesh());
    mc::SolveReport report;
    mc::StateSolution U = mc::solve_state(disc, s.cfg.physics, data, {}, 0.0, nullptr, &report);
    mc::ObjectiveParams obj = resolve_objective(s, disc, U);
    mc::CostBreakdown c = mc::cost(disc, U, s.cfg.physics, obj, data.T_wall);

    write_state_vtk(s, "state.vtk", disc.mesh(), U);
    json j = cost_json(c);
    j["max_element_peclet"] = report.max_element_peclet;
    j["warnings"] = report.warnings;
    s.write_json("cost.json", j);
    std::cout << "J = " << c.total << ", Q = " << c.q_value << "\n";
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
}

int cmd_adjoint(const Session& s) {
    mc::Discretization disc(mc::make_geometry(s.cfg));
    mc::BoundaryData data = mc::make_boundary_data(s.cfg);
    data.validate(disc.mesh());
    mc::StateSolution U = mc::solve_state(disc, s.cfg.physics, data);
    mc::ObjectiveParams obj = resolve_objective(s, disc, U);
    mc::AdjointSolution P = mc::solve_adjoint(disc, s.cfg.physics, obj, data.T_wall, U);

    if (s.cfg.output.vtk)
        mc::write_vtk(s.path("adjoint.vtk"), disc.mesh(),
                      {{"adjoint_pressure", &P.q}, {"adjoint_temperature", &P.S}},
                      {{"adjoint_velocity", &P.v}});
    s.write_json("adjoint.json", {{"v_norm", P.v.coeffs.norm()},
                                  {"q_norm", P.q.coeffs.norm()},
                                  {"S_norm", P.S.coeffs.norm()}});
    std::cout << "adjoint norms: |v| = " << P.v.coeffs.norm() << ", |S| = " << P.S.coeffs.norm()
              << "\n";
    return 0;
}

int cmd_grad(const Session& s) {
    mc::Discretization disc(mc::make_geometry(s.cfg));
    mc::BoundaryData data = mc::make_boundary_data(s.cfg);
    data.validate(disc.mesh());
    mc::StateSolution U = mc::solve_state(disc, s.cfg.physics, data);
    mc::ObjectiveParams obj = resolve_objective(s, disc, U);
    mc::AdjointSolution P = mc::solve_adjoint(disc, s.cfg.physics, obj, data.T_wall, U);
    mc::ShapeGradient g = mc::assemble_shape_gradient(disc, U, P, s.cfg.physics, obj, data.T_wall,
                                                      s.cfg.optimizer.riesz);

    if (s.cfg.output.vtk)
        mc::write_vtk(s.path("gradient.vtk"), disc.mesh(), {}, {{"descent_field", &g.riesz}});
    double slope = g.dual.dot(g.riesz.coeffs);
    s.write_json("gradient.json",
                 {{"dual_norm", g.dual.norm()}, {"descent_slope", slope}});
    std::cout << "|dJ| = " << g.dual.norm() << ", descent slope = " << slope << "\n";
    return 0;
}

int cmd_taylor(const Session& s) {
    mc::Mesh mesh = mc::make_geometry(s.cfg);
    mc::BoundaryData data = mc::make_boundary_data(s.cfg);
    data.validate(mesh);
    mc::AdmissibleField V = mc::AdmissibleField::named(s.cfg.direction.name);

    mc::Discretization disc{mc::Mesh(mesh)};
    mc::StateSolution U = mc::solve_state(disc, s.cfg.physics, data);
    mc::ObjectiveParams obj = resolve_objective(s, disc, U);

    mc::TaylorReport rep =
        mc::taylor_test(mesh, mc::TaylorObjective::Full, V, s.cfg.direction.t0, s.cfg.direction.n,
                        &s.cfg.physics, &data, &obj);
    json j = {{"field", s.cfg.direction.name},
              {"derivative", rep.derivative},
              {"t", rep.ts},
              {"remainder", rep.remainders},
              {"order", rep.orders},
              {"degenerate", rep.degenerate}};
    s.write_json("taylor.json", j);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_verify(const Session& s) {
    mc::VerifyReport rep = mc::verify_default_suite();
    std::ofstream out(s.path("verify.json"));
    out << rep.to_json() << "\n";
    for (const auto& c : rep.checks)
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << c.value
                  << (c.lower_bound ? " >= " : " <= ") << c.threshold << "\n";
    return rep.all_pass() ? 0 : 3;
}

int cmd_optimize(const Session& s) {
    mc::Mesh mesh0 = mc::make_geometry(s.cfg);
    mc::BoundaryData data = mc::make_boundary_data(s.cfg);
    data.validate(mesh0);

    mc::ObjectiveParams obj;
    {
        mc::Discretization disc{mc::Mesh(mesh0)};
        mc::StateSolution U0 = mc::solve_state(disc, s.cfg.physics, data);
        obj = resolve_objective(s, disc, U0);
    }

    std::ofstream csv;
    if (s.cfg.output.csv) {
        csv.open(s.path("history.csv"));
        csv << "iter,J_total,J_flux,J_tracking,J_perimeter,Q,grad_norm,step,min_angle\n";
    }
    auto on_iterate = [&](const mc::Mesh& mesh, const mc::IterationRecord& rec) {
        if (csv.is_open()) {
            char line[256];
            std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          rec.iter, rec.cost.total, rec.cost.term_flux, rec.cost.term_tracking,
                          rec.cost.term_perimeter, rec.cost.q_value, rec.grad_norm, rec.step,
                          rec.quality.min_angle);
            csv << line << std::flush;
        }
        if (s.cfg.output.vtk && rec.status == mc::StepStatus::Accepted) {
            mc::Discretization disc{mc::Mesh(mesh)};
            mc::StateSolution U = mc::solve_state(disc, s.cfg.physics, data);
            write_state_vtk(s, "iter_" + std::to_string(rec.iter) + ".vtk", mesh, U);
        }
    };

    mc::RunResult result =
        mc::optimize_run(std::move(mesh0), s.cfg.physics, data, obj, s.cfg.optimizer, on_iterate);
    mc::write_msh(result.final_mesh, s.path("final.msh"));
    s.write_json("optimize.json", {{"status", result.history.status},
                                   {"iterations", result.history.records.size()}});
    std::cout << "optimization finished: " << result.history.status << " after "
              << result.history.records.size() << " iteration(s)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D microchannel shape-optimization toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    int threads = 0;
    app.add_option("--threads", threads, "assembly thread count (default from config)");

    struct Command {
        const char* name;
        const char* description;
        int (*run)(const Session&);
    };
    const Command commands[] = {
        {"mesh-gen", "generate and export the channel-array mesh", cmd_mesh_gen},
        {"solve", "solve the coupled state system", cmd_solve},
        {"adjoint", "solve the adjoint system", cmd_adjoint},
        {"grad", "assemble the shape gradient and descent field", cmd_grad},
        {"taylor", "Taylor remainder test of the shape derivative", cmd_taylor},
        {"verify", "run the verification suite", cmd_verify},
        {"optimize", "run the shape-optimization loop", cmd_optimize},
    };
    std::map<std::string, int (*)(const Session&)> handlers;
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.description);
        sub->add_option("config", config_path, "JSON config file");
        sub->add_option("--set", overrides, "override config entries (section.key=value)");
        handlers[c.name] = c.run;
    }

    CLI11_PARSE(app, argc, argv);

    try {
        Session session(config_path, overrides);
        if (threads > 0) session.cfg.threads = threads;
        Eigen::setNbThreads(session.cfg.threads);
        return handlers.at(app.get_subcommands().front()->get_name())(session);
    } catch (const mc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const mc::FormatError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const mc::TaggingError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const mc::GeometryError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const mc::Error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
