#include "mc/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "mc/msh_io.hpp"

namespace mc {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& block, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError("config block '" + block + "' must be an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key))
            throw ConfigError("unknown config key '" + block + "." + key + "'");
}

template <typename T>
void read(const json& j, const char* key, T& target, const std::string& block) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    // get<T>() happily truncates 2.5 to an int; insist on the exact JSON type
    bool ok;
    if constexpr (std::is_same_v<T, bool>)
        ok = v.is_boolean();
    else if constexpr (std::is_integral_v<T>)
        ok = v.is_number_integer();
    else if constexpr (std::is_floating_point_v<T>)
        ok = v.is_number();
    else
        ok = v.is_string();
    if (!ok) throw ConfigError("config key '" + block + "." + key + "' has the wrong type");
    target = v.get<T>();
}

RunConfig from_json(const json& j) {
    RunConfig cfg;
    check_keys(j, "", {"geometry", "physics", "boundary", "objective", "optimizer", "direction",
                       "output", "threads"});
    read(j, "threads", cfg.threads, "");

    if (j.contains("geometry")) {
        const json& g = j.at("geometry");
        check_keys(g, "geometry",
                   {"msh_path", "length", "height", "n_fins", "fin_width", "fin_height",
                    "h_target"});
        read(g, "msh_path", cfg.geometry.msh_path, "geometry");
        read(g, "length", cfg.geometry.length, "geometry");
        read(g, "height", cfg.geometry.height, "geometry");
        read(g, "n_fins", cfg.geometry.n_fins, "geometry");
        read(g, "fin_width", cfg.geometry.fin_width, "geometry");
        read(g, "fin_height", cfg.geometry.fin_height, "geometry");
        read(g, "h_target", cfg.geometry.h_target, "geometry");
    }
    if (j.contains("physics")) {
        const json& p = j.at("physics");
        check_keys(p, "physics", {"mu", "kappa", "rho", "cp", "alpha"});
        read(p, "mu", cfg.physics.mu, "physics");
        read(p, "kappa", cfg.physics.kappa, "physics");
        read(p, "rho", cfg.physics.rho, "physics");
        read(p, "cp", cfg.physics.cp, "physics");
        read(p, "alpha", cfg.physics.alpha, "physics");
        cfg.physics.validate();
    }
    if (j.contains("boundary")) {
        const json& b = j.at("boundary");
        check_keys(b, "boundary", {"u_in_x", "u_in_y", "T_in", "T_wall"});
        read(b, "u_in_x", cfg.boundary.u_in_x, "boundary");
        read(b, "u_in_y", cfg.boundary.u_in_y, "boundary");
        read(b, "T_in", cfg.boundary.T_in, "boundary");
        read(b, "T_wall", cfg.boundary.T_wall, "boundary");
    }
    if (j.contains("objective")) {
        const json& o = j.at("objective");
        check_keys(o, "objective",
                   {"auto_weights", "lambda1", "lambda2", "lambda3", "Q_des", "u_des_x",
                    "u_des_y"});
        read(o, "auto_weights", cfg.objective.auto_weights, "objective");
        read(o, "lambda1", cfg.objective.lambda1, "objective");
        read(o, "lambda2", cfg.objective.lambda2, "objective");
        read(o, "lambda3", cfg.objective.lambda3, "objective");
        read(o, "Q_des", cfg.objective.Q_des, "objective");
        read(o, "u_des_x", cfg.objective.u_des_x, "objective");
        read(o, "u_des_y", cfg.objective.u_des_y, "objective");
    }
    if (j.contains("optimizer")) {
        const json& o = j.at("optimizer");
        check_keys(o, "optimizer",
                   {"max_iters", "initial_step", "armijo_c1", "backtrack", "max_backtracks",
                    "grad_tol", "min_angle_floor", "max_displacement", "riesz_mu", "riesz_delta"});
        read(o, "max_iters", cfg.optimizer.max_iters, "optimizer");
        read(o, "initial_step", cfg.optimizer.initial_step, "optimizer");
        read(o, "armijo_c1", cfg.optimizer.armijo_c1, "optimizer");
        read(o, "backtrack", cfg.optimizer.backtrack, "optimizer");
        read(o, "max_backtracks", cfg.optimizer.max_backtracks, "optimizer");
        read(o, "grad_tol", cfg.optimizer.grad_tol, "optimizer");
        read(o, "min_angle_floor", cfg.optimizer.min_angle_floor, "optimizer");
        read(o, "max_displacement", cfg.optimizer.max_displacement, "optimizer");
        read(o, "riesz_mu", cfg.optimizer.riesz.mu_e, "optimizer");
        read(o, "riesz_delta", cfg.optimizer.riesz.delta, "optimizer");
        cfg.optimizer.validate();
    }
    if (j.contains("direction")) {
        const json& d = j.at("direction");
        check_keys(d, "direction", {"name", "t0", "n"});
        read(d, "name", cfg.direction.name, "direction");
        read(d, "t0", cfg.direction.t0, "direction");
        read(d, "n", cfg.direction.n, "direction");
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        check_keys(o, "output", {"directory", "vtk", "csv"});
        read(o, "directory", cfg.output.directory, "output");
        read(o, "vtk", cfg.output.vtk, "output");
        read(o, "csv", cfg.output.csv, "output");
    }
    return cfg;
}

void apply_override(json& j, const std::string& spec) {
    auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like section.key=value: " + spec);
    std::string path = spec.substr(0, eq);
    std::string value = spec.substr(eq + 1);

    json* node = &j;
    size_t start = 0;
    while (true) {
        size_t dot = path.find('.', start);
        std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
        if (key.empty()) throw ConfigError("empty key in override: " + spec);
        if (dot == std::string::npos) {
            json parsed = json::parse(value, nullptr, false);
            (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

RunConfig from_json_with_overrides(json j, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) apply_override(j, o);
    return from_json(j);
}

} // namespace

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config file " + path + " is not valid JSON");
    return from_json_with_overrides(std::move(j), overrides);
}

RunConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config text is not valid JSON");
    return from_json_with_overrides(std::move(j), overrides);
}

BoundaryData make_boundary_data(const RunConfig& cfg) {
    BoundaryData data;
    data.u_in = VectorData::parse(cfg.boundary.u_in_x, cfg.boundary.u_in_y);
    data.T_in = ScalarData::parse(cfg.boundary.T_in);
    data.T_wall = ScalarData::parse(cfg.boundary.T_wall);
    return data;
}

Mesh make_geometry(const RunConfig& cfg) {
    if (!cfg.geometry.msh_path.empty()) return load_msh(cfg.geometry.msh_path);
    return generate_channel_array(cfg.geometry.length, cfg.geometry.height, cfg.geometry.n_fins,
                                  cfg.geometry.fin_width, cfg.geometry.fin_height,
                                  cfg.geometry.h_target);
}

ObjectiveParams make_objective(const RunConfig& cfg) {
    ObjectiveParams obj;
    obj.lambda1 = cfg.objective.lambda1;
    obj.lambda2 = cfg.objective.lambda2;
    obj.lambda3 = cfg.objective.lambda3;
    obj.Q_des = cfg.objective.Q_des;
    obj.u_des = VectorData::parse(cfg.objective.u_des_x, cfg.objective.u_des_y);
    obj.validate();
    return obj;
}

} // namespace mc
