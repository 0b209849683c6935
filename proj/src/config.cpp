#include "droc/config.hpp"

#include <filesystem>
#include <set>

#include "json.hpp"

#include "droc/errors.hpp"
#include "droc/io.hpp"

namespace droc {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw Error(ErrorCode::Config, where + " must be an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw Error(ErrorCode::Config, "unknown key '" + key + "' in " + where);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

// Scalars are accepted as one-element vectors.
VectorXd to_vector(const json& j) {
    if (j.is_number()) return VectorXd::Constant(1, j.get<double>());
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void parse_model(const json& j, ProblemConfig::Model& m) {
    require_object(j, "model", {"name", "params", "x0", "t_f"});
    m.name = j.at("name").get<std::string>();
    if (m.name == "fedbatch") {
        const json& p = j.at("params");
        require_object(p, "model.params", {"d_X", "mu_m", "K_S", "S_star", "Y_S", "rho_S"});
        m.params.d_X = get_or(p, "d_X", m.params.d_X);
        m.params.mu_m = get_or(p, "mu_m", m.params.mu_m);
        m.params.K_S = get_or(p, "K_S", m.params.K_S);
        m.params.S_star = p.at("S_star").get<double>();
        m.params.Y_S = get_or(p, "Y_S", m.params.Y_S);
        m.params.rho_S = get_or(p, "rho_S", m.params.rho_S);
        m.params.validate();
        m.x0 = to_vector(j.at("x0"));
        m.t_f = j.at("t_f").get<double>();
    } else if (m.name == "toy:zero" || m.name == "toy:drift" || m.name == "toy:linear") {
        if (j.contains("params")) throw Error(ErrorCode::Config, "toy models take no params");
        m.x0 = j.contains("x0") ? to_vector(j.at("x0")) : VectorXd::Zero(1);
        m.t_f = get_or(j, "t_f", 1.0);
        if (m.x0.size() != 1) throw Error(ErrorCode::Config, "toy models are scalar: x0 needs one entry");
    } else {
        throw Error(ErrorCode::Config, "unknown model '" + m.name + "'");
    }
    if (!(m.t_f > 0.0)) throw Error(ErrorCode::Config, "model.t_f must be positive");
}

void parse_ambiguity(const json& j, ProblemConfig::Ambiguity& a) {
    require_object(j, "ambiguity",
                   {"mu", "sigma", "p_lower", "p_upper", "m", "placement", "support", "density", "quad_points"});
    a.spec = {j.at("mu").get<double>(), j.at("sigma").get<double>(), j.at("p_lower").get<double>(),
              j.at("p_upper").get<double>()};
    a.spec.validate();
    a.placement = parse_placement(get_or<std::string>(j, "placement", "paper"));
    a.quad_points = get_or(j, "quad_points", a.quad_points);
    if (j.contains("support")) {
        a.support = j.at("support").get<std::vector<double>>();
        a.m = static_cast<int>(a.support->size());
        if (a.m < 1) throw Error(ErrorCode::Config, "ambiguity.support must not be empty");
    } else {
        a.m = j.at("m").get<int>();
        if (a.m < 3) throw Error(ErrorCode::TooFewPoints, "ambiguity.m must be >= 3");
    }
    if (j.contains("density")) {
        const json& d = j.at("density");
        require_object(d, "ambiguity.density", {"type", "mu", "sigma", "path"});
        DensityConfig dc;
        dc.type = d.at("type").get<std::string>();
        if (dc.type == "truncnorm") {
            dc.mu = d.at("mu").get<double>();
            dc.sigma = d.at("sigma").get<double>();
        } else if (dc.type == "table") {
            dc.path = d.at("path").get<std::string>();
        } else if (dc.type != "uniform") {
            throw Error(ErrorCode::Config, "unknown density type '" + dc.type + "'");
        }
        a.density = dc;
    }
}

void parse_control(const json& j, ProblemConfig::Control& c) {
    require_object(j, "control", {"pieces", "lower", "upper", "breakpoints"});
    c.box = {to_vector(j.at("lower")), to_vector(j.at("upper"))};
    c.box.validate();
    if (j.contains("breakpoints")) {
        c.breakpoints = j.at("breakpoints").get<std::vector<double>>();
        c.pieces = static_cast<int>(c.breakpoints->size()) - 1;
        if (j.contains("pieces") && j.at("pieces").get<int>() != c.pieces)
            throw Error(ErrorCode::Config, "control.pieces disagrees with control.breakpoints");
    } else {
        c.pieces = j.at("pieces").get<int>();
    }
    if (c.pieces < 1) throw Error(ErrorCode::Config, "control.pieces must be >= 1");
}

void parse_solver(const json& j, ProblemConfig::Solver& s) {
    require_object(j, "solver",
                   {"rho0", "alpha1", "alpha2", "alpha3", "omega_star", "eta_star", "max_outer", "max_inner", "epsilon",
                    "epsilon_decrease", "steps_per_piece", "multistart", "seed", "strategy", "initial_step", "scaling", "kkt",
                    "fd_check"});
    auto& sch = s.options.schedule;
    sch.rho0 = get_or(j, "rho0", sch.rho0);
    sch.alpha1 = get_or(j, "alpha1", sch.alpha1);
    sch.alpha2 = get_or(j, "alpha2", sch.alpha2);
    sch.alpha3 = get_or(j, "alpha3", sch.alpha3);
    sch.omega_star = get_or(j, "omega_star", sch.omega_star);
    sch.eta_star = get_or(j, "eta_star", sch.eta_star);
    sch.max_outer = get_or(j, "max_outer", sch.max_outer);
    sch.max_inner = get_or(j, "max_inner", sch.max_inner);
    s.options.epsilon = get_or(j, "epsilon", s.options.epsilon);
    s.options.epsilon_decrease = get_or(j, "epsilon_decrease", s.options.epsilon_decrease);
    s.options.integrator.steps_per_piece = get_or(j, "steps_per_piece", s.options.integrator.steps_per_piece);
    s.options.strategy = parse_strategy(get_or<std::string>(j, "strategy", "joint"));
    s.options.initial_step = parse_initial_step(get_or<std::string>(j, "initial_step", to_string(s.options.initial_step)));
    s.options.scaling = parse_scaling(get_or<std::string>(j, "scaling", to_string(s.options.scaling)));
    s.multistart = get_or(j, "multistart", s.multistart);
    s.seed = get_or(j, "seed", s.seed);
    s.fd_check = get_or(j, "fd_check", s.fd_check);
    if (j.contains("kkt")) {
        const json& k = j.at("kkt");
        require_object(k, "solver.kkt", {"moment", "complementarity", "stationarity"});
        s.kkt.moment = get_or(k, "moment", s.kkt.moment);
        s.kkt.complementarity = get_or(k, "complementarity", s.kkt.complementarity);
        s.kkt.stationarity = get_or(k, "stationarity", s.kkt.stationarity);
    }
    if (s.multistart < 1) throw Error(ErrorCode::Config, "solver.multistart must be >= 1");
    s.options.validate();
}

void parse_output(const json& j, ProblemConfig::Output& o) {
    require_object(j, "output", {"directory", "trace"});
    o.directory = get_or(j, "directory", o.directory);
    o.trace = get_or(j, "trace", o.trace);
}

}  // namespace

ProblemConfig parse_config(const std::string& text, const std::string& source_path) {
    ProblemConfig cfg;
    cfg.source_path = source_path;
    cfg.source_text = text;
    try {
        const json j = json::parse(text);
        require_object(j, "config", {"model", "ambiguity", "control", "solver", "output"});
        parse_model(j.at("model"), cfg.model);
        parse_ambiguity(j.at("ambiguity"), cfg.ambiguity);
        parse_control(j.at("control"), cfg.control);
        if (j.contains("solver")) parse_solver(j.at("solver"), cfg.solver);
        if (j.contains("output")) parse_output(j.at("output"), cfg.output);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Config, std::string("invalid config: ") + e.what());
    }
    if (cfg.control.box.dim() != 1)
        throw Error(ErrorCode::Config, "built-in models have a scalar control; box needs one entry");
    // Constructing these re-validates the cross-section invariants.
    cfg.build_model().validate();
    cfg.build_grid();
    const DiscreteSupport s = cfg.build_support();
    build_moment_lp(cfg.ambiguity.spec, s, VectorXd::Zero(s.size()));
    return cfg;
}

ProblemConfig load_config(const std::string& path) { return parse_config(read_file(path), path); }

DynamicsModel ProblemConfig::build_model() const {
    DynamicsModel m;
    if (model.name == "fedbatch") {
        m = fedbatch_model(model.params, model.t_f, model.x0);
    } else if (model.name == "toy:zero") {
        m = zero_model();
        m.x0 = model.x0;
    } else if (model.name == "toy:drift") {
        m = drift_model(model.x0[0]);
    } else {
        m = linear_model(model.x0[0]);
    }
    m.t_f = model.t_f;
    return m;
}

DiscreteSupport ProblemConfig::build_support() const {
    if (ambiguity.support) return DiscreteSupport{*ambiguity.support};
    return characteristic_grid(ambiguity.spec, ambiguity.m, ambiguity.placement);
}

ControlGrid ProblemConfig::build_grid() const {
    if (control.breakpoints) {
        const int n = static_cast<int>(control.breakpoints->size()) - 1;
        return ControlGrid(*control.breakpoints, control.box.lower.transpose().replicate(n, 1), control.box);
    }
    return ControlGrid::uniform(control.pieces, control.box);
}

PenaltyProblem ProblemConfig::build_problem() const {
    return PenaltyProblem(build_model(), build_grid(), ambiguity.spec, build_support(), solver.options.epsilon,
                          solver.options.schedule.rho0, solver.options.integrator);
}

Density ProblemConfig::build_density() const {
    if (!ambiguity.density) throw Error(ErrorCode::Config, "config has no ambiguity.density section");
    const DensityConfig& d = *ambiguity.density;
    const AmbiguitySpec& s = ambiguity.spec;
    if (d.type == "uniform") return uniform_density(s);
    if (d.type == "truncnorm") return truncnorm_density(d.mu, d.sigma, s.p_lower, s.p_upper);
    std::filesystem::path p(d.path);
    if (p.is_relative() && !source_path.empty()) p = std::filesystem::path(source_path).parent_path() / p;
    return table_density_from_csv(p.string());
}

}  // namespace droc
