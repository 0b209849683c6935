#include "droc/bench.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "droc/errors.hpp"

namespace droc {

namespace {

VectorXd to_vector(const nlohmann::json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

DynamicsModel BenchmarkCase::model() const { return fedbatch_model(params, t_f, x0); }

DiscreteSupport BenchmarkCase::support() const { return characteristic_grid(spec, m, placement); }

ControlGrid BenchmarkCase::reference_grid() const {
    ControlGrid g = ControlGrid::uniform(pieces, box);
    return g.with_flat(reference_control);
}

ControlGrid BenchmarkCase::constant_grid(double u) const {
    return ControlGrid::uniform(pieces, box, VectorXd::Constant(box.dim(), u));
}

IntegratorOptions BenchmarkCase::integrator() const {
    IntegratorOptions o;
    o.steps_per_piece = steps_per_piece;
    return o;
}

std::string default_benchmark_path() { return std::string(DROC_DATA_DIR) + "/fedbatch_reference.json"; }

BenchmarkCase load_benchmark(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open benchmark data " + path);
    nlohmann::json j;
    try {
        in >> j;
        BenchmarkCase bc;
        bc.name = j.at("name").get<std::string>();
        const auto& m = j.at("model");
        bc.params.d_X = m.at("d_X");
        bc.params.mu_m = m.at("mu_m");
        bc.params.K_S = m.at("K_S");
        bc.params.S_star = m.at("S_star");
        bc.params.Y_S = m.at("Y_S");
        bc.params.rho_S = m.at("rho_S");
        bc.x0 = to_vector(m.at("x0"));
        bc.t_f = m.at("t_f");
        const auto& a = j.at("ambiguity");
        bc.spec = {a.at("mu"), a.at("sigma"), a.at("p_lower"), a.at("p_upper")};
        bc.m = a.at("m");
        bc.placement = parse_placement(a.at("placement"));
        const auto& c = j.at("control");
        bc.pieces = c.at("pieces");
        bc.box = {to_vector(c.at("lower")), to_vector(c.at("upper"))};
        bc.steps_per_piece = j.at("steps_per_piece");
        const auto& r = j.at("reference");
        bc.reference_control = to_vector(r.at("control"));
        bc.reference_biomass = to_vector(r.at("terminal_biomass"));
        bc.reference_q = to_vector(r.at("q_star"));
        bc.reference_J_star = r.at("J_star");
        bc.reference_J_tilde_star = r.at("J_tilde_star");
        bc.spec.validate();
        bc.box.validate();
        if (bc.reference_control.size() != bc.pieces * bc.box.dim() || bc.reference_biomass.size() != bc.m ||
            bc.reference_q.size() != bc.m)
            throw Error(ErrorCode::DimensionMismatch, "benchmark reference arrays have inconsistent lengths");
        return bc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Config, "bad benchmark data " + path + ": " + e.what());
    }
}

VectorXd reproduce_trajectories(const BenchmarkCase& bc) {
    const DiscreteSupport s = bc.support();
    const TrajectoryBundle bundle =
        integrate_scenarios(bc.model(), bc.reference_grid(), s.points, bc.integrator(), false);
    VectorXd X(bc.m);
    for (int i = 0; i < bc.m; ++i) X[i] = bundle[i].terminal_state()[0];
    return X;
}

WorstCase reproduce_worst_case(const BenchmarkCase& bc, const VectorXd& biomass) {
    const MomentLPData data = build_moment_lp(bc.spec, bc.support(), -biomass);
    WorstCase w;
    w.primal = solve_isp(data);
    w.dual = solve_dual_isp(data);
    if (w.primal.status != LPStatus::Optimal) throw Error(ErrorCode::Infeasible, "moment-infeasible support");
    w.duality_gap = std::abs(w.primal.objective - w.dual.objective);
    return w;
}

Baseline constant_control_baseline(const BenchmarkCase& bc, double u_const) {
    const ControlGrid grid = bc.constant_grid(u_const);
    const DiscreteSupport s = bc.support();
    const TrajectoryBundle bundle = integrate_scenarios(bc.model(), grid, s.points, bc.integrator(), false);
    Baseline b;
    b.biomass.resize(bc.m);
    b.terminal_volume.resize(bc.m);
    for (int i = 0; i < bc.m; ++i) {
        b.biomass[i] = bundle[i].terminal_state()[0];
        b.terminal_volume[i] = bundle[i].terminal_state()[2];
    }
    b.worst_case = reproduce_worst_case(bc, b.biomass).primal.objective;
    b.spread = b.biomass.maxCoeff() - b.biomass.minCoeff();
    return b;
}

ReferenceConsistency reference_consistency(const BenchmarkCase& bc) {
    const DiscreteSupport s = bc.support();
    ReferenceConsistency r{0.0, 0.0, 0.0};
    for (int i = 0; i < bc.m; ++i) {
        r.expected_cost -= bc.reference_q[i] * bc.reference_biomass[i];
        r.mean += bc.reference_q[i] * s.points[i];
        r.second_moment += bc.reference_q[i] * s.points[i] * s.points[i];
    }
    return r;
}

std::string trajectory_csv(const BenchmarkCase& bc, const ControlGrid& grid) {
    const DiscreteSupport s = bc.support();
    const TrajectoryBundle bundle = integrate_scenarios(bc.model(), grid, s.points, bc.integrator(), false);
    std::ostringstream os;
    os << std::setprecision(10);
    os << "t,scenario_index,m_S,X,S,V\r\n";
    for (std::size_t i = 0; i < bundle.size(); ++i)
        for (std::size_t j = 0; j < bundle[i].mesh.size(); ++j) {
            const VectorXd& x = bundle[i].states[j];
            os << bundle[i].mesh[j] * bc.t_f << ',' << i + 1 << ',' << bundle[i].param << ',' << x[0] << ',' << x[1]
               << ',' << x[2] << "\r\n";
        }
    return os.str();
}

std::vector<BenchRow> run_reproduction(const BenchmarkCase& bc) {
    std::vector<BenchRow> rows;
    auto add = [&](std::string name, double value, double ref, double tol) {
        rows.push_back({std::move(name), value, ref, tol, std::abs(value - ref) <= tol});
    };

    const ReferenceConsistency rc = reference_consistency(bc);
    add("reference: -sum q* X", rc.expected_cost, bc.reference_J_tilde_star, 1e-3);
    add("reference: sum q* p", rc.mean, bc.spec.mu, 1e-3);
    add("reference: sum q* p^2", rc.second_moment, bc.spec.second_moment(), 1e-3);

    const VectorXd X = reproduce_trajectories(bc);
    for (int i = 0; i < bc.m; ++i) add("terminal biomass " + std::to_string(i + 1), X[i], bc.reference_biomass[i], 2e-3);

    const WorstCase printed = reproduce_worst_case(bc, bc.reference_biomass);
    for (int i = 0; i < bc.m; ++i)
        add("ISP q_" + std::to_string(i + 1) + " (printed biomass)", printed.primal.primal[i], bc.reference_q[i], 1e-3);
    add("ISP objective (printed biomass)", printed.primal.objective, bc.reference_J_tilde_star, 1e-3);
    add("ISP/Dual-ISP gap", printed.duality_gap, 0.0, 1e-8);

    const WorstCase simulated = reproduce_worst_case(bc, X);
    add("ISP objective (simulated biomass)", simulated.primal.objective, bc.reference_J_tilde_star, 1e-3);

    const Baseline base = constant_control_baseline(bc, 0.01);
    rows.push_back({"u=0.01 worst case above reference-control worst case", base.worst_case,
                    simulated.primal.objective, 0.0, base.worst_case > simulated.primal.objective});
    rows.push_back({"u=0.01 biomass spread above reference-control spread", base.spread, X.maxCoeff() - X.minCoeff(),
                    0.0, base.spread > X.maxCoeff() - X.minCoeff()});
    return rows;
}

}  // namespace droc
