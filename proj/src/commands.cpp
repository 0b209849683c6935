#include "droc/commands.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "droc/bench.hpp"
#include "droc/config.hpp"
#include "droc/errors.hpp"
#include "droc/io.hpp"
#include "droc/kkt.hpp"
#include "droc/parallel.hpp"

namespace droc {

namespace {

std::string join_path(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).string();
}

int guarded(Streams io, const std::function<int()>& body) {
    try {
        return body();
    } catch (const Error& e) {
        io.err << "error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        io.err << "error: " << e.what() << "\n";
    }
    return kExitError;
}

void apply_threads(const GlobalOptions& g) { set_threads(resolve_threads(g.threads)); }

struct RunContext {
    ProblemConfig cfg;
    std::string out_dir;
    std::uint64_t seed;
};

RunContext open_run(const GlobalOptions& g) {
    if (g.config.empty()) throw Error(ErrorCode::Config, "no config given (use --config <path>)");
    apply_threads(g);
    RunContext ctx{load_config(g.config), "", 0};
    ctx.out_dir = g.out.value_or(ctx.cfg.output.directory);
    ctx.seed = g.seed.value_or(ctx.cfg.solver.seed);
    return ctx;
}

void write_manifest(const RunContext& ctx, const std::string& command, const std::string& status,
                    const std::vector<std::string>& files) {
    nlohmann::ordered_json m;
    m["tool"] = "droc";
    m["version"] = DROC_VERSION;
    m["command"] = command;
    m["config"] = ctx.cfg.source_path;
    m["config_fnv1a64"] = hex64(fnv1a64(ctx.cfg.source_text));
    m["seed"] = ctx.seed;
    m["status"] = status;
    m["files"] = files;
    write_file_atomic(join_path(ctx.out_dir, "manifest.json"), m.dump(2) + "\n");
}

MomentLPData lp_at(const PenaltyProblem& problem, const ControlGrid& grid) {
    MomentLPData data = problem.lp;
    data.c = terminal_costs(problem.model, integrate_scenarios(problem.model, grid, problem.support.points,
                                                               problem.integrator, false));
    return data;
}

void require_feasible(const PenaltyProblem& problem) {
    if (!check_feasible_support(problem.spec, problem.support))
        throw Error(ErrorCode::Infeasible, "moment-infeasible support");
}

std::string worstcase_csv(const PenaltyProblem& problem, const MomentLPData& data, const LPResult& isp,
                          const Vector3d& y) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "scenario_index,p,cost,q,y_dot_a,g\r\n";
    const VectorXd g = constraint_value(data.c, data, y);
    for (int i = 0; i < problem.m(); ++i)
        os << i + 1 << ',' << problem.support.points[i] << ',' << data.c[i] << ',' << isp.primal[i] << ','
           << y.dot(data.a.col(i)) << ',' << g[i] << "\r\n";
    return os.str();
}

std::string trace_csv(const std::vector<TraceRecord>& trace) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "k,rho,omega,eta,merit,ytb,G_eps,max_g,pg_norm,inner_steps\r\n";
    for (const auto& r : trace)
        os << r.k << ',' << r.rho << ',' << r.omega << ',' << r.eta << ',' << r.merit << ',' << r.ytb << ','
           << r.G_eps << ',' << r.max_g << ',' << r.pg_norm << ',' << r.inner_steps << "\r\n";
    return os.str();
}

std::string vec_str(const VectorXd& v) {
    std::ostringstream os;
    os << std::setprecision(6) << '[';
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ']';
    return os.str();
}

}  // namespace

int cmd_solve(const GlobalOptions& g, Streams io) {
    return guarded(io, [&] {
        const RunContext ctx = open_run(g);
        const ProblemConfig& cfg = ctx.cfg;
        PenaltyProblem problem = cfg.build_problem();
        require_feasible(problem);

        const MultistartResult init = multistart_init(problem, cfg.solver.multistart, ctx.seed);
        const SolveReport rep = solve(problem, cfg.solver.options, init.v, init.y);

        const ControlGrid grid = problem.grid.with_flat(rep.v);
        MomentLPData data = lp_at(problem, grid);
        const LPResult isp = solve_isp(data);
        const LPResult dual = solve_dual_isp(data);
        const KKTCertificate cert = verify(problem, rep.v, rep.y);

        std::vector<LabelledValue> scalars = {{"y_1", rep.y[0]}, {"y_2", rep.y[1]}, {"y_3", rep.y[2]},
                                              {"J_star", rep.objective}, {"J_tilde_star", dual.objective}};
        for (int r = 0; r < 3; ++r) scalars.push_back({"y_refit_" + std::to_string(r + 1), dual.dual[r]});

        std::vector<std::string> files = {"solution.csv", "worstcase.csv", "kkt.txt"};
        write_file_atomic(join_path(ctx.out_dir, "solution.csv"), solution_csv(grid, cfg.model.t_f, scalars));
        write_file_atomic(join_path(ctx.out_dir, "worstcase.csv"), worstcase_csv(problem, data, isp, rep.y));
        std::ostringstream kkt;
        kkt << std::setprecision(12) << "status = " << to_string(rep.status) << "\n"
            << "epsilon = " << rep.epsilon << "\n"
            << "feasibility_slack = max_g <= eta_star + epsilon\n"
            << cert.to_text();
        write_file_atomic(join_path(ctx.out_dir, "kkt.txt"), kkt.str());
        if (cfg.output.trace) {
            write_file_atomic(join_path(ctx.out_dir, "trace.csv"), trace_csv(rep.trace));
            files.push_back("trace.csv");
        }
        write_manifest(ctx, "solve", to_string(rep.status), files);

        if (!g.quiet) {
            io.out << std::setprecision(8);
            io.out << "status        " << to_string(rep.status) << " (" << rep.outer_iterations << " outer, "
                   << rep.inner_iterations << " inner, " << rep.merit_evaluations << " merit evaluations)\n";
            io.out << "multistart    best draw " << init.draw << " of " << cfg.solver.multistart << ", y'b = " << init.value
                   << "\n";
            io.out << "J*  (y*'b)    " << rep.objective << "\n";
            io.out << "J~* (Dual-ISP)" << dual.objective << "\n";
            io.out << "gap           " << std::abs(rep.objective - dual.objective) << "\n";
            io.out << "G_eps         " << rep.G_eps << "   max g " << rep.max_g << "   pg " << rep.pg_norm << "\n";
            io.out << "q*            " << vec_str(isp.primal) << "\n";
            io.out << "output        " << ctx.out_dir << "\n";
        }
        return rep.status == SolveStatus::Converged ? kExitOk : kExitSoftFail;
    });
}

int cmd_inner(const GlobalOptions& g, const std::string& control_file, Streams io) {
    return guarded(io, [&] {
        const RunContext ctx = open_run(g);
        const PenaltyProblem problem = ctx.cfg.build_problem();
        const SolutionFile sol = read_solution_csv(control_file);
        const ControlGrid grid = problem.grid.with_values(sol.values);
        require_feasible(problem);

        MomentLPData data = lp_at(problem, grid);
        const LPResult isp = solve_isp(data);
        const LPResult dual = solve_dual_isp(data);
        if (isp.status != LPStatus::Optimal) throw Error(ErrorCode::Infeasible, "moment-infeasible support");
        const double gap = std::abs(isp.objective - dual.objective);

        write_file_atomic(join_path(ctx.out_dir, "worstcase.csv"), worstcase_csv(problem, data, isp, dual.dual));
        write_manifest(ctx, "inner", "ok", {"worstcase.csv"});
        if (!g.quiet) {
            io.out << std::setprecision(10);
            io.out << "costs         " << vec_str(data.c) << "\n";
            io.out << "q             " << vec_str(isp.primal) << "\n";
            io.out << "y             " << vec_str(dual.dual) << "\n";
            io.out << "ISP objective " << isp.objective << "\n";
            io.out << "Dual objective " << dual.objective << "\n";
            io.out << "duality gap   " << gap << "\n";
        }
        return kExitOk;
    });
}

int cmd_check(const GlobalOptions& g, const std::string& solution_file, Streams io) {
    return guarded(io, [&] {
        const RunContext ctx = open_run(g);
        const PenaltyProblem problem = ctx.cfg.build_problem();
        const SolutionFile sol = read_solution_csv(solution_file);
        if (!sol.y) throw Error(ErrorCode::Io, "solution file has no y block");
        const ControlGrid grid = problem.grid.with_values(sol.values);
        const VectorXd v = grid.flatten();
        const Vector3d y = *sol.y;

        const KKTCertificate cert = verify(problem, v, y);
        // The smoothed penalty only certifies g_i up to epsilon, so that slack
        // is granted to complementarity explicitly.
        KKTTolerances tol = ctx.cfg.solver.kkt;
        tol.complementarity += problem.epsilon;
        const bool pass = certificate_passes(cert, tol);

        std::ostringstream report;
        report << std::setprecision(6);
        report << cert.to_text();
        report << "tolerance_moment = " << tol.moment << "\n"
               << "tolerance_complementarity = " << tol.complementarity << "\n"
               << "tolerance_stationarity = " << tol.stationarity << "\n";
        if (ctx.cfg.solver.fd_check) {
            const MeritEval e = merit_at(problem, v, y, true);
            const VectorXd fd = merit_fd_gradient(problem, v, y);
            const VectorXd an = e.gradient();
            const double scale = std::max(an.cwiseAbs().maxCoeff(), 1e-12);
            report << "merit_gradient_fd_relative_error = " << (fd - an).cwiseAbs().maxCoeff() / scale << "\n";
            const TrajectoryBundle bundle =
                integrate_scenarios(problem.model, grid, problem.support.points, problem.integrator, true);
            double worst = 0.0;
            for (const auto& t : bundle) {
                const RowVectorXd sens = cost_gradient(problem.model, t);
                const VectorXd adj = integrate_costates(problem.model, grid, t.param, 1.0, t).piece_gradient;
                const double s = std::max(sens.cwiseAbs().maxCoeff(), 1e-12);
                worst = std::max(worst, (adj - sens.transpose()).cwiseAbs().maxCoeff() / s);
            }
            report << "costate_vs_sensitivity_relative_error = " << worst << "\n";
        }
        report << "result = " << (pass ? "PASS" : "FAIL") << "\n";
        write_file_atomic(join_path(ctx.out_dir, "check.txt"), report.str());
        write_manifest(ctx, "check", pass ? "pass" : "fail", {"check.txt"});
        if (!g.quiet) io.out << report.str();
        return pass ? kExitOk : kExitSoftFail;
    });
}

int cmd_discretize(const GlobalOptions& g, Streams io) {
    return guarded(io, [&] {
        const RunContext ctx = open_run(g);
        const ProblemConfig& cfg = ctx.cfg;
        if (cfg.ambiguity.support) throw Error(ErrorCode::Config, "discretize needs ambiguity.m, not an explicit support");
        const Density density = cfg.build_density();
        const AmbiguitySpec& spec = cfg.ambiguity.spec;
        const AmbiguitySpec moments = density_moments(density, spec.p_lower, spec.p_upper);

        std::ostringstream errs;
        errs << std::setprecision(17) << "m,delta_p,e1,e1_bound,e2,e2_bound,e1_vs_config,e2_vs_config\r\n";
        std::vector<std::string> files;
        if (!g.quiet) io.out << std::setprecision(8) << "density " << density.name << ": mean " << moments.mu
                             << ", sd " << moments.sigma << "\n";
        for (int m : {cfg.ambiguity.m, 2 * cfg.ambiguity.m}) {
            const DiscretizedDensity d =
                discretize_density(spec, density, m, cfg.ambiguity.quad_points, cfg.ambiguity.placement);
            const double dp = max_cell_width(spec, m);
            const MomentErrors e = moment_discretization_error(moments, d.support, d.weights);
            const MomentErrors ec = moment_discretization_error(spec, d.support, d.weights);
            std::ostringstream table;
            table << std::setprecision(17) << "cell_index,cell_lower,cell_upper,p,weight\r\n";
            for (int i = 0; i < m; ++i)
                table << i + 1 << ',' << spec.p_lower + i * dp << ',' << (i + 1 == m ? spec.p_upper : spec.p_lower + (i + 1) * dp)
                      << ',' << d.support.points[i] << ',' << d.weights[i] << "\r\n";
            const std::string name = "discretize_m" + std::to_string(m) + ".csv";
            write_file_atomic(join_path(ctx.out_dir, name), table.str());
            files.push_back(name);
            errs << m << ',' << dp << ',' << e.e1 << ',' << dp << ',' << e.e2 << ',' << 2.0 * spec.p_upper * dp << ','
                 << ec.e1 << ',' << ec.e2 << "\r\n";
            if (!g.quiet)
                io.out << "m=" << m << "  delta_p=" << dp << "  e1=" << e.e1 << " (bound " << dp << ")  e2=" << e.e2
                       << " (bound " << 2.0 * spec.p_upper * dp << ")\n";
        }
        write_file_atomic(join_path(ctx.out_dir, "discretize_errors.csv"), errs.str());
        files.push_back("discretize_errors.csv");
        write_manifest(ctx, "discretize", "ok", files);
        return kExitOk;
    });
}

int cmd_bench(const GlobalOptions& g, const std::optional<std::string>& reference, Streams io) {
    return guarded(io, [&] {
        apply_threads(g);
        const BenchmarkCase bc = load_benchmark(reference.value_or(default_benchmark_path()));
        const std::vector<BenchRow> rows = run_reproduction(bc);
        bool all = true;
        io.out << std::setprecision(6) << std::fixed;
        for (const auto& r : rows) {
            all = all && r.pass;
            if (!g.quiet || !r.pass)
                io.out << (r.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(56) << r.check << std::right
                       << std::setw(12) << r.value << "  ref " << std::setw(10) << r.reference << "  tol "
                       << std::scientific << std::setprecision(1) << r.tolerance << std::fixed << std::setprecision(6)
                       << "\n";
        }
        const std::string dir = g.out.value_or("out");
        write_file_atomic(join_path(dir, "trajectories_reference_control.csv"), trajectory_csv(bc, bc.reference_grid()));
        write_file_atomic(join_path(dir, "trajectories_constant_0.01.csv"), trajectory_csv(bc, bc.constant_grid(0.01)));
        io.out << (all ? "all checks passed\n" : "some checks failed\n");
        return all ? kExitOk : kExitSoftFail;
    });
}

}  // namespace droc
