#include "droc/outer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <random>

#include "droc/errors.hpp"

namespace droc {

void AlgorithmSchedule::validate() const {
    if (!(rho0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho0 must be positive");
    if (!(alpha1 > 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha1 must exceed 1");
    if (!(alpha2 > 0.0 && alpha2 < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha2 must lie in (0, 1)");
    if (!(alpha3 > 0.0 && alpha3 < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha3 must lie in (0, 1)");
    if (!(omega_star > 0.0) || !(eta_star > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerances must be positive");
    if (max_outer < 1 || max_inner < 1) throw Error(ErrorCode::InvalidArgument, "iteration caps must be >= 1");
}

void SolverOptions::validate() const {
    schedule.validate();
    if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
    if (epsilon_decrease && !(epsilon_factor > 0.0 && epsilon_factor < 1.0 && epsilon_min > 0.0))
        throw Error(ErrorCode::InvalidArgument, "epsilon schedule needs factor in (0, 1) and positive floor");
    if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0)) throw Error(ErrorCode::InvalidArgument, "armijo_c1 must lie in (0, 1)");
    if (integrator.steps_per_piece < 1) throw Error(ErrorCode::InvalidArgument, "steps_per_piece must be >= 1");
}

Strategy parse_strategy(const std::string& name) {
    if (name == "joint") return Strategy::Joint;
    if (name == "alt-direction") return Strategy::AltDirection;
    throw Error(ErrorCode::InvalidArgument, "unknown strategy '" + name + "'");
}

std::string to_string(Strategy strategy) { return strategy == Strategy::Joint ? "joint" : "alt-direction"; }

InitialStep parse_initial_step(const std::string& name) {
    if (name == "unit") return InitialStep::Unit;
    if (name == "bb") return InitialStep::BarzilaiBorwein;
    throw Error(ErrorCode::InvalidArgument, "unknown initial_step '" + name + "'");
}

std::string to_string(InitialStep step) { return step == InitialStep::Unit ? "unit" : "bb"; }

Scaling parse_scaling(const std::string& name) {
    if (name == "none") return Scaling::None;
    if (name == "normalized") return Scaling::Normalized;
    throw Error(ErrorCode::InvalidArgument, "unknown scaling '" + name + "'");
}

std::string to_string(Scaling scaling) { return scaling == Scaling::None ? "none" : "normalized"; }

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::MaxIterations: return "MaxIterations";
        case SolveStatus::LineSearchFailure: return "LineSearchFailure";
    }
    return "Unknown";
}

PenaltyProblem::PenaltyProblem(DynamicsModel model_, ControlGrid grid_, AmbiguitySpec spec_, DiscreteSupport support_,
                               double epsilon_, double rho_, IntegratorOptions integrator_)
    : model(std::move(model_)),
      grid(std::move(grid_)),
      spec(spec_),
      support(std::move(support_)),
      lp(build_moment_lp(spec, support, VectorXd::Zero(support.size()))),
      epsilon(epsilon_),
      rho(rho_),
      integrator(integrator_) {
    model.validate();
    if (grid.n_u() != model.n_u) throw Error(ErrorCode::DimensionMismatch, "grid/model control dimension");
}

VectorXd constraint_value(const VectorXd& costs, const MomentLPData& data, const Vector3d& y) {
    if (costs.size() != data.m()) throw Error(ErrorCode::DimensionMismatch, "constraint_value: cost length");
    return costs - data.a.transpose() * y;
}

double smooth_constraint(double g, double epsilon) {
    if (g < -epsilon) return 0.0;
    if (g > epsilon) return g;
    return (g + epsilon) * (g + epsilon) / (4.0 * epsilon);
}

double smooth_constraint_derivative(double g, double epsilon) {
    if (g < -epsilon) return 0.0;
    if (g > epsilon) return 1.0;
    return (g + epsilon) / (2.0 * epsilon);
}

VectorXd MeritEval::gradient() const {
    VectorXd out(grad_v.size() + 3);
    out << grad_v, grad_y;
    return out;
}

TrajectoryBundle integrate_problem(const PenaltyProblem& problem, const VectorXd& v, bool with_sensitivities) {
    const ControlGrid grid = problem.grid.with_flat(v);
    return integrate_scenarios(problem.model, grid, problem.support.points, problem.integrator, with_sensitivities);
}

MeritEval merit(const PenaltyProblem& problem, const Vector3d& y, const TrajectoryBundle& trajectories) {
    if (static_cast<int>(trajectories.size()) != problem.m())
        throw Error(ErrorCode::DimensionMismatch, "merit: one trajectory per support point required");
    MeritEval e;
    e.costs = terminal_costs(problem.model, trajectories);
    e.g = constraint_value(e.costs, problem.lp, y);
    e.ytb = y.dot(problem.lp.b);
    e.max_g = e.g.maxCoeff();
    for (int i = 0; i < problem.m(); ++i) e.G += smooth_constraint(e.g[i], problem.epsilon);
    e.value = e.ytb + 0.5 * problem.rho * e.G * e.G;

    const bool with_gradient =
        std::all_of(trajectories.begin(), trajectories.end(), [](const Trajectory& t) { return t.has_sensitivities(); });
    if (!with_gradient) return e;

    e.grad_v = VectorXd::Zero(problem.n_v());
    e.grad_y = problem.lp.b;
    const double scale = problem.rho * e.G;
    if (scale == 0.0) return e;
    // Summed in scenario order so results do not depend on thread count.
    for (int i = 0; i < problem.m(); ++i) {
        const double d = smooth_constraint_derivative(e.g[i], problem.epsilon);
        if (d == 0.0) continue;
        e.grad_v += scale * d * cost_gradient(problem.model, trajectories[i]).transpose();
        e.grad_y -= scale * d * problem.lp.a.col(i);
    }
    return e;
}

MeritEval merit_at(const PenaltyProblem& problem, const VectorXd& v, const Vector3d& y, bool with_gradient) {
    return merit(problem, y, integrate_problem(problem, v, with_gradient));
}

VectorXd merit_fd_gradient(const PenaltyProblem& problem, const VectorXd& v, const Vector3d& y, double step) {
    // FD probes may step just outside the box, so evaluate on a widened copy.
    PenaltyProblem wide = problem;
    ControlBox box = wide.grid.box();
    box.lower.array() -= 1.0;
    box.upper.array() += 1.0;
    wide.grid = ControlGrid(wide.grid.breakpoints(), wide.grid.values(), box);

    const int n_v = problem.n_v();
    VectorXd fd(n_v + 3);
    for (int j = 0; j < n_v + 3; ++j) {
        VectorXd vp = v, vm = v;
        Vector3d yp = y, ym = y;
        double h;
        if (j < n_v) {
            h = step * std::max(1.0, std::abs(v[j]));
            vp[j] += h;
            vm[j] -= h;
        } else {
            h = step * std::max(1.0, std::abs(y[j - n_v]));
            yp[j - n_v] += h;
            ym[j - n_v] -= h;
        }
        fd[j] = (merit_at(wide, vp, yp, false).value - merit_at(wide, vm, ym, false).value) / (2.0 * h);
    }
    return fd;
}

VectorXd projected_gradient(const VectorXd& grad, const VectorXd& v, const VectorXd& lower, const VectorXd& upper) {
    const Eigen::Index n_v = v.size();
    if (grad.size() < n_v || lower.size() != n_v || upper.size() != n_v)
        throw Error(ErrorCode::DimensionMismatch, "projected_gradient: dimension mismatch");
    VectorXd p = grad;
    for (Eigen::Index i = 0; i < n_v; ++i) {
        if (v[i] <= lower[i])
            p[i] = std::min(0.0, grad[i]);
        else if (v[i] >= upper[i])
            p[i] = std::max(0.0, grad[i]);
    }
    return p;
}

double projected_gradient_norm(const VectorXd& grad, const VectorXd& v, const VectorXd& lower, const VectorXd& upper) {
    const VectorXd p = projected_gradient(grad, v, lower, upper);
    return p.size() ? p.cwiseAbs().maxCoeff() : 0.0;
}

namespace {

struct Iterate {
    VectorXd v;
    Vector3d y;
    MeritEval eval;
};

class OuterLoop {
public:
    OuterLoop(PenaltyProblem problem, const SolverOptions& options)
        : p_(std::move(problem)), opts_(options), lower_(p_.lower()), upper_(p_.upper()) {
        build_scaling();
    }

    SolveReport run(const VectorXd& v0, const Vector3d& y0) {
        const auto& sched = opts_.schedule;
        p_.rho = sched.rho0;
        p_.epsilon = opts_.epsilon;
        double omega = 1.0 / sched.rho0;
        double eta = 1.0 / std::pow(sched.rho0, 0.1);

        Iterate cur{clamp_flat(v0, lower_, upper_), to_internal_y(y0), {}};
        if (opts_.strategy == Strategy::AltDirection) cur.y = exact_y(cur.v);
        cur.eval = evaluate(cur.v, cur.y, true);

        SolveReport report;
        std::optional<Iterate> best;
        double best_ytb = std::numeric_limits<double>::infinity();

        for (int k = 0; k < sched.max_outer; ++k) {
            const int steps_before = report.inner_iterations;
            const bool line_search_ok = inner(cur, omega, report);
            const double pg = pg_norm(cur);
            report.trace.push_back({k, p_.rho, omega, eta, cur.eval.value, cur.eval.ytb, cur.eval.G, cur.eval.max_g, pg,
                                    report.inner_iterations - steps_before});
            report.outer_iterations = k + 1;
            if (opts_.on_outer) opts_.on_outer(report.trace.back());

            if (cur.eval.max_g <= p_.epsilon && cur.eval.ytb < best_ytb) {
                best_ytb = cur.eval.ytb;
                best = cur;
            }
            if (!line_search_ok) {
                report.status = SolveStatus::LineSearchFailure;
                return finish(report, best ? *best : cur);
            }
            if (cur.eval.G <= eta) {
                if (cur.eval.G <= sched.eta_star && pg <= sched.omega_star) {
                    report.status = SolveStatus::Converged;
                    return finish(report, cur);
                }
                eta *= sched.alpha3;
            } else {
                p_.rho *= sched.alpha1;
            }
            omega *= sched.alpha2;
            if (opts_.epsilon_decrease) p_.epsilon = std::max(opts_.epsilon_min, p_.epsilon * opts_.epsilon_factor);
            if (opts_.strategy == Strategy::AltDirection) cur.y = exact_y(cur.v);
            cur.eval = evaluate(cur.v, cur.y, true);
        }
        report.status = SolveStatus::MaxIterations;
        return finish(report, best ? *best : cur);
    }

private:
    MeritEval evaluate(const VectorXd& v, const Vector3d& y, bool with_gradient) {
        ++evaluations_;
        return merit_at(p_, v, y, with_gradient);
    }

    Vector3d exact_y(const VectorXd& v) {
        MomentLPData data = p_.lp;
        data.c = terminal_costs(p_.model, integrate_problem(p_, v, false));
        const LPResult lp = solve_dual_isp(data);
        if (lp.status != LPStatus::Optimal) throw Error(ErrorCode::Infeasible, "moment-infeasible support");
        return lp.dual;
    }

    VectorXd search_gradient(const Iterate& it) const {
        VectorXd g = it.eval.gradient();
        if (opts_.strategy == Strategy::AltDirection) g.tail<3>().setZero();
        return g;
    }

    // Projected-gradient norm in the caller's (v, y) coordinates.
    double pg_norm(const Iterate& it) const {
        VectorXd g = search_gradient(it);
        g.tail<3>() = basis_.triangularView<Eigen::Lower>().solve(Vector3d(g.tail<3>()));
        return projected_gradient_norm(g, it.v, lower_, upper_);
    }

    // Projected-gradient descent at fixed (rho, epsilon) until the projected
    // gradient drops below omega. Returns false on line-search failure.
    bool inner(Iterate& cur, double omega, SolveReport& report) {
        const int n_v = p_.n_v();
        VectorXd prev_z, prev_grad;
        for (int it = 0; it < opts_.schedule.max_inner; ++it) {
            if (pg_norm(cur) <= omega) return true;
            const VectorXd grad = search_gradient(cur);
            const VectorXd dir = precondition(grad);

            VectorXd z(n_v + 3);
            z << cur.v, cur.y;
            double step = 1.0;
            if (opts_.initial_step == InitialStep::BarzilaiBorwein && prev_z.size()) {
                const VectorXd s = z - prev_z;
                const double sy = s.dot(grad - prev_grad);
                if (sy > 0.0) step = std::clamp(s.dot(unprecondition(s)) / sy, 1e-10, 1e10);
            }
            bool accepted = false;
            for (; step >= opts_.min_step; step *= 0.5) {
                VectorXd v_new = clamp_flat(cur.v - step * dir.head(n_v), lower_, upper_);
                Vector3d y_new = cur.y - step * dir.tail<3>();
                VectorXd z_new(n_v + 3);
                z_new << v_new, y_new;
                const double decrease = opts_.armijo_c1 * grad.dot(z_new - z);
                if (decrease == 0.0) break;  // projection pins every moving component
                MeritEval trial = evaluate(v_new, y_new, false);
                if (trial.value <= cur.eval.value + decrease) {
                    report.armijo_log.push_back({cur.eval.value, trial.value, decrease});
                    prev_z = z;
                    prev_grad = grad;
                    cur.v = std::move(v_new);
                    cur.y = y_new;
                    if (opts_.strategy == Strategy::AltDirection) cur.y = exact_y(cur.v);
                    cur.eval = evaluate(cur.v, cur.y, true);
                    accepted = true;
                    break;
                }
            }
            ++report.inner_iterations;
            if (!accepted) return false;
        }
        return true;
    }

    // Normalized scaling runs the loop on (v, yt) with y = T' yt, where T maps
    // [1, p, p^2] to [1, t, t^2], t = (p - mid) / half_width. The moment data
    // are rewritten in the t basis so y'b is formed without cancellation, and
    // v steps are scaled by the squared box widths.
    void build_scaling() {
        const int n_v = p_.n_v();
        width2_ = VectorXd::Ones(n_v);
        basis_ = Eigen::Matrix3d::Identity();
        if (opts_.scaling == Scaling::None) return;
        for (int j = 0; j < n_v; ++j) {
            const double w = upper_[j] - lower_[j];
            if (w > 0.0) width2_[j] = w * w;
        }
        const double c = 0.5 * (p_.spec.p_upper + p_.spec.p_lower);
        const double h = 0.5 * (p_.spec.p_upper - p_.spec.p_lower);
        basis_ << 1.0, 0.0, 0.0, -c / h, 1.0 / h, 0.0, c * c / (h * h), -2.0 * c / (h * h), 1.0 / (h * h);
        p_.lp.a = basis_ * p_.lp.a;
        p_.lp.b = basis_ * p_.lp.b;
    }

    Vector3d to_internal_y(const Vector3d& y) const { return basis_.transpose().triangularView<Eigen::Upper>().solve(y); }
    Vector3d to_external_y(const Vector3d& yt) const { return basis_.transpose() * yt; }

    VectorXd precondition(const VectorXd& g) const {
        VectorXd d = g;
        d.head(p_.n_v()) = width2_.cwiseProduct(g.head(p_.n_v()));
        return d;
    }

    VectorXd unprecondition(const VectorXd& s) const {
        VectorXd d = s;
        d.head(p_.n_v()) = s.head(p_.n_v()).cwiseQuotient(width2_);
        return d;
    }

    SolveReport finish(SolveReport& report, const Iterate& it) {
        report.v = it.v;
        report.y = to_external_y(it.y);
        report.objective = it.eval.ytb;
        report.merit = it.eval.value;
        report.G_eps = it.eval.G;
        report.max_g = it.eval.max_g;
        report.pg_norm = pg_norm(it);
        report.epsilon = p_.epsilon;
        report.rho = p_.rho;
        report.merit_evaluations = evaluations_;
        return report;
    }

    PenaltyProblem p_;
    SolverOptions opts_;
    VectorXd lower_;
    VectorXd upper_;
    VectorXd width2_;
    Eigen::Matrix3d basis_;
    int evaluations_ = 0;
};

}  // namespace

SolveReport solve(PenaltyProblem problem, const SolverOptions& options, const VectorXd& v0, const Vector3d& y0) {
    options.validate();
    if (v0.size() != problem.n_v()) throw Error(ErrorCode::DimensionMismatch, "initial control has wrong length");
    if (!check_feasible_support(problem.spec, problem.support))
        throw Error(ErrorCode::Infeasible, "moment-infeasible support");
    problem.integrator = options.integrator;
    return OuterLoop(std::move(problem), options).run(v0, y0);
}

MultistartResult multistart_init(const PenaltyProblem& problem, int M, std::uint64_t seed) {
    if (M < 1) throw Error(ErrorCode::InvalidArgument, "multistart needs M >= 1");
    if (!check_feasible_support(problem.spec, problem.support))
        throw Error(ErrorCode::Infeasible, "moment-infeasible support");
    const VectorXd lower = problem.lower(), upper = problem.upper();
    const int n_v = problem.n_v();

    // All draws come from one serial stream so the candidate set is fixed by
    // the seed alone.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<VectorXd> draws(M, VectorXd(n_v));
    for (auto& v : draws)
        for (int j = 0; j < n_v; ++j) v[j] = lower[j] + unit(rng) * (upper[j] - lower[j]);

    std::vector<double> values(M);
    std::vector<Vector3d> ys(M);
    std::vector<std::exception_ptr> errors(M);
#pragma omp parallel for schedule(dynamic, 1)
    for (int d = 0; d < M; ++d) {
        try {
            const ControlGrid grid = problem.grid.with_flat(draws[d]);
            MomentLPData data = problem.lp;
            data.c = terminal_costs(problem.model, integrate_scenarios_serial(problem.model, grid, problem.support.points,
                                                                              problem.integrator, false));
            const LPResult lp = solve_dual_isp(data);
            if (lp.status != LPStatus::Optimal) throw Error(ErrorCode::Infeasible, "moment-infeasible support");
            ys[d] = lp.dual;
            values[d] = lp.objective;
        } catch (...) {
            errors[d] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    int win = 0;
    for (int d = 1; d < M; ++d)
        if (values[d] < values[win]) win = d;
    return {draws[win], ys[win], values[win], win};
}

}  // namespace droc
