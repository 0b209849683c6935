#include "droc/integrator.hpp"

#include <exception>

#include "droc/errors.hpp"

namespace droc {

namespace {

void guard_state(const VectorXd& x, double t) {
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kBlowupThreshold)
        throw Error(ErrorCode::NumericalBlowup, "state escaped at t = " + std::to_string(t));
}

void check_options(const DynamicsModel& model, const ControlGrid& grid, const IntegratorOptions& opts) {
    if (opts.steps_per_piece < 1) throw Error(ErrorCode::InvalidArgument, "steps_per_piece must be >= 1");
    if (grid.n_u() != model.n_u) throw Error(ErrorCode::DimensionMismatch, "grid/model control dimension");
}

// Shared driver: walks the pieces, holding the control constant on each, and
// calls `step(k, u, t, h)` for every RK4 substep.
template <typename Step>
void walk_mesh(const ControlGrid& grid, int steps_per_piece, Trajectory& traj, Step&& step) {
    traj.mesh.reserve(static_cast<std::size_t>(grid.pieces()) * steps_per_piece + 1);
    traj.mesh.push_back(0.0);
    for (int k = 0; k < grid.pieces(); ++k) {
        const VectorXd u = grid.piece_value(k);
        const double t0 = grid.piece_start(k);
        const double h = (grid.piece_end(k) - t0) / steps_per_piece;
        for (int s = 0; s < steps_per_piece; ++s) {
            const double t = t0 + s * h;
            step(k, u, t, h);
            // Land exactly on the breakpoint at the end of each piece.
            traj.mesh.push_back(s + 1 == steps_per_piece ? grid.piece_end(k) : t0 + (s + 1) * h);
        }
    }
}

}  // namespace

Trajectory integrate(const DynamicsModel& model, const ControlGrid& grid, double p, const IntegratorOptions& opts) {
    check_options(model, grid, opts);
    Trajectory traj;
    traj.param = p;
    traj.states.push_back(model.x0);
    VectorXd x = model.x0;
    walk_mesh(grid, opts.steps_per_piece, traj, [&](int, const VectorXd& u, double t, double h) {
        const VectorXd k1 = eval_rhs(model, x, u, p);
        const VectorXd k2 = eval_rhs(model, x + 0.5 * h * k1, u, p);
        const VectorXd k3 = eval_rhs(model, x + 0.5 * h * k2, u, p);
        const VectorXd k4 = eval_rhs(model, x + h * k3, u, p);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        guard_state(x, t + h);
        traj.states.push_back(x);
    });
    return traj;
}

Trajectory integrate_with_sensitivities(const DynamicsModel& model, const ControlGrid& grid, double p,
                                        const IntegratorOptions& opts) {
    check_options(model, grid, opts);
    const int n_u = grid.n_u();
    const int n_v = grid.n_params();

    Trajectory traj;
    traj.param = p;
    traj.states.push_back(model.x0);
    VectorXd x = model.x0;
    MatrixXd S = MatrixXd::Zero(model.n_x, n_v);
    if (opts.store_sensitivity_path) traj.sensitivity_path.push_back(S);

    walk_mesh(grid, opts.steps_per_piece, traj, [&](int k, const VectorXd& u, double t, double h) {
        // Columns of later pieces are still identically zero: their forcing
        // has not switched on and the homogeneous part keeps zero at zero.
        const int active = (k + 1) * n_u;
        const int forced = k * n_u;
        auto deriv = [&](const VectorXd& xs, const MatrixXd& Ss, VectorXd& dx, MatrixXd& dS) {
            dx = eval_rhs(model, xs, u, p);
            dS.noalias() = model.rhs_jac_x(xs, u, p) * Ss;
            dS.middleCols(forced, n_u) += model.rhs_jac_u(xs, u, p);
        };
        const MatrixXd Sa = S.leftCols(active);
        VectorXd k1x, k2x, k3x, k4x;
        MatrixXd k1s(model.n_x, active), k2s(model.n_x, active), k3s(model.n_x, active), k4s(model.n_x, active);
        deriv(x, Sa, k1x, k1s);
        deriv(x + 0.5 * h * k1x, Sa + 0.5 * h * k1s, k2x, k2s);
        deriv(x + 0.5 * h * k2x, Sa + 0.5 * h * k2s, k3x, k3s);
        deriv(x + h * k3x, Sa + h * k3s, k4x, k4s);
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        S.leftCols(active) += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
        guard_state(x, t + h);
        if (!S.allFinite()) throw Error(ErrorCode::NumericalBlowup, "non-finite sensitivities");
        traj.states.push_back(x);
        if (opts.store_sensitivity_path) traj.sensitivity_path.push_back(S);
    });
    traj.terminal_sensitivity = std::move(S);
    return traj;
}

RowVectorXd cost_gradient(const DynamicsModel& model, const Trajectory& traj) {
    if (!traj.has_sensitivities())
        throw Error(ErrorCode::MissingSensitivities, "trajectory was integrated without sensitivities");
    return model.cost_grad(traj.terminal_state()) * (*traj.terminal_sensitivity);
}

namespace {

Trajectory integrate_one(const DynamicsModel& model, const ControlGrid& grid, double p,
                         const IntegratorOptions& opts, bool with_sensitivities) {
    return with_sensitivities ? integrate_with_sensitivities(model, grid, p, opts) : integrate(model, grid, p, opts);
}

}  // namespace

TrajectoryBundle integrate_scenarios(const DynamicsModel& model, const ControlGrid& grid,
                                     std::span<const double> params, const IntegratorOptions& opts,
                                     bool with_sensitivities) {
    const auto m = static_cast<long>(params.size());
    TrajectoryBundle bundle(params.size());
    std::vector<std::exception_ptr> errors(params.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < m; ++i) {
        try {
            bundle[i] = integrate_one(model, grid, params[i], opts, with_sensitivities);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return bundle;
}

TrajectoryBundle integrate_scenarios_serial(const DynamicsModel& model, const ControlGrid& grid,
                                            std::span<const double> params, const IntegratorOptions& opts,
                                            bool with_sensitivities) {
    TrajectoryBundle bundle;
    bundle.reserve(params.size());
    for (double p : params) bundle.push_back(integrate_one(model, grid, p, opts, with_sensitivities));
    return bundle;
}

VectorXd terminal_costs(const DynamicsModel& model, const TrajectoryBundle& bundle) {
    VectorXd c(static_cast<Eigen::Index>(bundle.size()));
    for (std::size_t i = 0; i < bundle.size(); ++i) c[static_cast<Eigen::Index>(i)] = model.cost(bundle[i].terminal_state());
    return c;
}

}  // namespace droc
